#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "provsift/cold_store.hpp"
#include "provsift/event.hpp"
#include "provsift/event_store.hpp"
#include "provsift/whitelist.hpp"

namespace provsift {

struct EngineConfig {
    size_t hot_cap = 4096;         // max hot RET entries
    int64_t ooo_slack_ns = 0;      // tolerated backwards jump in ti
    bool auto_maintenance = true;  // run tier maintenance on hot-cap breach
    SocketWhitelist whitelist;
};

struct TransferOutcome {
    uint64_t eid = 0;
    bool transferred = false;
    std::optional<EntityId> newly_suspicious;
};

struct EvictionReport {
    std::vector<EntityId> evicted;  // in eviction order
};

struct EngineCounters {
    uint64_t events_processed = 0;
    uint64_t transfers = 0;
    uint64_t self_loops = 0;
    uint64_t evictions = 0;
    uint64_t promotions = 0;
    uint64_t maintenance_cycles = 0;
};

// Eviction policy for one maintenance cycle: least-modified entries leave
// first (ties: least recently touched, then key order) while the hot count
// is at or above the cap.
struct TierCandidate {
    EntityId id;
    uint64_t mods = 0;
    uint64_t touch_seq = 0;
};
std::vector<EntityId> select_evictions(std::vector<TierCandidate> hot, size_t hot_cap);

// Streaming state of the suspicious-semantic transfer rule: the suspicious
// entity list (SEL, append-only, file/process entities only) and the related
// event table (RET, hot in memory / cold on disk), plus the store of
// transferring events that backs snapshot materialization.
//
// One logical writer drives process_event / tier_maintenance / checkpoint;
// snapshot_related and the read accessors may run concurrently from other
// threads and always observe a fully applied event.
class Engine {
  public:
    // With an empty state_dir the engine runs detached: no cold tier, no
    // checkpointing, hot entries never evicted.
    explicit Engine(EngineConfig cfg, std::filesystem::path state_dir = {});

    Engine(Engine&&) = default;
    Engine& operator=(Engine&&) = default;

    // One step of the transfer rule. The eid is assigned by the engine's
    // sequencer (any caller-supplied eid is ignored). Throws SequencingError
    // when ti regresses beyond ooo_slack_ns, StorageError on cold-tier
    // failure (the event is not consumed in either case).
    TransferOutcome process_event(Event e);

    // Immutable copy of RET[uid], materialized to full events. Throws
    // EntityNotSuspiciousError when uid has no related events.
    std::vector<Event> snapshot_related(const EntityId& uid) const;

    EvictionReport tier_maintenance();

    bool whitelist_check(const EntityId& sock) const;
    bool is_suspicious(const EntityId& uid) const;

    size_t sel_size() const;
    bool sel_contains(const EntityId& uid) const;
    std::vector<EntityId> sel_entries() const;  // insertion order

    std::optional<std::vector<uint64_t>> related_eids(const EntityId& uid) const;
    size_t ret_size() const;
    size_t hot_count() const;
    size_t cold_count() const;

    const EventStore& events() const { return store_; }
    uint64_t last_eid() const;
    int64_t last_ti() const;
    EngineCounters counters() const;
    const EngineConfig& config() const { return cfg_; }
    const std::filesystem::path& state_dir() const { return state_dir_; }

    // Rough resident footprint of SEL + hot RET + cold index + event store.
    uint64_t state_bytes_estimate() const;

    void checkpoint() const;  // requires a state dir
    static Engine restore(const std::filesystem::path& state_dir,
                          std::optional<EngineConfig> config_override = std::nullopt);

  private:
    struct RetEntry {
        std::vector<uint64_t> eids;  // empty while cold
        uint64_t mods = 0;           // modifications since the last cycle
        uint64_t touch_seq = 0;
        bool hot = true;
    };

    bool transfers_from_locked(const EntityId& subject) const;
    void maintenance_locked(EvictionReport& report);
    void promote_locked(const EntityId& id, RetEntry& entry);

    EngineConfig cfg_;
    std::filesystem::path state_dir_;
    ColdStore cold_;
    EventStore store_;

    std::unordered_map<EntityId, RetEntry, EntityIdHash> ret_;
    std::unordered_set<EntityId, EntityIdHash> sel_;
    std::vector<EntityId> sel_order_;
    std::unordered_set<EntityId, EntityIdHash> tainted_whitelisted_;

    uint64_t seq_ = 0;
    int64_t last_ti_ = INT64_MIN;
    uint64_t touch_counter_ = 0;
    size_t hot_count_ = 0;
    EngineCounters counters_;

    mutable std::unique_ptr<std::shared_mutex> mu_ = std::make_unique<std::shared_mutex>();
};

}  // namespace provsift
