#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "provsift/event.hpp"

namespace provsift {

// Append-only log of the events referenced by RET entries, keyed by eid.
// Only transferring events are retained; RET snapshots are materialized
// from here. eids are strictly increasing, so lookup is a binary search.
class EventStore {
  public:
    void append(const Event& e);
    const Event* find(uint64_t eid) const;
    std::vector<Event> materialize(std::span<const uint64_t> eids) const;  // throws on unknown eid

    // Latest stored event whose object matches (and op, when given).
    std::optional<uint64_t> latest_matching(const EntityId& object, std::optional<Op> op) const;

    size_t size() const { return events_.size(); }
    const std::vector<Event>& all() const { return events_; }

    void save(const std::filesystem::path& path) const;
    static EventStore load(const std::filesystem::path& path);

  private:
    std::vector<Event> events_;
};

}  // namespace provsift
