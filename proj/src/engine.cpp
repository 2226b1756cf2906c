#include "provsift/engine.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <json.hpp>

#include "provsift/errors.hpp"

namespace provsift {

using json = nlohmann::ordered_json;

std::vector<EntityId> select_evictions(std::vector<TierCandidate> hot, size_t hot_cap) {
    std::sort(hot.begin(), hot.end(), [](const TierCandidate& a, const TierCandidate& b) {
        if (a.mods != b.mods) return a.mods < b.mods;
        if (a.touch_seq != b.touch_seq) return a.touch_seq < b.touch_seq;
        return a.id < b.id;
    });
    std::vector<EntityId> evicted;
    size_t remaining = hot.size();
    for (auto& candidate : hot) {
        if (remaining < hot_cap) break;
        evicted.push_back(std::move(candidate.id));
        --remaining;
    }
    return evicted;
}

Engine::Engine(EngineConfig cfg, std::filesystem::path state_dir)
    : cfg_(std::move(cfg)), state_dir_(std::move(state_dir)) {
    if (cfg_.hot_cap == 0) {
        throw std::invalid_argument("hot_cap must be at least 1");
    }
    if (!state_dir_.empty()) {
        std::filesystem::create_directories(state_dir_);
        cold_ = ColdStore(state_dir_);
    }
}

bool Engine::transfers_from_locked(const EntityId& subject) const {
    // Algorithm-1 guard: a non-whitelisted socket, or a file/process that
    // already made it into the SEL.
    if (subject.kind == EntityKind::Socket) {
        return !cfg_.whitelist.contains(subject);
    }
    return sel_.count(subject) > 0;
}

void Engine::promote_locked(const EntityId& id, RetEntry& entry) {
    if (!entry.hot) {
        auto eids = cold_.load(id);
        if (!eids) throw StorageError("cold entry missing for " + id.key);
        entry.eids = std::move(*eids);
        entry.hot = true;
        ++hot_count_;
        ++counters_.promotions;
    }
}

TransferOutcome Engine::process_event(Event e) {
    std::unique_lock lock(*mu_);

    if (last_ti_ != INT64_MIN && e.ti < last_ti_ - cfg_.ooo_slack_ns) {
        throw SequencingError("event ti " + std::to_string(e.ti) + " precedes high-water mark " +
                              std::to_string(last_ti_) + " beyond the configured slack of " +
                              std::to_string(cfg_.ooo_slack_ns) + " ns");
    }
    if (!kinds_match(e.op, e.subject.kind, e.object.kind)) {
        throw std::invalid_argument(std::string("event kinds do not match any transfer rule: ") +
                                    to_string(e.op) + " " + to_string(e.subject.kind) + "->" +
                                    to_string(e.object.kind));
    }

    last_ti_ = std::max(last_ti_, e.ti);
    e.eid = ++seq_;
    ++counters_.events_processed;

    TransferOutcome outcome;
    outcome.eid = e.eid;

    if (e.subject == e.object) {
        ++counters_.self_loops;
        return outcome;
    }
    if (!transfers_from_locked(e.subject)) {
        return outcome;
    }

    // the object turns suspicious and inherits the subject's related events
    outcome.transferred = true;
    ++counters_.transfers;
    store_.append(e);

    std::vector<uint64_t> stitched;
    auto subj_it = ret_.find(e.subject);
    if (subj_it != ret_.end()) {
        promote_locked(e.subject, subj_it->second);
        subj_it->second.touch_seq = ++touch_counter_;
        stitched = subj_it->second.eids;  // snapshot at this moment
    }
    stitched.push_back(e.eid);

    auto [obj_it, inserted] = ret_.try_emplace(e.object);
    RetEntry& obj = obj_it->second;
    if (inserted) {
        ++hot_count_;
    } else if (!obj.hot) {
        // replaced wholesale; the stale cold segment is never read back
        obj.hot = true;
        ++hot_count_;
        ++counters_.promotions;
    }
    obj.eids = std::move(stitched);
    ++obj.mods;
    obj.touch_seq = ++touch_counter_;

    if (e.object.kind != EntityKind::Socket) {
        if (sel_.insert(e.object).second) {
            sel_order_.push_back(e.object);
            outcome.newly_suspicious = e.object;
        }
    } else if (cfg_.whitelist.contains(e.object)) {
        tainted_whitelisted_.insert(e.object);
    }

    if (cfg_.auto_maintenance && cold_.attached() && hot_count_ > cfg_.hot_cap) {
        EvictionReport report;
        maintenance_locked(report);
    }
    return outcome;
}

void Engine::maintenance_locked(EvictionReport& report) {
    if (cold_.attached() && hot_count_ >= cfg_.hot_cap) {
        std::vector<TierCandidate> hot;
        hot.reserve(hot_count_);
        for (auto& [id, entry] : ret_) {
            if (entry.hot) hot.push_back({id, entry.mods, entry.touch_seq});
        }
        report.evicted = select_evictions(std::move(hot), cfg_.hot_cap);
        for (const EntityId& id : report.evicted) {
            RetEntry& entry = ret_.at(id);
            cold_.store(id, entry.eids);
            entry.eids.clear();
            entry.eids.shrink_to_fit();
            entry.hot = false;
            entry.mods = 0;
            --hot_count_;
            ++counters_.evictions;
        }
    }
    // a new counting cycle starts
    for (auto& [id, entry] : ret_) {
        if (entry.hot) entry.mods = 0;
    }
    ++counters_.maintenance_cycles;
}

EvictionReport Engine::tier_maintenance() {
    std::unique_lock lock(*mu_);
    EvictionReport report;
    maintenance_locked(report);
    return report;
}

std::vector<Event> Engine::snapshot_related(const EntityId& uid) const {
    std::shared_lock lock(*mu_);
    auto it = ret_.find(uid);
    if (it == ret_.end()) {
        throw EntityNotSuspiciousError("entity not suspicious: " + std::string(to_string(uid.kind)) +
                                       " '" + uid.key + "'");
    }
    if (it->second.hot) {
        return store_.materialize(it->second.eids);
    }
    auto eids = cold_.load(uid);
    if (!eids) throw StorageError("cold entry missing for " + uid.key);
    return store_.materialize(*eids);
}

bool Engine::whitelist_check(const EntityId& sock) const {
    return cfg_.whitelist.contains(sock);
}

bool Engine::is_suspicious(const EntityId& uid) const {
    std::shared_lock lock(*mu_);
    if (uid.kind == EntityKind::Socket) {
        return !cfg_.whitelist.contains(uid) || tainted_whitelisted_.count(uid) > 0;
    }
    return sel_.count(uid) > 0;
}

size_t Engine::sel_size() const {
    std::shared_lock lock(*mu_);
    return sel_order_.size();
}

bool Engine::sel_contains(const EntityId& uid) const {
    std::shared_lock lock(*mu_);
    return sel_.count(uid) > 0;
}

std::vector<EntityId> Engine::sel_entries() const {
    std::shared_lock lock(*mu_);
    return sel_order_;
}

std::optional<std::vector<uint64_t>> Engine::related_eids(const EntityId& uid) const {
    std::shared_lock lock(*mu_);
    auto it = ret_.find(uid);
    if (it == ret_.end()) return std::nullopt;
    if (it->second.hot) return it->second.eids;
    auto eids = cold_.load(uid);
    if (!eids) throw StorageError("cold entry missing for " + uid.key);
    return eids;
}

size_t Engine::ret_size() const {
    std::shared_lock lock(*mu_);
    return ret_.size();
}

size_t Engine::hot_count() const {
    std::shared_lock lock(*mu_);
    return hot_count_;
}

size_t Engine::cold_count() const {
    std::shared_lock lock(*mu_);
    return ret_.size() - hot_count_;
}

uint64_t Engine::last_eid() const {
    std::shared_lock lock(*mu_);
    return seq_;
}

int64_t Engine::last_ti() const {
    std::shared_lock lock(*mu_);
    return last_ti_ == INT64_MIN ? 0 : last_ti_;
}

EngineCounters Engine::counters() const {
    std::shared_lock lock(*mu_);
    return counters_;
}

uint64_t Engine::state_bytes_estimate() const {
    std::shared_lock lock(*mu_);
    uint64_t bytes = 0;
    for (const auto& id : sel_order_) bytes += 48 + id.key.size();
    for (const auto& [id, entry] : ret_) {
        bytes += 96 + id.key.size() + entry.eids.capacity() * sizeof(uint64_t);
    }
    for (const Event& e : store_.all()) {
        bytes += sizeof(Event) + e.subject.key.size() + e.object.key.size();
    }
    bytes += tainted_whitelisted_.size() * 64;
    return bytes;
}

namespace {

constexpr int kStateVersion = 1;

json entity_to_json(const EntityId& id) {
    return json{{"kind", to_string(id.kind)}, {"key", id.key}};
}

EntityId entity_from_json(const json& j) {
    auto kind = entity_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw StorageError("manifest holds an unknown entity kind");
    return {*kind, j.at("key").get<std::string>()};
}

}  // namespace

void Engine::checkpoint() const {
    std::unique_lock lock(*mu_);
    if (state_dir_.empty()) {
        throw StorageError("checkpoint requires a state directory");
    }

    store_.save(state_dir_ / "events.dat");

    // hot RET entries; cold entries are already on disk and rebuilt from the
    // cold index on restore
    {
        std::ofstream out(state_dir_ / "ret_hot.dat", std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write hot RET file");
        auto put_u64 = [&out](uint64_t v) {
            char buf[8];
            for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>(v >> (8 * i));
            out.write(buf, 8);
        };
        std::vector<std::pair<const EntityId*, const RetEntry*>> hot;
        for (const auto& [id, entry] : ret_) {
            if (entry.hot) hot.emplace_back(&id, &entry);
        }
        std::sort(hot.begin(), hot.end(), [](auto& a, auto& b) { return *a.first < *b.first; });
        put_u64(hot.size());
        for (auto& [id, entry] : hot) {
            out.put(static_cast<char>(id->kind));
            put_u64(id->key.size());
            out.write(id->key.data(), static_cast<std::streamsize>(id->key.size()));
            put_u64(entry->mods);
            put_u64(entry->touch_seq);
            put_u64(entry->eids.size());
            for (uint64_t eid : entry->eids) put_u64(eid);
        }
        out.flush();
        if (!out) throw StorageError("hot RET write failed");
    }

    json manifest;
    manifest["version"] = kStateVersion;
    manifest["next_eid"] = seq_ + 1;
    manifest["last_ti"] = last_ti_ == INT64_MIN ? json(nullptr) : json(last_ti_);
    manifest["touch_counter"] = touch_counter_;
    manifest["hot_cap"] = cfg_.hot_cap;
    manifest["ooo_slack_ns"] = cfg_.ooo_slack_ns;
    manifest["auto_maintenance"] = cfg_.auto_maintenance;
    manifest["whitelist"] = cfg_.whitelist.entries();
    manifest["counters"] = {{"events_processed", counters_.events_processed},
                            {"transfers", counters_.transfers},
                            {"self_loops", counters_.self_loops},
                            {"evictions", counters_.evictions},
                            {"promotions", counters_.promotions},
                            {"maintenance_cycles", counters_.maintenance_cycles}};
    json sel = json::array();
    for (const auto& id : sel_order_) sel.push_back(entity_to_json(id));
    manifest["sel"] = std::move(sel);
    json tainted = json::array();
    std::vector<EntityId> tw(tainted_whitelisted_.begin(), tainted_whitelisted_.end());
    std::sort(tw.begin(), tw.end());
    for (const auto& id : tw) tainted.push_back(entity_to_json(id));
    manifest["tainted_whitelisted"] = std::move(tainted);

    std::ofstream out(state_dir_ / "manifest.json", std::ios::trunc);
    if (!out) throw StorageError("cannot write state manifest");
    out << manifest.dump(2) << "\n";
    out.flush();
    if (!out) throw StorageError("state manifest write failed");
}

Engine Engine::restore(const std::filesystem::path& state_dir, std::optional<EngineConfig> config_override) {
    std::ifstream in(state_dir / "manifest.json");
    if (!in) throw StorageError("no manifest in state directory: " + state_dir.string());
    json manifest = json::parse(in, nullptr, false);
    if (manifest.is_discarded()) throw StorageError("corrupt manifest in " + state_dir.string());
    if (manifest.at("version").get<int>() != kStateVersion) {
        throw StorageError("unsupported state version in " + state_dir.string());
    }

    EngineConfig cfg;
    if (config_override) {
        cfg = std::move(*config_override);
    } else {
        cfg.hot_cap = manifest.at("hot_cap").get<size_t>();
        cfg.ooo_slack_ns = manifest.at("ooo_slack_ns").get<int64_t>();
        cfg.auto_maintenance = manifest.at("auto_maintenance").get<bool>();
        for (const auto& entry : manifest.at("whitelist")) {
            cfg.whitelist.add_entry(entry.get<std::string>());
        }
    }

    Engine engine(std::move(cfg), state_dir);
    engine.seq_ = manifest.at("next_eid").get<uint64_t>() - 1;
    engine.last_ti_ = manifest.at("last_ti").is_null() ? INT64_MIN : manifest.at("last_ti").get<int64_t>();
    engine.touch_counter_ = manifest.at("touch_counter").get<uint64_t>();
    const auto& counters = manifest.at("counters");
    engine.counters_.events_processed = counters.at("events_processed").get<uint64_t>();
    engine.counters_.transfers = counters.at("transfers").get<uint64_t>();
    engine.counters_.self_loops = counters.at("self_loops").get<uint64_t>();
    engine.counters_.evictions = counters.at("evictions").get<uint64_t>();
    engine.counters_.promotions = counters.at("promotions").get<uint64_t>();
    engine.counters_.maintenance_cycles = counters.at("maintenance_cycles").get<uint64_t>();

    for (const auto& j : manifest.at("sel")) {
        EntityId id = entity_from_json(j);
        engine.sel_.insert(id);
        engine.sel_order_.push_back(std::move(id));
    }
    for (const auto& j : manifest.at("tainted_whitelisted")) {
        engine.tainted_whitelisted_.insert(entity_from_json(j));
    }

    if (std::filesystem::exists(state_dir / "events.dat")) {
        engine.store_ = EventStore::load(state_dir / "events.dat");
    }

    auto hot_path = state_dir / "ret_hot.dat";
    if (std::filesystem::exists(hot_path)) {
        std::ifstream hot(hot_path, std::ios::binary);
        auto get_u64 = [&hot](uint64_t& v) {
            unsigned char buf[8];
            if (!hot.read(reinterpret_cast<char*>(buf), 8)) return false;
            v = 0;
            for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf[i]) << (8 * i);
            return true;
        };
        uint64_t count = 0;
        if (!get_u64(count)) throw StorageError("corrupt hot RET file");
        for (uint64_t i = 0; i < count; ++i) {
            int kind = hot.get();
            uint64_t key_len = 0;
            if (kind == EOF || !get_u64(key_len)) throw StorageError("corrupt hot RET file");
            std::string key(key_len, '\0');
            if (!hot.read(key.data(), static_cast<std::streamsize>(key_len))) {
                throw StorageError("corrupt hot RET file");
            }
            RetEntry entry;
            uint64_t n = 0;
            if (!get_u64(entry.mods) || !get_u64(entry.touch_seq) || !get_u64(n)) {
                throw StorageError("corrupt hot RET file");
            }
            entry.eids.resize(n);
            for (uint64_t& eid : entry.eids) {
                if (!get_u64(eid)) throw StorageError("corrupt hot RET file");
            }
            entry.hot = true;
            engine.ret_[EntityId{static_cast<EntityKind>(kind), std::move(key)}] = std::move(entry);
        }
        engine.hot_count_ = engine.ret_.size();
    }

    // anything in the cold index that is not hot stays cold
    for (const EntityId& id : engine.cold_.keys()) {
        auto [it, inserted] = engine.ret_.try_emplace(id);
        if (inserted) {
            it->second.hot = false;
        }
    }
    return engine;
}

}  // namespace provsift
