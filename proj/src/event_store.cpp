#include "provsift/event_store.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "provsift/errors.hpp"
#include "provsift/parser.hpp"

namespace provsift {

void EventStore::append(const Event& e) {
    if (!events_.empty() && e.eid <= events_.back().eid) {
        throw std::logic_error("event store eids must be strictly increasing");
    }
    events_.push_back(e);
}

const Event* EventStore::find(uint64_t eid) const {
    auto it = std::lower_bound(events_.begin(), events_.end(), eid,
                               [](const Event& e, uint64_t id) { return e.eid < id; });
    if (it == events_.end() || it->eid != eid) return nullptr;
    return &*it;
}

std::vector<Event> EventStore::materialize(std::span<const uint64_t> eids) const {
    std::vector<Event> out;
    out.reserve(eids.size());
    for (uint64_t eid : eids) {
        const Event* e = find(eid);
        if (e == nullptr) {
            throw std::out_of_range("event store has no eid " + std::to_string(eid));
        }
        out.push_back(*e);
    }
    return out;
}

std::optional<uint64_t> EventStore::latest_matching(const EntityId& object, std::optional<Op> op) const {
    for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
        if (it->object == object && (!op || it->op == *op)) return it->eid;
    }
    return std::nullopt;
}

void EventStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot open event store file for writing: " + path.string());
    std::string line;
    for (const Event& e : events_) {
        line.clear();
        line += std::to_string(e.eid);
        line += '\t';
        serialize_event_to(e, line);
        line += '\n';
        out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
    out.flush();
    if (!out) throw StorageError("event store write failed: " + path.string());
}

EventStore EventStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot open event store file: " + path.string());
    EventStore store;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        uint64_t eid = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + (tab == std::string::npos ? 0 : tab), eid);
        ParsedLine parsed =
            tab == std::string::npos ? ParsedLine{} : parse_event_line(std::string_view(line).substr(tab + 1));
        if (tab == std::string::npos || ec != std::errc{} || ptr != line.data() + tab ||
            parsed.status != LineStatus::Ok) {
            throw StorageError("corrupt event store record at " + path.string() + ":" + std::to_string(lineno));
        }
        parsed.event.eid = eid;
        store.append(parsed.event);
    }
    return store;
}

}  // namespace provsift
