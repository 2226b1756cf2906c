#include "provsift/backtrack.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace provsift {

std::vector<uint64_t> backtrack_closure(std::span<const Event> log, const Event& poi) {
    // events indexed by object, each bucket sorted by ti so the t < bound
    // range is a prefix
    std::unordered_map<EntityId, std::vector<size_t>, EntityIdHash> by_object;
    size_t poi_index = log.size();
    for (size_t i = 0; i < log.size(); ++i) {
        by_object[log[i].object].push_back(i);
        if (log[i].eid == poi.eid) poi_index = i;
    }
    if (poi_index == log.size()) {
        throw std::invalid_argument("POI event " + std::to_string(poi.eid) + " is not in the log");
    }
    for (auto& [id, bucket] : by_object) {
        std::sort(bucket.begin(), bucket.end(),
                  [&log](size_t a, size_t b) { return log[a].ti < log[b].ti; });
    }

    std::vector<char> included(log.size(), 0);
    std::vector<size_t> worklist;
    included[poi_index] = 1;
    worklist.push_back(poi_index);
    while (!worklist.empty()) {
        size_t cur = worklist.back();
        worklist.pop_back();
        auto it = by_object.find(log[cur].subject);
        if (it == by_object.end()) continue;
        for (size_t cand : it->second) {
            if (log[cand].ti >= log[cur].ti) break;  // bucket is ti-sorted
            if (!included[cand]) {
                included[cand] = 1;
                worklist.push_back(cand);
            }
        }
    }

    std::vector<uint64_t> eids;
    for (size_t i = 0; i < log.size(); ++i) {
        if (included[i]) eids.push_back(log[i].eid);
    }
    std::sort(eids.begin(), eids.end());
    return eids;
}

}  // namespace provsift
