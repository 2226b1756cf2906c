#pragma once

#include <cstdint>
#include <vector>

#include "provsift/event.hpp"

namespace provsift {

inline constexpr int64_t kDefaultCompactionWindowNs = 10'000'000'000;  // 10 s

// One edge of a semantic graph. Pre-compaction an edge is a single event;
// post-compaction it may merge a burst of same-(subject, object, op) events:
// bytes are summed, ti is the earliest constituent, eids lists every
// constituent in ascending order.
struct GraphEdge {
    EntityId subject;
    EntityId object;
    Op op = Op::Read;
    int64_t ti = 0;
    uint64_t bytes = 0;
    std::vector<uint64_t> eids;
};

// Suspicious semantic graph (or a filtered subgraph of one) for a POI event.
struct SemanticGraph {
    std::vector<EntityId> nodes;   // sorted by (kind, key)
    std::vector<GraphEdge> edges;  // sorted by (ti, first eid)
    size_t poi_index = 0;          // edge holding the POI event
    uint64_t poi_eid = 0;
    bool all_paths_filtered = false;

    const GraphEdge& poi() const { return edges.at(poi_index); }
    size_t event_count() const;    // total constituent events
    std::vector<uint64_t> edge_eids() const;  // all constituent eids, sorted
};

// Materializes the suspicious semantic graph from a related-event snapshot:
// one node per distinct entity, one edge per event, the POI edge marked.
// Throws PoiNotReachableError when poi is not part of the snapshot.
SemanticGraph build_ssg(const std::vector<Event>& snapshot, const Event& poi);

// Greedy left-to-right burst merge per (subject, object, op) group: an event
// joins the current merged edge while its gap to the previous constituent is
// below the window. Conserves total bytes and constituent counts.
SemanticGraph compact_edges(const SemanticGraph& g, int64_t window_ns = kDefaultCompactionWindowNs);

}  // namespace provsift
