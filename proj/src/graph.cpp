#include "provsift/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "provsift/errors.hpp"

namespace provsift {

namespace {

void sort_edges_and_find_poi(SemanticGraph& g, uint64_t poi_eid) {
    std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return std::tie(a.ti, a.eids.front()) < std::tie(b.ti, b.eids.front());
    });
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const auto& eids = g.edges[i].eids;
        if (std::binary_search(eids.begin(), eids.end(), poi_eid)) {
            g.poi_index = i;
            return;
        }
    }
    throw std::logic_error("POI edge lost while sorting");
}

void collect_nodes(SemanticGraph& g) {
    std::set<EntityId> nodes;
    for (const GraphEdge& e : g.edges) {
        nodes.insert(e.subject);
        nodes.insert(e.object);
    }
    g.nodes.assign(nodes.begin(), nodes.end());
}

}  // namespace

size_t SemanticGraph::event_count() const {
    size_t n = 0;
    for (const GraphEdge& e : edges) n += e.eids.size();
    return n;
}

std::vector<uint64_t> SemanticGraph::edge_eids() const {
    std::vector<uint64_t> out;
    out.reserve(event_count());
    for (const GraphEdge& e : edges) out.insert(out.end(), e.eids.begin(), e.eids.end());
    std::sort(out.begin(), out.end());
    return out;
}

SemanticGraph build_ssg(const std::vector<Event>& snapshot, const Event& poi) {
    bool poi_present = false;
    SemanticGraph g;
    g.edges.reserve(snapshot.size());
    for (const Event& e : snapshot) {
        if (e.eid == poi.eid) poi_present = true;
        GraphEdge edge;
        edge.subject = e.subject;
        edge.object = e.object;
        edge.op = e.op;
        edge.ti = e.ti;
        edge.bytes = e.bytes;
        edge.eids = {e.eid};
        g.edges.push_back(std::move(edge));
    }
    if (!poi_present) {
        throw PoiNotReachableError("POI not semantically reachable: event " + std::to_string(poi.eid) +
                                   " is not among the related events of " + poi.object.key);
    }
    g.poi_eid = poi.eid;
    collect_nodes(g);
    sort_edges_and_find_poi(g, poi.eid);
    return g;
}

SemanticGraph compact_edges(const SemanticGraph& g, int64_t window_ns) {
    if (window_ns <= 0) throw std::invalid_argument("compaction window must be positive");

    // group edges by (subject, object, op), keep each group in (ti, eid) order
    std::map<std::tuple<EntityId, EntityId, Op>, std::vector<const GraphEdge*>> groups;
    for (const GraphEdge& e : g.edges) {
        groups[{e.subject, e.object, e.op}].push_back(&e);
    }

    SemanticGraph out;
    out.nodes = g.nodes;
    out.poi_eid = g.poi_eid;
    out.all_paths_filtered = g.all_paths_filtered;
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), [](const GraphEdge* a, const GraphEdge* b) {
            return std::tie(a->ti, a->eids.front()) < std::tie(b->ti, b->eids.front());
        });
        GraphEdge merged;
        int64_t chain_last_ti = 0;
        bool open = false;
        auto close_group = [&]() {
            std::sort(merged.eids.begin(), merged.eids.end());
            out.edges.push_back(std::move(merged));
            merged = GraphEdge{};
        };
        for (const GraphEdge* e : members) {
            if (open && e->ti - chain_last_ti < window_ns) {
                merged.bytes += e->bytes;
                merged.eids.insert(merged.eids.end(), e->eids.begin(), e->eids.end());
            } else {
                if (open) close_group();
                merged = *e;
                open = true;
            }
            chain_last_ti = std::max(chain_last_ti, e->ti);
        }
        if (open) close_group();
    }
    sort_edges_and_find_poi(out, g.poi_eid);
    return out;
}

}  // namespace provsift
