#include "provsift/investigate.hpp"

#include <algorithm>
#include <set>

namespace provsift {

SemanticGraph build_ccg(const SemanticGraph& compacted, const FlowTree& tree,
                        const std::vector<FlowPath>& scored_paths, double t_threshold) {
    std::vector<char> retained(compacted.edges.size(), 0);
    bool any_relevant = false;
    for (const FlowPath& path : scored_paths) {
        if (path.score < t_threshold) continue;  // irrelevant path
        any_relevant = true;
        for (int node : path.node_indices) {
            retained[tree.nodes[node].edge_index] = 1;
        }
    }

    SemanticGraph ccg;
    ccg.poi_eid = compacted.poi_eid;
    if (!any_relevant) {
        ccg.all_paths_filtered = true;
        retained[compacted.poi_index] = 1;
    }

    std::set<EntityId> nodes;
    for (size_t i = 0; i < compacted.edges.size(); ++i) {
        if (!retained[i]) continue;
        if (i == compacted.poi_index) ccg.poi_index = ccg.edges.size();
        ccg.edges.push_back(compacted.edges[i]);
        nodes.insert(compacted.edges[i].subject);
        nodes.insert(compacted.edges[i].object);
    }
    ccg.nodes.assign(nodes.begin(), nodes.end());
    return ccg;
}

Investigation investigate(const std::vector<Event>& snapshot, const Event& poi,
                          const ScoringParams& params, int64_t window_ns) {
    Investigation inv;
    inv.ssg = build_ssg(snapshot, poi);
    inv.compacted = compact_edges(inv.ssg, window_ns);

    FlowExtraction extraction = extract_sfps(inv.compacted);
    inv.tree = std::move(extraction.tree);
    inv.paths = std::move(extraction.paths);

    inv.features = normalize_features(inv.compacted);
    inv.node_scores = event_scores(inv.tree, inv.features, params.c);
    score_paths(inv.paths, inv.node_scores);
    inv.ccg = build_ccg(inv.compacted, inv.tree, inv.paths, params.t);

    inv.stats.snapshot_events = snapshot.size();
    inv.stats.ssg_edges = inv.ssg.edges.size();
    inv.stats.compacted_edges = inv.compacted.edges.size();
    inv.stats.tree_nodes = inv.tree.nodes.size();
    inv.stats.path_count = inv.paths.size();
    inv.stats.relevant_paths = static_cast<size_t>(
        std::count_if(inv.paths.begin(), inv.paths.end(),
                      [&params](const FlowPath& p) { return p.score >= params.t; }));
    inv.stats.ccg_edges = inv.ccg.edges.size();
    inv.stats.ccg_events = inv.ccg.event_count();
    return inv;
}

void rescore(Investigation& inv, const ScoringParams& params) {
    inv.node_scores = event_scores(inv.tree, inv.features, params.c);
    score_paths(inv.paths, inv.node_scores);
    inv.ccg = build_ccg(inv.compacted, inv.tree, inv.paths, params.t);
    inv.stats.relevant_paths = static_cast<size_t>(
        std::count_if(inv.paths.begin(), inv.paths.end(),
                      [&params](const FlowPath& p) { return p.score >= params.t; }));
    inv.stats.ccg_edges = inv.ccg.edges.size();
    inv.stats.ccg_events = inv.ccg.event_count();
}

}  // namespace provsift
