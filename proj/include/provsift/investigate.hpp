#pragma once

#include <cstdint>
#include <vector>

#include "provsift/flow.hpp"
#include "provsift/graph.hpp"
#include "provsift/scoring.hpp"

namespace provsift {

// Critical component graph: the compacted SSG minus every edge that appears
// only in paths scoring below the threshold. The POI edge is always kept;
// when no path reaches the threshold the result is exactly the POI edge,
// flagged all_paths_filtered.
SemanticGraph build_ccg(const SemanticGraph& compacted, const FlowTree& tree,
                        const std::vector<FlowPath>& scored_paths, double t_threshold);

struct InvestigationStats {
    size_t snapshot_events = 0;
    size_t ssg_edges = 0;
    size_t compacted_edges = 0;
    size_t tree_nodes = 0;
    size_t path_count = 0;
    size_t relevant_paths = 0;
    size_t ccg_edges = 0;
    size_t ccg_events = 0;  // constituent eids identified by the CCG
};

struct Investigation {
    SemanticGraph ssg;
    SemanticGraph compacted;
    FlowTree tree;
    std::vector<FlowPath> paths;        // scored
    std::vector<EdgeFeatures> features; // per compacted edge
    std::vector<double> node_scores;    // per tree node
    SemanticGraph ccg;
    InvestigationStats stats;
};

// Full phase-II pipeline: SSG construction, edge compaction, flow-path
// extraction, contextual scoring, threshold filtering.
Investigation investigate(const std::vector<Event>& snapshot, const Event& poi,
                          const ScoringParams& params, int64_t window_ns = kDefaultCompactionWindowNs);

// Rescores an existing investigation under new parameters without rebuilding
// the graphs or the tree; used by parameter sweeps.
void rescore(Investigation& inv, const ScoringParams& params);

}  // namespace provsift
