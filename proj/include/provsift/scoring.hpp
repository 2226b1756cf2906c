#pragma once

#include <vector>

#include "provsift/flow.hpp"
#include "provsift/graph.hpp"

namespace provsift {

struct ScoringParams {
    double c = 5.0;  // inflation divisor
    double t = 0.5;  // path threshold: score < t means irrelevant
};

// Min-max normalized (data amount, time) per edge, both in [0, 1].
struct EdgeFeatures {
    double d_hat = 0.0;
    double t_hat = 0.0;
};

// Min-max normalization across all edges of the graph, separately per
// feature. A degenerate feature (max == min) maps every edge to 1: identical
// raw values mean maximal similarity on that axis.
std::vector<EdgeFeatures> normalize_features(const SemanticGraph& g);

// Cosine similarity of the two feature vectors; 0 when either is the zero
// vector. Result is clamped into [0, 1].
double cosine_impact(const EdgeFeatures& a, const EdgeFeatures& b);

// Inflation factor: 1 + (children - 1) / c.
double inflation_alpha(size_t child_count, double c);

// Per-tree-node scores. The root (POI) scores 1; a child scores
// alpha * Impact(child, parent) / sum of sibling impacts, falling back to
// alpha / |children| when every sibling impact is zero.
std::vector<double> event_scores(const FlowTree& tree, const std::vector<EdgeFeatures>& features,
                                 double c);

// Mean event score over the path, root included.
double path_score(const FlowPath& path, const std::vector<double>& node_scores);

void score_paths(std::vector<FlowPath>& paths, const std::vector<double>& node_scores);

}  // namespace provsift
