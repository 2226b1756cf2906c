#include "provsift/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace provsift {

std::vector<EdgeFeatures> normalize_features(const SemanticGraph& g) {
    if (g.edges.empty()) throw std::invalid_argument("cannot normalize features of an empty graph");

    uint64_t d_min = g.edges.front().bytes, d_max = d_min;
    int64_t t_min = g.edges.front().ti, t_max = t_min;
    for (const GraphEdge& e : g.edges) {
        d_min = std::min(d_min, e.bytes);
        d_max = std::max(d_max, e.bytes);
        t_min = std::min(t_min, e.ti);
        t_max = std::max(t_max, e.ti);
    }
    // spans computed in integer space so that affine rescaling of the raw
    // values cancels exactly
    const double d_span = static_cast<double>(d_max - d_min);
    const double t_span = static_cast<double>(t_max - t_min);

    std::vector<EdgeFeatures> out(g.edges.size());
    for (size_t i = 0; i < g.edges.size(); ++i) {
        out[i].d_hat = d_max == d_min
                           ? 1.0
                           : static_cast<double>(g.edges[i].bytes - d_min) / d_span;
        out[i].t_hat = t_max == t_min
                           ? 1.0
                           : static_cast<double>(g.edges[i].ti - t_min) / t_span;
    }
    return out;
}

double cosine_impact(const EdgeFeatures& a, const EdgeFeatures& b) {
    if ((a.d_hat == 0.0 && a.t_hat == 0.0) || (b.d_hat == 0.0 && b.t_hat == 0.0)) {
        return 0.0;
    }
    const double dot = a.d_hat * b.d_hat + a.t_hat * b.t_hat;
    const double norm = std::sqrt(a.d_hat * a.d_hat + a.t_hat * a.t_hat) *
                        std::sqrt(b.d_hat * b.d_hat + b.t_hat * b.t_hat);
    return std::clamp(dot / norm, 0.0, 1.0);
}

double inflation_alpha(size_t child_count, double c) {
    if (c <= 0.0) throw std::invalid_argument("inflation divisor must be positive");
    return 1.0 + static_cast<double>(child_count - 1) / c;
}

std::vector<double> event_scores(const FlowTree& tree, const std::vector<EdgeFeatures>& features,
                                 double c) {
    std::vector<double> scores(tree.nodes.size(), 0.0);
    scores[0] = 1.0;  // the POI anchors every path with the same constant

    for (size_t f = 0; f < tree.nodes.size(); ++f) {
        const FlowNode& parent = tree.nodes[f];
        if (parent.children.empty()) continue;
        const EdgeFeatures& parent_feat = features[parent.edge_index];

        double denom = 0.0;
        for (int child : parent.children) {
            denom += cosine_impact(features[tree.nodes[child].edge_index], parent_feat);
        }
        const double alpha = inflation_alpha(parent.children.size(), c);
        for (int child : parent.children) {
            if (denom > 0.0) {
                double impact = cosine_impact(features[tree.nodes[child].edge_index], parent_feat);
                scores[child] = alpha * impact / denom;
            } else {
                scores[child] = alpha / static_cast<double>(parent.children.size());
            }
        }
    }
    return scores;
}

double path_score(const FlowPath& path, const std::vector<double>& node_scores) {
    double sum = 0.0;
    for (int node : path.node_indices) sum += node_scores[node];
    return sum / static_cast<double>(path.node_indices.size());
}

void score_paths(std::vector<FlowPath>& paths, const std::vector<double>& node_scores) {
    for (FlowPath& p : paths) p.score = path_score(p, node_scores);
}

}  // namespace provsift
