#pragma once

#include <optional>
#include <string>
#include <vector>

#include "provsift/investigate.hpp"

namespace provsift {

// Per-edge annotations for CCG exports: the edge's event score in the flow
// tree and the relevant paths that retained it.
struct EdgeAnnotation {
    std::optional<double> score;
    std::vector<size_t> retained_by;
};

// Annotations aligned with inv.ccg.edges.
std::vector<EdgeAnnotation> ccg_annotations(const Investigation& inv, double t_threshold);

// Structured-text graph export with stable node/edge/field ordering;
// byte-identical for identical graphs.
std::string graph_to_text(const SemanticGraph& g,
                          const std::vector<EdgeAnnotation>* annotations = nullptr);

// Graphviz form: processes as boxes, files as ellipses, sockets as diamonds,
// the POI edge in red.
std::string graph_to_dot(const SemanticGraph& g);

// Path report: every suspicious flow path with its score, verdict against
// the threshold, and edge sequence.
std::string paths_to_text(const Investigation& inv, const ScoringParams& params);

}  // namespace provsift
