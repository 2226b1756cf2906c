#pragma once

#include <cstddef>
#include <vector>

#include "provsift/graph.hpp"

namespace provsift {

// Multiway tree of graph edges rooted at the POI edge. A child holds an
// incoming edge of its parent's subject that happened strictly earlier;
// every graph edge appears at most once (first dequeued parent wins).
struct FlowNode {
    size_t edge_index = 0;      // into SemanticGraph::edges
    int parent = -1;            // into FlowTree::nodes, -1 for the root
    std::vector<int> children;  // in traversal order
};

struct FlowTree {
    std::vector<FlowNode> nodes;  // nodes[0] is the root

    const FlowNode& root() const { return nodes.front(); }
};

// Root-to-leaf node sequence with its contextual score.
struct FlowPath {
    std::vector<int> node_indices;  // into FlowTree::nodes, root first
    double score = 0.0;
};

struct FlowExtraction {
    FlowTree tree;
    std::vector<FlowPath> paths;  // unscored; ordering follows the tree
};

// Breadth-first suspicious-flow-path extraction from the POI edge. Incoming
// edges of each dequeued edge's subject are visited in descending (ti, eid)
// order, which pins the tree shape and path order for reproducibility.
FlowExtraction extract_sfps(const SemanticGraph& g);

}  // namespace provsift
