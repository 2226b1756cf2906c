#include "provsift/flow.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace provsift {

FlowExtraction extract_sfps(const SemanticGraph& g) {
    if (g.edges.empty()) throw std::invalid_argument("cannot extract paths from an empty graph");

    // incoming edges per entity, ordered by descending (ti, eid)
    std::unordered_map<EntityId, std::vector<size_t>, EntityIdHash> in_edges;
    for (size_t i = 0; i < g.edges.size(); ++i) {
        in_edges[g.edges[i].object].push_back(i);
    }
    for (auto& [id, edges] : in_edges) {
        std::sort(edges.begin(), edges.end(), [&g](size_t a, size_t b) {
            const GraphEdge& ea = g.edges[a];
            const GraphEdge& eb = g.edges[b];
            if (ea.ti != eb.ti) return ea.ti > eb.ti;
            return ea.eids.front() > eb.eids.front();
        });
    }

    FlowExtraction out;
    std::vector<char> seen(g.edges.size(), 0);  // enqueued or visited
    std::deque<int> queue;

    out.tree.nodes.push_back(FlowNode{g.poi_index, -1, {}});
    seen[g.poi_index] = 1;
    queue.push_back(0);

    while (!queue.empty()) {
        int node_idx = queue.front();
        queue.pop_front();
        const size_t edge_idx = out.tree.nodes[node_idx].edge_index;
        const GraphEdge& edge = g.edges[edge_idx];
        auto it = in_edges.find(edge.subject);
        if (it == in_edges.end()) continue;
        for (size_t ie : it->second) {
            if (seen[ie] || g.edges[ie].ti >= edge.ti) continue;
            seen[ie] = 1;
            int child_idx = static_cast<int>(out.tree.nodes.size());
            out.tree.nodes.push_back(FlowNode{ie, node_idx, {}});
            out.tree.nodes[node_idx].children.push_back(child_idx);
            queue.push_back(child_idx);
        }
    }

    // all root-to-leaf paths, depth-first in child order
    std::vector<int> stack{0};
    std::vector<int> prefix;
    // iterative DFS carrying the path prefix
    struct Frame {
        int node;
        size_t next_child = 0;
    };
    std::vector<Frame> frames{{0, 0}};
    prefix.push_back(0);
    while (!frames.empty()) {
        Frame& f = frames.back();
        const FlowNode& node = out.tree.nodes[f.node];
        if (node.children.empty() && f.next_child == 0) {
            FlowPath path;
            path.node_indices = prefix;
            out.paths.push_back(std::move(path));
        }
        if (f.next_child < node.children.size()) {
            int child = node.children[f.next_child++];
            frames.push_back({child, 0});
            prefix.push_back(child);
        } else {
            frames.pop_back();
            prefix.pop_back();
        }
    }
    return out;
}

}  // namespace provsift
