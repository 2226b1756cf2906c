#include "provsift/export.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

namespace provsift {

using json = nlohmann::ordered_json;

namespace {

json entity_json(const EntityId& id) {
    return json{{"kind", to_string(id.kind)}, {"key", id.key}};
}

json edge_json(const GraphEdge& e, bool is_poi) {
    json j;
    j["subject"] = entity_json(e.subject);
    j["object"] = entity_json(e.object);
    j["op"] = to_string(e.op);
    j["ti"] = e.ti;
    j["bytes"] = e.bytes;
    j["eids"] = e.eids;
    j["poi"] = is_poi;
    return j;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string dot_node_id(const EntityId& id) {
    return std::string(to_string(id.kind)) + ":" + id.key;
}

const char* dot_shape(EntityKind kind) {
    switch (kind) {
        case EntityKind::Process: return "box";
        case EntityKind::File: return "ellipse";
        case EntityKind::Socket: return "diamond";
    }
    return "ellipse";
}

}  // namespace

std::vector<EdgeAnnotation> ccg_annotations(const Investigation& inv, double t_threshold) {
    // tree node (hence score) per compacted edge index
    std::unordered_map<size_t, int> node_of_edge;
    for (size_t n = 0; n < inv.tree.nodes.size(); ++n) {
        node_of_edge[inv.tree.nodes[n].edge_index] = static_cast<int>(n);
    }
    std::unordered_map<size_t, std::vector<size_t>> retained_by;
    for (size_t p = 0; p < inv.paths.size(); ++p) {
        if (inv.paths[p].score < t_threshold) continue;
        for (int node : inv.paths[p].node_indices) {
            retained_by[inv.tree.nodes[node].edge_index].push_back(p);
        }
    }

    // map CCG edges back to compacted indices via their first eid
    std::unordered_map<uint64_t, size_t> compacted_by_eid;
    for (size_t i = 0; i < inv.compacted.edges.size(); ++i) {
        compacted_by_eid[inv.compacted.edges[i].eids.front()] = i;
    }

    std::vector<EdgeAnnotation> out(inv.ccg.edges.size());
    for (size_t i = 0; i < inv.ccg.edges.size(); ++i) {
        auto found = compacted_by_eid.find(inv.ccg.edges[i].eids.front());
        if (found == compacted_by_eid.end()) continue;
        size_t edge_idx = found->second;
        if (auto n = node_of_edge.find(edge_idx); n != node_of_edge.end()) {
            out[i].score = inv.node_scores[n->second];
        }
        if (auto r = retained_by.find(edge_idx); r != retained_by.end()) {
            out[i].retained_by = r->second;
        }
    }
    return out;
}

std::string graph_to_text(const SemanticGraph& g, const std::vector<EdgeAnnotation>* annotations) {
    json j;
    j["poi_eid"] = g.poi_eid;
    j["all_paths_filtered"] = g.all_paths_filtered;
    json nodes = json::array();
    for (const EntityId& id : g.nodes) nodes.push_back(entity_json(id));
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (size_t i = 0; i < g.edges.size(); ++i) {
        json e = edge_json(g.edges[i], i == g.poi_index);
        if (annotations != nullptr && i < annotations->size()) {
            const EdgeAnnotation& a = (*annotations)[i];
            if (a.score) e["score"] = *a.score;
            e["retained_by"] = a.retained_by;
        }
        edges.push_back(std::move(e));
    }
    j["edges"] = std::move(edges);
    return j.dump(2) + "\n";
}

std::string graph_to_dot(const SemanticGraph& g) {
    std::string out = "digraph semantic_graph {\n  rankdir=LR;\n";
    for (const EntityId& id : g.nodes) {
        out += "  \"" + dot_escape(dot_node_id(id)) + "\" [shape=" + dot_shape(id.kind) +
               ", label=\"" + dot_escape(id.key) + "\"];\n";
    }
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const GraphEdge& e = g.edges[i];
        std::string label = std::string(to_string(e.op)) + "\\n" + std::to_string(e.bytes) + " B";
        if (e.eids.size() > 1) label += " x" + std::to_string(e.eids.size());
        out += "  \"" + dot_escape(dot_node_id(e.subject)) + "\" -> \"" +
               dot_escape(dot_node_id(e.object)) + "\" [label=\"" + label + "\"";
        if (i == g.poi_index) out += ", color=red, penwidth=2.0";
        out += "];\n";
    }
    out += "}\n";
    return out;
}

std::string paths_to_text(const Investigation& inv, const ScoringParams& params) {
    json j;
    j["c"] = params.c;
    j["t"] = params.t;
    j["path_count"] = inv.paths.size();
    j["relevant_paths"] = inv.stats.relevant_paths;
    json paths = json::array();
    for (size_t p = 0; p < inv.paths.size(); ++p) {
        const FlowPath& path = inv.paths[p];
        json pj;
        pj["index"] = p;
        pj["score"] = path.score;
        pj["verdict"] = path.score < params.t ? "irrelevant" : "relevant";
        json edges = json::array();
        for (int node : path.node_indices) {
            const GraphEdge& e = inv.compacted.edges[inv.tree.nodes[node].edge_index];
            json ej;
            ej["subject"] = entity_json(e.subject);
            ej["object"] = entity_json(e.object);
            ej["op"] = to_string(e.op);
            ej["ti"] = e.ti;
            ej["bytes"] = e.bytes;
            ej["eids"] = e.eids;
            ej["event_score"] = inv.node_scores[node];
            edges.push_back(std::move(ej));
        }
        pj["edges"] = std::move(edges);
        paths.push_back(std::move(pj));
    }
    j["paths"] = std::move(paths);
    return j.dump(2) + "\n";
}

}  // namespace provsift
