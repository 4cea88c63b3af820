// ============================================================================
// park/world_graph.hpp — labelled/attributed digraph world model
// ============================================================================
//
// An LAGraph declares vertices, edges, and their attribute names; an
// ILAGraph additionally assigns values to the declared attributes.  Labels
// are injective, so vertices and edges are identified with their labels
// throughout (edge label = "from->to").
//
// The parking specialization uses four vertex kinds — gateways (G), road
// segments (R), parking spaces (P) and cars (C) — and one attribute:
// Boolean `free` on every P vertex.  A car's position is its single
// outgoing edge.  All operations are pure: the input graph is untouched and
// a new graph is returned.
//
// ============================================================================

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "park/formula.hpp"  // park::error

namespace park {

enum class NodeKind : char {
    Gateway = 'G',
    Road = 'R',
    Space = 'P',
    Car = 'C',
};

inline char node_kind_char(NodeKind k) { return static_cast<char>(k); }

using AttrValue = std::variant<bool, std::int64_t, std::string>;

struct VertexDecl {
    NodeKind kind;
    std::set<std::string> attributes;

    bool operator==(const VertexDecl& o) const = default;
};

struct LAGraph {
    std::map<std::string, VertexDecl> vertices;
    std::set<std::pair<std::string, std::string>> edges;
    std::map<std::pair<std::string, std::string>, std::set<std::string>>
        edge_attributes;

    bool operator==(const LAGraph& o) const = default;
};

struct ILAGraph {
    LAGraph base;
    // (vertex label, attribute name) -> value
    std::map<std::pair<std::string, std::string>, AttrValue> vertex_values;
    // (from, to, attribute name) -> value
    std::map<std::tuple<std::string, std::string, std::string>, AttrValue>
        edge_values;

    bool operator==(const ILAGraph& o) const = default;
};

inline std::string edge_label(const std::string& from, const std::string& to) {
    return from + "->" + to;
}

// ── Topology files ──────────────────────────────────────────────────────────
//
// One record per line:
//   node <G|R|P> <label>
//   edge <fromLabel> <toLabel>
// '#' starts a comment; blank lines are ignored.

struct TopologyNode {
    NodeKind kind;
    std::string label;
};

struct TopologyEdge {
    std::string from;
    std::string to;
};

struct Topology {
    std::vector<TopologyNode> nodes;
    std::vector<TopologyEdge> edges;
};

inline Topology parse_topology(std::istream& in, const std::string& source) {
    Topology topo;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw error(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::string keyword;
        if (!(fields >> keyword)) continue;
        if (keyword == "node") {
            std::string kind_text, label, extra;
            if (!(fields >> kind_text >> label) || (fields >> extra))
                fail("expected 'node <G|R|P> <label>'");
            if (kind_text.size() != 1 ||
                (kind_text != "G" && kind_text != "R" && kind_text != "P"))
                fail("unknown node kind '" + kind_text + "'");
            topo.nodes.push_back(
                TopologyNode{static_cast<NodeKind>(kind_text[0]), label});
        } else if (keyword == "edge") {
            std::string from, to, extra;
            if (!(fields >> from >> to) || (fields >> extra))
                fail("expected 'edge <from> <to>'");
            topo.edges.push_back(TopologyEdge{from, to});
        } else {
            fail("unknown record '" + keyword + "'");
        }
    }
    return topo;
}

// ── Parking world ───────────────────────────────────────────────────────────

/// Builds the instantiated parking graph: declared vertices and edges, with
/// every P vertex carrying Boolean `free` initialized to true.
inline ILAGraph build_parking(const Topology& topo) {
    ILAGraph g;
    for (const TopologyNode& n : topo.nodes) {
        VertexDecl decl{n.kind, {}};
        if (n.kind == NodeKind::Space) decl.attributes.insert("free");
        if (!g.base.vertices.emplace(n.label, std::move(decl)).second)
            throw error("duplicate label '" + n.label + "'");
        if (n.kind == NodeKind::Space)
            g.vertex_values[{n.label, "free"}] = true;
    }
    for (const TopologyEdge& e : topo.edges) {
        if (!g.base.vertices.count(e.from))
            throw error("edge references unknown label '" + e.from + "'");
        if (!g.base.vertices.count(e.to))
            throw error("edge references unknown label '" + e.to + "'");
        g.base.edges.insert({e.from, e.to});
    }
    return g;
}

inline bool has_vertex(const ILAGraph& g, const std::string& label) {
    return g.base.vertices.count(label) != 0;
}

inline NodeKind kind_of(const ILAGraph& g, const std::string& label) {
    auto it = g.base.vertices.find(label);
    if (it == g.base.vertices.end())
        throw error("unknown label '" + label + "'");
    return it->second.kind;
}

namespace detail {
inline void set_space_free(ILAGraph& g, const std::string& space, bool free) {
    g.vertex_values[{space, "free"}] = free;
}

inline bool space_free(const ILAGraph& g, const std::string& space) {
    return std::get<bool>(g.vertex_values.at({space, "free"}));
}

/// The target of the car's single outgoing edge.
inline std::string car_target(const ILAGraph& g, const std::string& car) {
    for (const auto& [from, to] : g.base.edges)
        if (from == car) return to;
    throw error("car '" + car + "' has no position edge");
}
}  // namespace detail

/// Current node of a tracked car.
inline std::string car_position(const ILAGraph& g, const std::string& car) {
    if (!has_vertex(g, car) || kind_of(g, car) != NodeKind::Car)
        throw error("unknown car '" + car + "'");
    return detail::car_target(g, car);
}

/// A car appears at a gateway: new C vertex linked to the gate.
inline ILAGraph add_car(const ILAGraph& g, const std::string& car_id,
                        const std::string& gate_label) {
    auto gate = g.base.vertices.find(gate_label);
    if (gate == g.base.vertices.end() ||
        gate->second.kind != NodeKind::Gateway)
        throw error("'" + gate_label + "' is not a gateway");
    if (has_vertex(g, car_id))
        throw error("label '" + car_id + "' already present");
    ILAGraph out = g;
    out.base.vertices.emplace(car_id, VertexDecl{NodeKind::Car, {}});
    out.base.edges.insert({car_id, gate_label});
    return out;
}

/// Re-targets the car's position edge; keeps `free` of the spaces involved
/// consistent.  Moving onto a space occupied by another car is an error.
inline ILAGraph move_car(const ILAGraph& g, const std::string& car_id,
                         const std::string& node_label) {
    std::string old_pos = car_position(g, car_id);  // validates the car
    NodeKind target_kind = kind_of(g, node_label);
    if (target_kind == NodeKind::Car)
        throw error("'" + node_label + "' is not a G/R/P vertex");
    if (target_kind == NodeKind::Space && node_label != old_pos &&
        !detail::space_free(g, node_label))
        throw error("space '" + node_label + "' is already occupied");
    ILAGraph out = g;
    out.base.edges.erase({car_id, old_pos});
    if (kind_of(out, old_pos) == NodeKind::Space)
        detail::set_space_free(out, old_pos, true);
    out.base.edges.insert({car_id, node_label});
    if (target_kind == NodeKind::Space)
        detail::set_space_free(out, node_label, false);
    return out;
}

/// The car leaves the park: C vertex and its edge removed, any occupied
/// space freed.
inline ILAGraph remove_car(const ILAGraph& g, const std::string& car_id) {
    std::string pos = car_position(g, car_id);  // validates the car
    ILAGraph out = g;
    out.base.edges.erase({car_id, pos});
    out.base.vertices.erase(car_id);
    if (kind_of(out, pos) == NodeKind::Space)
        detail::set_space_free(out, pos, true);
    return out;
}

/// Labels of P vertices with free = true.
inline std::set<std::string> free_spaces(const ILAGraph& g) {
    std::set<std::string> out;
    for (const auto& [label, decl] : g.base.vertices)
        if (decl.kind == NodeKind::Space && detail::space_free(g, label))
            out.insert(label);
    return out;
}

/// All gateway labels.
inline std::set<std::string> gate_labels(const ILAGraph& g) {
    std::set<std::string> out;
    for (const auto& [label, decl] : g.base.vertices)
        if (decl.kind == NodeKind::Gateway) out.insert(label);
    return out;
}

}  // namespace park
