// ============================================================================
// park/simulation.hpp — trace-driven simulation and persistence wiring
// ============================================================================

#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "park/agents.hpp"
#include "park/knowledge.hpp"
#include "park/world_graph.hpp"

namespace park {

// ── Traces ──────────────────────────────────────────────────────────────────
//
// One record per line:  <tYYYY.MM.DD.hh.mm.ss> <objectId> <node>
// '#' starts a comment; blank lines are ignored.  Records need not be
// sorted; the simulator sorts them into dispatcher order.

struct TraceRecord {
    Timestamp at;
    std::string object_id;
    std::string node;
    int line = 0;  // source line, for error reporting
};

inline std::vector<TraceRecord> parse_trace(std::istream& in,
                                            const std::string& source) {
    std::vector<TraceRecord> records;
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
        std::string ts, object_id, node, extra;
        if (!(fields >> ts)) continue;
        if (!(fields >> object_id >> node) || (fields >> extra))
            fail("expected '<timestamp> <objectId> <node>'");
        TraceRecord rec;
        try {
            rec.at = parse_timestamp(ts);
        } catch (const error& e) {
            fail(e.what());
        }
        rec.object_id = object_id;
        rec.node = node;
        rec.line = lineno;
        records.push_back(std::move(rec));
    }
    return records;
}

// ── Decision log ────────────────────────────────────────────────────────────

struct DecisionLogEntry {
    Timestamp at;
    std::string user_id;
    std::string gate;
    std::optional<std::string> suggestion;
    std::vector<std::string> removed_formulas;
    std::vector<std::pair<std::string, std::int64_t>> candidates;
};

/// Tab-separated fields in declaration order; empty lists and a missing
/// suggestion print as '-'.
inline std::string format_log_line(const DecisionLogEntry& e) {
    std::ostringstream out;
    out << e.at.to_string() << '\t' << e.user_id << '\t' << e.gate << '\t'
        << (e.suggestion ? *e.suggestion : "-") << '\t';
    if (e.removed_formulas.empty()) {
        out << '-';
    } else {
        for (std::size_t i = 0; i < e.removed_formulas.size(); ++i)
            out << (i ? "," : "") << e.removed_formulas[i];
    }
    out << '\t';
    if (e.candidates.empty()) {
        out << '-';
    } else {
        for (std::size_t i = 0; i < e.candidates.size(); ++i)
            out << (i ? "," : "") << e.candidates[i].first << ':'
                << e.candidates[i].second;
    }
    return out.str();
}

// ── Simulation ──────────────────────────────────────────────────────────────

struct SimulationResult {
    ILAGraph world;
    A3State a3;
    std::vector<DecisionLogEntry> log;
    std::vector<Message> messages;
    std::size_t cars_entered = 0;
    std::size_t cars_exited = 0;
    std::size_t cars_present = 0;
};

/// Replays the trace through the agent runtime: every record goes to the A1
/// agent of its node, and the dispatcher runs to quiescence per record.
inline SimulationResult simulate(const Topology& topology,
                                 std::vector<TraceRecord> trace,
                                 SpecStore initial_store,
                                 std::optional<int> depth_bound = std::nullopt,
                                 const std::string& trace_source = "<trace>") {
    ILAGraph world = build_parking(topology);
    for (const TraceRecord& r : trace)
        if (!has_vertex(world, r.node))
            throw error(trace_source + ":" + std::to_string(r.line) +
                        ": unknown node '" + r.node + "'");

    std::sort(trace.begin(), trace.end(),
              [](const TraceRecord& a, const TraceRecord& b) {
                  return std::tie(a.at, a.node, a.object_id) <
                         std::tie(b.at, b.node, b.object_id);
              });

    std::set<std::string> gates = gate_labels(world);
    Dispatcher dispatcher(std::move(world),
                          A3State{std::move(initial_store), std::move(gates)},
                          depth_bound);
    for (const TraceRecord& r : trace) {
        dispatcher.sense(r.object_id, r.node, r.at);
        dispatcher.run();
    }

    SimulationResult result{dispatcher.world(),
                            dispatcher.a3(),
                            {},
                            dispatcher.delivered(),
                            dispatcher.cars_entered(),
                            dispatcher.cars_exited(),
                            dispatcher.active_followers()};
    for (const AskTrace& t : dispatcher.ask_traces()) {
        DecisionLogEntry e{t.at, t.user_id, t.gate, t.suggestion, {}, t.candidates};
        for (const Formula& f : t.removed)
            e.removed_formulas.push_back(render(f));
        result.log.push_back(std::move(e));
    }
    return result;
}

// ── File wiring ─────────────────────────────────────────────────────────────

namespace detail {
inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open '" + path + "'");
    return in;
}
}  // namespace detail

struct RunPaths {
    std::string topology;
    std::string trace;
    std::optional<std::string> store_in;
    std::string store_out;
    std::string log_out;
};

/// File-level front end: parse inputs, simulate, write the decision log and
/// the final store.  Identical inputs produce byte-identical outputs.
inline SimulationResult run_simulation(const RunPaths& paths,
                                       std::optional<int> depth_bound =
                                           std::nullopt) {
    auto topo_in = detail::open_input(paths.topology);
    Topology topology = parse_topology(topo_in, paths.topology);

    auto trace_in = detail::open_input(paths.trace);
    std::vector<TraceRecord> trace = parse_trace(trace_in, paths.trace);

    SpecStore store;
    if (paths.store_in) {
        auto store_in = detail::open_input(*paths.store_in);
        store = load_store(store_in, *paths.store_in);
    }

    SimulationResult result =
        simulate(topology, std::move(trace), std::move(store), depth_bound,
                 paths.trace);

    std::ofstream log_out(paths.log_out);
    if (!log_out) throw error("cannot write '" + paths.log_out + "'");
    for (const DecisionLogEntry& e : result.log)
        log_out << format_log_line(e) << '\n';

    std::ofstream store_out(paths.store_out);
    if (!store_out) throw error("cannot write '" + paths.store_out + "'");
    save_store(result.a3.store, store_out);

    return result;
}

}  // namespace park
