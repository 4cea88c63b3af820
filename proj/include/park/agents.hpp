// ============================================================================
// park/agents.hpp — the three-tier agent runtime
// ============================================================================
//
// A1 (node agents) exist permanently, one per G/R/P vertex, and emit a
// presence message for every observation; at a gateway they also request a
// follower for an untracked car.  A2 (followers) live for one visit: they
// accumulate the car's path and, at the exit gate, hand a visit summary to
// A3 and destroy themselves.  A3 (the decision agent) owns the specification
// store: it reconciles contradictions, answers preference queries from the
// open branches of a truth tree, and learns from completed visits.
//
// The Dispatcher delivers messages sequentially and deterministically in
// (timestamp, node label, object id, kind, sequence) order.  The kind order
// puts SpawnFollower before Presence so a follower exists by the time its
// own entry observation arrives.  Agent state is owned by the dispatcher and
// never shared.
//
// ============================================================================

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "park/knowledge.hpp"
#include "park/tableau.hpp"
#include "park/world_graph.hpp"

namespace park {

// ── Messages ────────────────────────────────────────────────────────────────

struct SpawnFollower {
    std::string user_id;
    std::string gate;
};
struct Presence {
    EventRecord event;
};
struct AskPreference {
    std::string user_id;
    std::string gate;
};
struct PreferenceReply {
    std::string user_id;
    std::optional<std::string> suggestion;
};
struct VisitDone {
    VisitSummary summary;
};
struct DestroyFollower {
    std::string follower_id;
};

// The variant order is the dispatch order for equal (timestamp, node, object).
using MessageBody = std::variant<SpawnFollower, Presence, AskPreference,
                                 PreferenceReply, VisitDone, DestroyFollower>;

/// Every message carries the logical timestamp of the event that caused it.
struct Message {
    Timestamp at;
    MessageBody body;
};

inline std::size_t message_kind_rank(const MessageBody& m) {
    return m.index();
}

// ── Agent state ─────────────────────────────────────────────────────────────

struct A1State {
    std::string node;
    NodeKind kind;
};

struct A2State {
    std::string follower_id;
    std::string user_id;
    std::vector<EventRecord> path;
    bool active = true;
};

struct A3State {
    SpecStore store;
    std::set<std::string> gates;
};

// ── A1: node sensing ────────────────────────────────────────────────────────

/// Presence for every observation; at a gateway with no live follower for
/// the object, also a SpawnFollower request.
inline std::vector<Message> a1_sense(const A1State& a,
                                     const std::string& object_id,
                                     Timestamp at, bool follower_exists) {
    std::vector<Message> out;
    out.push_back(Message{at, Presence{EventRecord{object_id, a.node, at}}});
    if (a.kind == NodeKind::Gateway && !follower_exists)
        out.push_back(Message{at, SpawnFollower{object_id, a.node}});
    return out;
}

// ── A2: following one visit ─────────────────────────────────────────────────

inline A2State a2_on_presence(A2State a, const EventRecord& e) {
    if (!a.active) throw error("follower '" + a.follower_id + "' is retired");
    if (e.object_id != a.user_id)
        throw error("follower '" + a.follower_id + "' got an event for '" +
                    e.object_id + "'");
    if (!a.path.empty() && e.at < a.path.back().at)
        throw error("out-of-order event at '" + e.node + "' (" +
                    e.at.to_string() + " before " +
                    a.path.back().at.to_string() + ")");
    a.path.push_back(e);
    return a;
}

struct A2ExitResult {
    Message visit_done;
    A2State retired;
};

/// Assembles the visit summary at the exit gate and retires the follower.
/// parkedSpace is the last P node of the path, absent for a drive-through.
inline A2ExitResult a2_on_exit(A2State a, const EventRecord& exit_event,
                               const ILAGraph& world) {
    if (!a.active) throw error("follower '" + a.follower_id + "' is retired");
    if (a.path.empty())
        throw error("follower '" + a.follower_id + "' has no entry event");
    if (kind_of(world, exit_event.node) != NodeKind::Gateway)
        throw error("visit cannot end at non-gate '" + exit_event.node + "'");
    a = a2_on_presence(std::move(a), exit_event);

    VisitSummary summary;
    summary.user_id = a.user_id;
    summary.entry_gate = a.path.front().node;
    summary.exit_gate = exit_event.node;
    summary.path = a.path;
    for (const EventRecord& e : a.path)
        if (kind_of(world, e.node) == NodeKind::Space)
            summary.parked_space = e.node;

    a.active = false;
    return A2ExitResult{Message{exit_event.at, VisitDone{std::move(summary)}},
                        std::move(a)};
}

// ── A3: preference decisions ────────────────────────────────────────────────

struct A3AskResult {
    A3State state;
    Message reply;
    std::vector<Formula> removed;
    /// Candidate spaces from the open branches, ordered by r desc, label asc.
    std::vector<std::pair<std::string, std::int64_t>> candidates;
};

/// Answers a preference query: reconcile first, then build
/// gate & (disjunction of the learned implications), take the fulfilled
/// space of every open branch, rank by r, and suggest the first free one.
inline A3AskResult a3_on_ask(A3State a, const std::string& user,
                             const std::string& gate,
                             const std::set<std::string>& free, Timestamp at,
                             std::optional<int> depth_bound = std::nullopt) {
    if (!a.gates.count(gate))
        throw error("'" + gate + "' is not a gate known to the decision agent");

    ReconcileResult rec = reconcile(a.store, user, gate, depth_bound);
    a.store = std::move(rec.store);

    A3AskResult result{std::move(a), Message{at, PreferenceReply{user, {}}},
                       std::move(rec.removed), {}};

    std::vector<SpecEntry> entries = entries_for(result.state.store, user, gate);
    if (entries.empty()) return result;

    std::map<std::string, std::int64_t> space_rank;
    Formula disjunction = entries.front().formula;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        space_rank.emplace(*detail::implied_space(entries[i].formula, gate),
                           entries[i].count);
        if (i > 0) disjunction = make_or(disjunction, entries[i].formula);
    }
    Formula query = make_and(make_atom(gate), disjunction);

    int bound = depth_bound ? *depth_bound : default_depth_bound(query);
    TableauResult tableau = decide(query, bound);

    // The r values order the open branches' targets; they never influenced
    // the verdict above.
    for (const Branch& b : tableau.open_branches)
        for (const std::string& atom : b.fulfilled)
            if (auto it = space_rank.find(atom); it != space_rank.end()) {
                bool known = false;
                for (const auto& c : result.candidates)
                    if (c.first == atom) known = true;
                if (!known) result.candidates.emplace_back(atom, it->second);
            }
    std::sort(result.candidates.begin(), result.candidates.end(),
              [](const auto& x, const auto& y) {
                  if (x.second != y.second) return x.second > y.second;
                  return x.first < y.first;
              });

    for (const auto& [space, r] : result.candidates)
        if (free.count(space)) {
            result.reply = Message{at, PreferenceReply{user, space}};
            break;
        }
    return result;
}

inline A3State a3_on_visit(A3State a, const VisitSummary& v,
                           const std::set<std::string>& all_gates) {
    a.store = record_visit(a.store, v, all_gates);
    return a;
}

// ── Dispatcher ──────────────────────────────────────────────────────────────

/// One answered preference query, with everything the decision log needs.
struct AskTrace {
    Timestamp at;
    std::string user_id;
    std::string gate;
    std::optional<std::string> suggestion;
    std::vector<Formula> removed;
    std::vector<std::pair<std::string, std::int64_t>> candidates;
};

class Dispatcher {
public:
    Dispatcher(ILAGraph world, A3State a3,
               std::optional<int> depth_bound = std::nullopt)
        : world_(std::move(world)), a3_(std::move(a3)), depth_(depth_bound) {
        for (const auto& [label, decl] : world_.base.vertices)
            if (decl.kind != NodeKind::Car)
                a1_.emplace(label, A1State{label, decl.kind});
    }

    /// Feed one observation to the node's A1 agent.
    void sense(const std::string& object_id, const std::string& node,
               Timestamp at) {
        auto it = a1_.find(node);
        if (it == a1_.end()) throw error("unknown node '" + node + "'");
        bool follower = followers_.count(object_id) != 0;
        for (Message& m : a1_sense(it->second, object_id, at, follower))
            post(std::move(m), node, object_id);
    }

    /// Deliver queued messages until quiescence.
    void run() {
        while (!queue_.empty()) {
            auto first = queue_.begin();
            Message msg = first->message;
            queue_.erase(first);
            delivered_.push_back(msg);
            std::visit([&](const auto& body) { handle(msg.at, body); },
                       msg.body);
        }
    }

    const ILAGraph& world() const { return world_; }
    const A3State& a3() const { return a3_; }
    const std::vector<Message>& delivered() const { return delivered_; }
    const std::vector<AskTrace>& ask_traces() const { return ask_traces_; }
    std::size_t active_followers() const { return followers_.size(); }
    std::size_t cars_entered() const { return cars_entered_; }
    std::size_t cars_exited() const { return cars_exited_; }

private:
    struct Queued {
        Timestamp at;
        std::string node;
        std::string object_id;
        std::size_t kind;
        std::uint64_t seq;
        Message message;

        bool operator<(const Queued& o) const {
            return std::tie(at, node, object_id, kind, seq) <
                   std::tie(o.at, o.node, o.object_id, o.kind, o.seq);
        }
    };

    void post(Message m, const std::string& node, const std::string& object) {
        queue_.insert(Queued{m.at, node, object, message_kind_rank(m.body),
                             seq_++, std::move(m)});
    }

    void handle(Timestamp at, const SpawnFollower& m) {
        if (followers_.count(m.user_id)) return;  // already tracked
        std::string id =
            "A2-" + m.user_id + "-" + std::to_string(++spawned_[m.user_id]);
        followers_.emplace(m.user_id, A2State{id, m.user_id, {}, true});
        post(Message{at, AskPreference{m.user_id, m.gate}}, m.gate, m.user_id);
    }

    void handle(Timestamp at, const Presence& m) {
        const EventRecord& e = m.event;
        NodeKind kind = kind_of(world_, e.node);
        auto follower = followers_.find(e.object_id);
        if (follower == followers_.end()) {
            // Untracked car somewhere inside: nothing to follow yet.  A1
            // only spawns followers at gateways.
            return;
        }
        A2State& a2 = follower->second;
        if (kind == NodeKind::Gateway && !a2.path.empty()) {
            // Second gate observation of this visit: the car leaves.
            world_ = move_car(world_, e.object_id, e.node);
            A2ExitResult exit = a2_on_exit(std::move(a2), e, world_);
            world_ = remove_car(world_, e.object_id);
            ++cars_exited_;
            std::string follower_id = exit.retired.follower_id;
            followers_.erase(follower);
            post(std::move(exit.visit_done), e.node, e.object_id);
            post(Message{at, DestroyFollower{follower_id}}, e.node, e.object_id);
            return;
        }
        if (a2.path.empty()) {
            // Entry observation: the car materializes at the gate.
            world_ = add_car(world_, e.object_id, e.node);
            ++cars_entered_;
        } else {
            world_ = move_car(world_, e.object_id, e.node);
        }
        a2 = a2_on_presence(std::move(a2), e);
    }

    void handle(Timestamp at, const AskPreference& m) {
        A3AskResult result =
            a3_on_ask(std::move(a3_), m.user_id, m.gate, free_spaces(world_),
                      at, depth_);
        a3_ = std::move(result.state);
        const auto& reply = std::get<PreferenceReply>(result.reply.body);
        ask_traces_.push_back(AskTrace{at, m.user_id, m.gate, reply.suggestion,
                                       std::move(result.removed),
                                       std::move(result.candidates)});
        post(std::move(result.reply), m.gate, m.user_id);
    }

    void handle(Timestamp, const PreferenceReply&) {
        // Suggestion delivery is the reply message plus the log entry the
        // simulator writes; there is no actuation.
    }

    void handle(Timestamp, const VisitDone& m) {
        std::set<std::string> gates = a3_.gates;
        a3_ = a3_on_visit(std::move(a3_), m.summary, gates);
    }

    void handle(Timestamp, const DestroyFollower&) {}  // bookkeeping only

    ILAGraph world_;
    A3State a3_;
    std::optional<int> depth_;
    std::map<std::string, A1State> a1_;
    std::map<std::string, A2State> followers_;
    std::map<std::string, int> spawned_;
    std::multiset<Queued> queue_;
    std::uint64_t seq_ = 0;
    std::vector<Message> delivered_;
    std::vector<AskTrace> ask_traces_;
    std::size_t cars_entered_ = 0;
    std::size_t cars_exited_ = 0;
};

}  // namespace park
