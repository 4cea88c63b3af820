// ============================================================================
// park/knowledge.hpp — presence events, the per-user specification store,
// learning from completed visits, and contradiction reconciliation
// ============================================================================
//
// The store S is a set of triples <id, formula, r>: user id, temporal
// formula, and the number of times the formula was produced by observed
// behaviour.  There is at most one entry per (id, nnf(formula)); duplicates
// merge by summing r.  r never influences satisfiability checks — it only
// ranks candidates when a preference decision chooses between open branches.
//
// Learning rule per completed visit:
//   (1) a parked visit upserts  <user, entryGate -> F parkedSpace, r+1>;
//   (2) every gate the user has never appeared at gets <user, G ~gate, r+1>;
//   (3) G ~gate entries are dropped for gates the user has now used.
//
// Gate usage is tracked in a runtime tally.  The persistence format carries
// entries only, so after a load the tally is reconstructed from the entries
// themselves: for a user with recorded history, exactly the gates without a
// G ~gate entry have been used — recordVisit and reconcile maintain that
// correspondence.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "park/formula.hpp"
#include "park/tableau.hpp"

namespace park {

// ── Timestamps ──────────────────────────────────────────────────────────────

/// Calendar instant with second resolution, text form tYYYY.MM.DD.hh.mm.ss.
struct Timestamp {
    int year = 0;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;

    auto operator<=>(const Timestamp&) const = default;

    std::string to_string() const {
        char buf[24];
        std::snprintf(buf, sizeof buf, "t%04d.%02d.%02d.%02d.%02d.%02d", year,
                      month, day, hour, minute, second);
        return buf;
    }
};

inline Timestamp parse_timestamp(std::string_view text) {
    auto fail = [&]() -> void {
        throw error("malformed timestamp '" + std::string(text) +
                    "' (expected tYYYY.MM.DD.hh.mm.ss)");
    };
    if (text.size() != 20 || text[0] != 't') fail();
    for (std::size_t i = 1; i < text.size(); ++i) {
        bool dot = i == 5 || i == 8 || i == 11 || i == 14 || i == 17;
        if (dot && text[i] != '.') fail();
        if (!dot && !std::isdigit(static_cast<unsigned char>(text[i]))) fail();
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i)
            v = v * 10 + (text[i] - '0');
        return v;
    };
    Timestamp t{num(1, 4), num(6, 2), num(9, 2), num(12, 2), num(15, 2),
                num(18, 2)};
    if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 ||
        t.hour > 23 || t.minute > 59 || t.second > 59)
        fail();
    return t;
}

// ── Events and visits ───────────────────────────────────────────────────────

/// A presence observation <objectId, node, timestamp>.
struct EventRecord {
    std::string object_id;
    std::string node;
    Timestamp at;

    bool operator==(const EventRecord&) const = default;
};

/// What a follower hands to the decision agent when a visit completes.
struct VisitSummary {
    std::string user_id;
    std::string entry_gate;
    std::optional<std::string> parked_space;
    std::string exit_gate;
    std::vector<EventRecord> path;
};

// ── Specification store ─────────────────────────────────────────────────────

struct SpecEntry {
    std::string id;
    Formula formula;
    std::int64_t count;  // r > 0

    bool operator==(const SpecEntry&) const = default;
};

class SpecStore {
public:
    /// Entries in deterministic order: by id, then canonical formula text.
    std::vector<SpecEntry> entries() const {
        std::vector<SpecEntry> out;
        out.reserve(entries_.size());
        for (const auto& [key, e] : entries_) out.push_back(e);
        return out;
    }

    std::vector<SpecEntry> entries_for_user(const std::string& id) const {
        std::vector<SpecEntry> out;
        for (const auto& [key, e] : entries_)
            if (key.first == id) out.push_back(e);
        return out;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    std::optional<SpecEntry> find(const std::string& id,
                                  const Formula& f) const {
        auto it = entries_.find(key_of(id, f));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    /// Insert or merge (summing r) under the (id, nnf(formula)) key.
    void upsert(const std::string& id, const Formula& f, std::int64_t r) {
        if (r <= 0) throw error("entry count must be positive");
        auto [it, inserted] = entries_.emplace(key_of(id, f), SpecEntry{id, f, r});
        if (!inserted) it->second.count += r;
    }

    void erase(const std::string& id, const Formula& f) {
        entries_.erase(key_of(id, f));
    }

    const std::set<std::string>& used_gates(const std::string& id) const {
        static const std::set<std::string> none;
        auto it = used_gates_.find(id);
        return it == used_gates_.end() ? none : it->second;
    }

    void mark_gate_used(const std::string& id, const std::string& gate) {
        used_gates_[id].insert(gate);
    }

    bool operator==(const SpecStore& o) const { return entries_ == o.entries_; }

private:
    static std::pair<std::string, std::string> key_of(const std::string& id,
                                                      const Formula& f) {
        return {id, render(nnf(f))};
    }

    std::map<std::pair<std::string, std::string>, SpecEntry> entries_;
    std::map<std::string, std::set<std::string>> used_gates_;  // runtime only
};

namespace detail {

inline Formula never_gate(const std::string& gate) {
    return make_always(make_not(make_atom(gate)));
}

/// Does the formula have the shape  G ~gate  for the given gate?
inline bool is_never_gate(const Formula& f, const std::string& gate) {
    return f.kind() == FormulaKind::Always &&
           f.child().kind() == FormulaKind::Not &&
           f.child().child().kind() == FormulaKind::Atom &&
           f.child().child().atom_name() == gate;
}

/// If the formula has the shape  gate -> F space, returns the space.
inline std::optional<std::string> implied_space(const Formula& f,
                                                const std::string& gate) {
    if (f.kind() != FormulaKind::Implies) return std::nullopt;
    if (f.left().kind() != FormulaKind::Atom || f.left().atom_name() != gate)
        return std::nullopt;
    if (f.right().kind() != FormulaKind::Eventually ||
        f.right().child().kind() != FormulaKind::Atom)
        return std::nullopt;
    return f.right().child().atom_name();
}

/// Gates a user demonstrably used: the runtime tally plus, for users with
/// recorded history, every gate lacking a G ~gate entry.
inline std::set<std::string> gates_used(const SpecStore& s,
                                        const std::string& user,
                                        const std::set<std::string>& all_gates) {
    std::set<std::string> used = s.used_gates(user);
    auto history = s.entries_for_user(user);
    if (!history.empty()) {
        for (const std::string& g : all_gates) {
            bool never = std::any_of(
                history.begin(), history.end(),
                [&g](const SpecEntry& e) { return is_never_gate(e.formula, g); });
            if (!never) used.insert(g);
        }
    }
    return used;
}

}  // namespace detail

// ── Operations ──────────────────────────────────────────────────────────────

inline void validate_visit(const VisitSummary& v,
                           const std::set<std::string>& all_gates) {
    if (v.path.empty()) throw error("malformed visit: empty path");
    if (v.path.front().node != v.entry_gate)
        throw error("malformed visit: path does not start at the entry gate");
    if (v.path.back().node != v.exit_gate)
        throw error("malformed visit: path does not end at the exit gate");
    if (!all_gates.count(v.entry_gate))
        throw error("malformed visit: unknown entry gate '" + v.entry_gate + "'");
    if (!all_gates.count(v.exit_gate))
        throw error("malformed visit: unknown exit gate '" + v.exit_gate + "'");
}

/// Learn from one completed visit (rules (1)-(3) above).
inline SpecStore record_visit(const SpecStore& s, const VisitSummary& v,
                              const std::set<std::string>& all_gates) {
    validate_visit(v, all_gates);
    std::set<std::string> used = detail::gates_used(s, v.user_id, all_gates);
    used.insert(v.entry_gate);
    used.insert(v.exit_gate);

    SpecStore out = s;
    out.mark_gate_used(v.user_id, v.entry_gate);
    out.mark_gate_used(v.user_id, v.exit_gate);

    if (v.parked_space)
        out.upsert(v.user_id,
                   make_implies(make_atom(v.entry_gate),
                                make_eventually(make_atom(*v.parked_space))),
                   1);
    for (const std::string& gate : all_gates) {
        if (used.count(gate))
            out.erase(v.user_id, detail::never_gate(gate));
        else
            out.upsert(v.user_id, detail::never_gate(gate), 1);
    }
    return out;
}

struct ReconcileResult {
    SpecStore store;
    std::vector<Formula> removed;
};

/// The user appeared at `gate`: drop every entry of theirs whose formula
/// contradicts that observation (closed tableau for  f & gate).
inline ReconcileResult reconcile(const SpecStore& s, const std::string& user,
                                 const std::string& gate,
                                 std::optional<int> depth_bound = std::nullopt) {
    ReconcileResult result{s, {}};
    result.store.mark_gate_used(user, gate);
    for (const SpecEntry& e : s.entries_for_user(user)) {
        Formula probe = make_and(e.formula, make_atom(gate));
        int bound = depth_bound ? *depth_bound : default_depth_bound(probe);
        if (decide(probe, bound).verdict == Verdict::Unsat) {
            result.store.erase(e.id, e.formula);
            result.removed.push_back(e.formula);
        }
    }
    return result;
}

/// Entries of `user` shaped  gate -> F space, ordered by r descending, ties
/// by space label ascending.
inline std::vector<SpecEntry> entries_for(const SpecStore& s,
                                          const std::string& user,
                                          const std::string& gate) {
    std::vector<std::pair<std::string, SpecEntry>> keyed;  // (space, entry)
    for (const SpecEntry& e : s.entries_for_user(user))
        if (auto space = detail::implied_space(e.formula, gate))
            keyed.emplace_back(*space, e);
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) {
                  if (a.second.count != b.second.count)
                      return a.second.count > b.second.count;
                  return a.first < b.first;
              });
    std::vector<SpecEntry> out;
    out.reserve(keyed.size());
    for (auto& [space, e] : keyed) out.push_back(std::move(e));
    return out;
}

// ── Persistence ─────────────────────────────────────────────────────────────
//
// Line-oriented text, one record per line:  id<TAB>formula-text<TAB>r

inline void save_store(const SpecStore& s, std::ostream& out) {
    for (const SpecEntry& e : s.entries())
        out << e.id << '\t' << render(e.formula) << '\t' << e.count << '\n';
}

inline std::string save_store_text(const SpecStore& s) {
    std::ostringstream out;
    save_store(s, out);
    return out.str();
}

inline SpecStore load_store(std::istream& in, const std::string& source) {
    SpecStore s;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw error(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos ||
            line.find('\t', t2 + 1) != std::string::npos)
            fail("expected 'id<TAB>formula<TAB>r'");
        std::string id = line.substr(0, t1);
        std::string formula_text = line.substr(t1 + 1, t2 - t1 - 1);
        std::string count_text = line.substr(t2 + 1);
        if (id.empty()) fail("empty id");
        Formula f = [&] {
            try {
                return parse(formula_text);
            } catch (const parse_error& e) {
                fail(std::string("bad formula: ") + e.what());
                throw;  // unreachable
            }
        }();
        std::int64_t r = 0;
        try {
            std::size_t used = 0;
            r = std::stoll(count_text, &used);
            if (used != count_text.size()) throw std::invalid_argument(count_text);
        } catch (const std::exception&) {
            fail("bad count '" + count_text + "'");
        }
        if (r <= 0) fail("count must be positive, got " + count_text);
        s.upsert(id, f, r);
    }
    return s;
}

inline SpecStore load_store_text(const std::string& text,
                                 const std::string& source = "<store>") {
    std::istringstream in(text);
    return load_store(in, source);
}

}  // namespace park
