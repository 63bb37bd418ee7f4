#include "aec/hypothesis.hpp"

#include <algorithm>
#include <tuple>

namespace aec {

std::set<PredicateId> Hypothesis::preconditions() const {
    std::set<PredicateId> out;
    for (const auto& [p, v] : expected) out.insert(p);
    return out;
}

std::string Hypothesis::str() const {
    std::string out = id + ":";
    for (const auto& a : plan) out += " " + a.str();
    out += " |";
    for (const auto& [p, v] : expected) out += " " + literal_str({p, v});
    return out;
}

double score(const Hypothesis& h) {
    return -static_cast<double>(h.plan.size()) - 1e-3 * h.assumption_count;
}

bool score_before(const Hypothesis& a, const Hypothesis& b) {
    return std::tuple(a.plan.size(), a.assumption_count, a.id) <
           std::tuple(b.plan.size(), b.assumption_count, b.id);
}

const Hypothesis* best_hypothesis(const std::vector<Hypothesis>& H) {
    const Hypothesis* best = nullptr;
    for (const auto& h : H)
        if (!best || score_before(h, *best)) best = &h;
    return best;
}

std::vector<Hypothesis> filter_hypotheses(std::vector<Hypothesis> H, const PredicateId& p,
                                          bool v) {
    std::erase_if(H, [&](const Hypothesis& h) {
        auto it = h.expected.find(p);
        return it != h.expected.end() && it->second != v;
    });
    return H;
}

std::set<PredicateId> unresolved_set(const GroundedStore& grounded, const BeliefStore& beliefs,
                                     const Hypothesis& h) {
    std::set<PredicateId> out;
    for (const auto& [p, v] : h.expected)
        if (!grounded.contains(p) && !beliefs.contains(p)) out.insert(p);
    return out;
}

std::set<PredicateId> union_unresolved(const EpistemicState& state) {
    std::set<PredicateId> out;
    for (const auto& h : state.hypotheses) {
        auto u = unresolved_set(state.grounded, state.beliefs, h);
        out.insert(u.begin(), u.end());
    }
    return out;
}

namespace {

using State = std::set<PredicateId>;

bool lit_holds(const State& s, const Literal& lit) {
    return (s.count(lit.first) != 0) == lit.second;
}

bool goal_holds(const State& s, const GoalConstraints& goal) {
    for (const auto& lit : goal.required)
        if (!lit_holds(s, lit)) return false;
    return true;
}

// Greedy best-first forward search under closed-world semantics. Returns the
// action sequence or empty on failure (goal-at-start returns empty too; the
// caller distinguishes via goal_holds).
std::vector<GroundAction> plan_search(const State& start, const GoalConstraints& goal,
                                      const std::vector<GroundAction>& actions,
                                      const std::vector<InstantiatedAction>& insts,
                                      const std::vector<GroundRule>& rules,
                                      const GeneratorConfig& cfg) {
    struct Node {
        State state;
        int parent = -1;
        int action = -1;
        int depth = 0;
    };
    auto unsat = [&](const State& s) {
        int n = 0;
        for (const auto& lit : goal.required)
            if (!lit_holds(s, lit)) ++n;
        return n;
    };
    std::vector<Node> nodes;
    std::set<State> visited;
    std::set<std::tuple<int, int, int>> frontier;  // (heuristic, depth, node idx)
    nodes.push_back(Node{start, -1, -1, 0});
    visited.insert(start);
    frontier.insert({unsat(start), 0, 0});
    int expansions = 0;
    while (!frontier.empty() && expansions < cfg.max_expansions) {
        auto it = frontier.begin();
        auto [h, depth, idx] = *it;
        frontier.erase(it);
        ++expansions;
        if (h == 0) {
            std::vector<GroundAction> plan;
            for (int cur = idx; nodes[cur].parent >= 0; cur = nodes[cur].parent)
                plan.push_back(actions[nodes[cur].action]);
            std::reverse(plan.begin(), plan.end());
            return plan;
        }
        if (depth >= cfg.depth_cap) continue;
        for (size_t ai = 0; ai < actions.size(); ++ai) {
            const auto& inst = insts[ai];
            bool ok = true;
            for (const auto& lit : inst.preconditions)
                if (!lit_holds(nodes[idx].state, lit)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            State next = nodes[idx].state;
            for (const auto& p : inst.add_effects) next.insert(p);
            for (const auto& p : inst.delete_effects) next.erase(p);
            close_state(next, rules);
            if (!visited.insert(next).second) continue;
            nodes.push_back(Node{std::move(next), idx, static_cast<int>(ai), depth + 1});
            frontier.insert({unsat(nodes.back().state), depth + 1,
                             static_cast<int>(nodes.size() - 1)});
        }
    }
    return {};
}

// Explains why an externally-required literal holds in the scenario's initial
// state, pushing the supporting base facts into Pre(h).
void record_external(const PredicateId& p, bool req, const State& s0_base,
                     const ClosureResult& s0_closure, std::map<PredicateId, bool>& pre) {
    auto dt = s0_closure.derived.find(p);
    if (dt != s0_closure.derived.end()) {
        for (const auto& [f, v] : dt->second.base_support) pre.emplace(f, v);
        return;
    }
    (void)s0_base;
    pre.emplace(p, req);
}

}  // namespace

std::vector<Hypothesis> generate_hypotheses(const GroundedStore& initial,
                                            const GoalConstraints& goal,
                                            const DomainSchema& schema,
                                            const std::vector<GroundRule>& rules,
                                            const GeneratorConfig& cfg, int limit) {
    if (limit < 1) throw std::invalid_argument("hypothesis limit must be >= 1");

    auto actions = schema.ground_actions();
    std::vector<InstantiatedAction> insts;
    insts.reserve(actions.size());
    for (const auto& a : actions) insts.push_back(schema.instantiate(a));

    // Backward relevance: keep only actions whose effects can contribute to
    // the goal, directly or through rule premises or the preconditions of
    // other relevant actions. Cuts the branching factor sharply.
    {
        std::set<PredicateId> relevant;
        for (const auto& [p, v] : goal.required) relevant.insert(p);
        std::vector<bool> kept(actions.size(), false);
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : rules) {
                if (!relevant.count(r.conclusion.first)) continue;
                for (const auto& [p, v] : r.premises)
                    if (relevant.insert(p).second) changed = true;
            }
            for (size_t i = 0; i < actions.size(); ++i) {
                if (kept[i]) continue;
                bool useful_eff = false;
                for (const auto& p : insts[i].add_effects)
                    useful_eff = useful_eff || relevant.count(p);
                for (const auto& p : insts[i].delete_effects)
                    useful_eff = useful_eff || relevant.count(p);
                if (!useful_eff) continue;
                kept[i] = true;
                changed = true;
                for (const auto& [p, v] : insts[i].preconditions)
                    if (relevant.insert(p).second) changed = true;
            }
        }
        std::vector<GroundAction> fa;
        std::vector<InstantiatedAction> fi;
        for (size_t i = 0; i < actions.size(); ++i) {
            if (!kept[i]) continue;
            fa.push_back(std::move(actions[i]));
            fi.push_back(std::move(insts[i]));
        }
        actions = std::move(fa);
        insts = std::move(fi);
    }

    // Candidate unknowns: ground predicates that can matter (appear in some
    // action precondition or in the goal) and are not yet grounded.
    std::set<PredicateId> useful;
    for (const auto& inst : insts)
        for (const auto& [p, v] : inst.preconditions) useful.insert(p);
    for (const auto& [p, v] : goal.required) useful.insert(p);

    std::set<std::string> goal_objects;
    for (const auto& [p, v] : goal.required)
        for (const auto& a : p.args) goal_objects.insert(a);

    auto relevance = [&](const PredicateId& p) {
        int n = 0;
        for (const auto& a : p.args)
            if (goal_objects.count(a)) ++n;
        return n;
    };

    std::vector<PredicateId> unknowns;
    for (const auto& p : useful)
        if (!initial.contains(p) && relevance(p) > 0) unknowns.push_back(p);
    std::stable_sort(unknowns.begin(), unknowns.end(),
                     [&](const PredicateId& a, const PredicateId& b) {
                         return std::tuple(-relevance(a), a) < std::tuple(-relevance(b), b);
                     });

    // Drop mutex-group members whose group already has a grounded-true member.
    auto mutex_key = [&](const PredicateId& p) -> std::optional<std::string> {
        for (const auto& m : schema.mutexes) {
            if (m.pattern.name != p.name) continue;
            for (size_t i = 0; i < m.pattern.args.size(); ++i)
                if (m.pattern.args[i] == m.by_var) return p.name + "/" + p.args[i];
        }
        return std::nullopt;
    };
    std::set<std::string> resolved_groups;
    for (const auto& [p, f] : initial.facts())
        if (f.value)
            if (auto key = mutex_key(p)) resolved_groups.insert(*key);
    std::erase_if(unknowns, [&](const PredicateId& p) {
        auto key = mutex_key(p);
        return key && resolved_groups.count(*key);
    });

    if (static_cast<int>(unknowns.size()) > cfg.max_assumptions)
        unknowns.resize(cfg.max_assumptions);

    // Partition into mutex clusters (at most one member true) and singletons.
    struct Cluster {
        std::vector<PredicateId> members;  // scenario options: one true, or none
        bool allow_none = true;
    };
    std::vector<Cluster> clusters;
    std::map<std::string, size_t> cluster_index;
    std::vector<PredicateId> singletons;
    for (const auto& p : unknowns) {
        auto key = mutex_key(p);
        if (!key) {
            singletons.push_back(p);
            continue;
        }
        auto [it, inserted] = cluster_index.emplace(*key, clusters.size());
        if (inserted) clusters.push_back({});
        clusters[it->second].members.push_back(p);
    }
    // "none of these" is only consistent if the cluster does not cover every
    // remaining possibility for its group.
    for (auto& [key, ci] : cluster_index) {
        const auto& any = clusters[ci].members.front();
        int possible = 0;
        for (const auto& q : schema.ground_predicates()) {
            if (q.name != any.name) continue;
            if (!mutex_key(q) || *mutex_key(q) != key) continue;
            auto v = initial.value_of(q);
            if (!v || *v) ++possible;  // not known-false
        }
        clusters[ci].allow_none = static_cast<int>(clusters[ci].members.size()) < possible;
    }

    // Enumerate scenarios (product of cluster choices x singleton booleans).
    size_t n_scenarios = 1;
    size_t cap = size_t(1) << cfg.max_assumptions;
    for (const auto& c : clusters)
        n_scenarios *= c.members.size() + (c.allow_none ? 1 : 0);
    n_scenarios <<= singletons.size();
    if (n_scenarios > cap) n_scenarios = cap;

    State w0_true;
    for (const auto& [p, f] : initial.facts())
        if (f.value) w0_true.insert(p);

    std::vector<Hypothesis> result;
    std::set<std::pair<std::vector<GroundAction>, std::map<PredicateId, bool>>> seen;

    std::vector<size_t> choice(clusters.size(), 0);
    std::vector<bool> single_val(singletons.size(), false);
    for (size_t sc = 0; sc < n_scenarios; ++sc) {
        // decode scenario index
        size_t rem = sc;
        for (size_t i = 0; i < singletons.size(); ++i) {
            single_val[i] = rem & 1;
            rem >>= 1;
        }
        bool valid = true;
        for (size_t i = 0; i < clusters.size(); ++i) {
            size_t n = clusters[i].members.size() + (clusters[i].allow_none ? 1 : 0);
            choice[i] = rem % n;
            rem /= n;
        }
        if (!valid) continue;

        State s0_base = w0_true;
        for (size_t i = 0; i < clusters.size(); ++i)
            if (choice[i] < clusters[i].members.size())
                s0_base.insert(clusters[i].members[choice[i]]);
        for (size_t i = 0; i < singletons.size(); ++i)
            if (single_val[i]) s0_base.insert(singletons[i]);

        std::map<PredicateId, bool> s0_map;
        for (const auto& p : s0_base) s0_map[p] = true;
        auto s0_closure = entail_closure(s0_map, rules, /*closed_world=*/true);
        State s0 = s0_base;
        for (const auto& [p, lit] : s0_closure.derived) {
            if (lit.value)
                s0.insert(p);
            else
                s0.erase(p);
        }

        if (goal_holds(s0, goal)) continue;  // empty plan; hypotheses must act
        auto plan = plan_search(s0, goal, actions, insts, rules, cfg);
        if (plan.empty()) continue;

        // Replay and annotate external requirements.
        std::map<PredicateId, bool> pre;
        State state = s0;
        State explicit_add, explicit_del;
        std::map<PredicateId, bool> replay_base;  // scenario facts plus explicit effects
        for (const auto& p : s0_base) replay_base[p] = true;
        auto external = [&](const PredicateId& p, bool req) {
            bool now = state.count(p) != 0;
            bool at_start = s0.count(p) != 0;
            if (now == at_start) {
                record_external(p, req, s0_base, s0_closure, pre);
                return;
            }
            // Changed by the plan. An explicit action effect covers it
            // outright; a mid-plan derivation still rests on whatever
            // scenario facts fed its premises, so those get annotated.
            if (req ? explicit_add.count(p) != 0 : explicit_del.count(p) != 0) return;
            auto closure = entail_closure(replay_base, rules, /*closed_world=*/true);
            auto dt = closure.derived.find(p);
            if (dt == closure.derived.end()) return;
            for (const auto& [f, v] : dt->second.base_support) {
                if (v ? explicit_add.count(f) != 0 : explicit_del.count(f) != 0) continue;
                record_external(f, v, s0_base, s0_closure, pre);
            }
        };
        for (const auto& a : plan) {
            auto inst = schema.instantiate(a);
            for (const auto& [p, req] : inst.preconditions) external(p, req);
            for (const auto& p : inst.add_effects) {
                state.insert(p);
                explicit_add.insert(p);
                explicit_del.erase(p);
                replay_base[p] = true;
            }
            for (const auto& p : inst.delete_effects) {
                state.erase(p);
                explicit_del.insert(p);
                explicit_add.erase(p);
                replay_base[p] = false;
            }
            close_state(state, rules);
        }
        for (const auto& [g, req] : goal.required) external(g, req);

        Hypothesis h;
        h.plan = plan;
        h.expected = pre;
        for (const auto& [p, v] : pre)
            if (!initial.contains(p)) ++h.assumption_count;
        if (!seen.insert({h.plan, h.expected}).second) continue;
        result.push_back(std::move(h));
    }

    std::stable_sort(result.begin(), result.end(), [](const Hypothesis& a, const Hypothesis& b) {
        return std::tuple(a.plan.size(), a.assumption_count, a.str()) <
               std::tuple(b.plan.size(), b.assumption_count, b.str());
    });
    if (static_cast<int>(result.size()) > limit) result.resize(limit);
    for (size_t i = 0; i < result.size(); ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "h%02zu", i);
        result[i].id = buf;
    }
    return result;
}

}  // namespace aec
