#include "aec/verifier.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace aec {

std::vector<PredicateId> Verdict::uncovered() const {
    std::vector<PredicateId> out;
    for (const auto& e : audit)
        if (!e.passed && e.evidence == "unresolved" && e.predicate)
            if (std::find(out.begin(), out.end(), *e.predicate) == out.end())
                out.push_back(*e.predicate);
    return out;
}

bool Verdict::contradicted() const {
    for (const auto& e : audit)
        if (!e.passed && e.evidence == "contradicted") return true;
    return false;
}

GroundedStore verification_view(const GroundedStore& grounded,
                                const std::vector<GroundRule>& rules) {
    std::set<std::string> concluded;
    for (const auto& r : rules) concluded.insert(r.conclusion.first.name);
    GroundedStore out;
    for (const auto& [p, f] : grounded.facts())
        if (f.value || !concluded.count(p.name)) out.set(p, f.value, f.provenance);
    return out;
}

std::vector<PredicateId> expand_query_targets(const PredicateId& p, bool desired,
                                              const GroundedStore& grounded,
                                              const std::vector<GroundRule>& rules) {
    std::vector<PredicateId> out;
    std::set<PredicateId> visited;
    std::function<void(const PredicateId&, bool)> walk = [&](const PredicateId& q, bool want) {
        if (!visited.insert(q).second) return;
        bool expanded = false;
        for (const auto& r : rules) {
            if (r.conclusion.first != q || r.conclusion.second != want) continue;
            for (const auto& [prem, req] : r.premises) {
                if (grounded.contains(prem)) continue;
                expanded = true;
                walk(prem, req);
            }
        }
        if (!expanded && !grounded.contains(q) &&
            std::find(out.begin(), out.end(), q) == out.end())
            out.push_back(q);
    };
    walk(p, desired);
    if (out.empty()) out.push_back(p);
    return out;
}

Verdict check_pre(const Hypothesis& h, const GroundedStore& grounded,
                  const std::vector<GroundRule>& rules) {
    Verdict v;
    v.passed = true;
    for (const auto& [p, req] : h.expected) {
        AuditEntry e;
        e.check = "pre";
        e.predicate = p;
        if (auto gv = grounded.value_of(p)) {
            e.passed = *gv == req;
            e.evidence = e.passed ? "grounded" : "contradicted";
        } else {
            auto outcome = entails(grounded, p, rules);
            if (outcome.value) {
                e.passed = *outcome.value == req;
                e.evidence = e.passed ? "entailed" : "contradicted";
                e.rule_support = outcome.rule_support;
            } else {
                e.passed = false;
                e.evidence = "unresolved";
            }
        }
        v.passed = v.passed && e.passed;
        v.audit.push_back(std::move(e));
    }
    return v;
}

Verdict pullback_verify(const Hypothesis& h, const GroundedStore& grounded,
                        const GoalConstraints& goal, const DomainSchema& schema,
                        const std::vector<GroundRule>& rules) {
    Verdict v;
    v.passed = true;
    GroundedStore state = grounded;
    // Positive conclusions derived along the plan persist (the world's rule
    // closure is monotone), so they are folded into the symbolic state after
    // each step; their derivations are kept for audit attribution.
    std::map<PredicateId, std::vector<std::string>> persisted_support;
    auto persist_derived = [&] {
        std::map<PredicateId, bool> base;
        for (const auto& [q, f] : state.facts()) base[q] = f.value;
        auto closure = entail_closure(base, rules, /*closed_world=*/false);
        for (const auto& [q, lit] : closure.derived) {
            if (!lit.value) continue;
            state.set(q, true, Provenance::SymbolicEffect);
            auto& support = persisted_support[q];
            for (const auto& rid : lit.rule_support)
                if (std::find(support.begin(), support.end(), rid) == support.end())
                    support.push_back(rid);
        }
    };
    for (size_t i = 0; i < h.plan.size(); ++i) {
        auto inst = schema.instantiate(h.plan[i]);
        for (const auto& [p, req] : inst.preconditions) {
            AuditEntry e;
            e.check = "step";
            e.step = static_cast<int>(i);
            e.predicate = p;
            if (auto sv = state.value_of(p)) {
                e.passed = *sv == req;
                e.evidence = state.provenance_of(p) == Provenance::SymbolicEffect ? "effect"
                                                                                  : "grounded";
                auto ps = persisted_support.find(p);
                if (ps != persisted_support.end() && e.evidence == "effect") {
                    e.evidence = "entailed";
                    e.rule_support = ps->second;
                }
                if (!e.passed) e.evidence = "contradicted";
            } else {
                auto outcome = entails(state, p, rules);
                if (outcome.value) {
                    e.passed = *outcome.value == req;
                    e.evidence = e.passed ? "entailed" : "contradicted";
                    e.rule_support = outcome.rule_support;
                } else {
                    e.passed = false;
                    e.evidence = "unresolved";
                }
            }
            if (!e.passed) {
                v.passed = false;
                v.audit.push_back(std::move(e));
                return v;  // audit records the first failing step
            }
            v.audit.push_back(std::move(e));
        }
        for (const auto& p : inst.add_effects) state.set(p, true, Provenance::SymbolicEffect);
        for (const auto& p : inst.delete_effects) state.set(p, false, Provenance::SymbolicEffect);
        persist_derived();
    }
    for (const auto& [g, req] : goal.required) {
        AuditEntry e;
        e.check = "goal";
        e.predicate = g;
        auto outcome = entails(state, g, rules);
        if (outcome.value) {
            e.passed = *outcome.value == req;
            e.evidence = e.passed ? (state.contains(g) ? "grounded" : "entailed") : "contradicted";
            e.rule_support = outcome.rule_support;
            auto ps = persisted_support.find(g);
            if (ps != persisted_support.end()) {
                e.evidence = e.passed ? "entailed" : e.evidence;
                for (const auto& rid : ps->second)
                    if (std::find(e.rule_support.begin(), e.rule_support.end(), rid) ==
                        e.rule_support.end())
                        e.rule_support.push_back(rid);
            }
        } else {
            e.passed = false;
            e.evidence = "unresolved";
        }
        v.passed = v.passed && e.passed;
        v.audit.push_back(std::move(e));
    }
    return v;
}

Verdict verify(const Hypothesis& h, const GroundedStore& grounded, const GoalConstraints& goal,
               const DomainSchema& schema, const std::vector<GroundRule>& rules) {
    GroundedStore view = verification_view(grounded, rules);
    Verdict pre = check_pre(h, view, rules);
    if (!pre.passed) return pre;  // pullback audit absent on short-circuit
    Verdict pull = pullback_verify(h, view, goal, schema, rules);
    Verdict out;
    out.passed = pull.passed;
    out.audit = std::move(pre.audit);
    out.audit.insert(out.audit.end(), pull.audit.begin(), pull.audit.end());
    return out;
}

bool brute_force_feasible(const Hypothesis& h, const std::map<PredicateId, bool>& hidden_truth,
                          const DomainSchema& schema,
                          const std::vector<GroundRule>& physics_rules,
                          const GoalConstraints& goal) {
    std::set<PredicateId> state;
    for (const auto& [p, v] : hidden_truth)
        if (v) state.insert(p);
    for (const auto& a : h.plan) {
        auto inst = schema.instantiate(a);
        for (const auto& [p, req] : inst.preconditions)
            if ((state.count(p) != 0) != req) return false;
        for (const auto& p : inst.add_effects) state.insert(p);
        for (const auto& p : inst.delete_effects) state.erase(p);
        close_state(state, physics_rules);
    }
    for (const auto& [g, req] : goal.required)
        if ((state.count(g) != 0) != req) return false;
    return true;
}

RepairResult repair(const std::vector<Counterexample>& counterexamples,
                    std::vector<EntailmentRule> rules, GroundedStore grounded,
                    const RepairConfig& cfg) {
    RepairResult out;
    std::map<std::string, int> rule_hits;
    for (const auto& cx : counterexamples) {
        switch (cx.kind) {
            case CounterexampleKind::EntailmentContradiction:
                for (const auto& r : cx.rule_ids) rule_hits[r] += 1;
                break;
            case CounterexampleKind::GroundingConflict:
            case CounterexampleKind::ExecutionContradiction:
                // evidence override: newer external evidence wins
                grounded.set(cx.predicate, cx.observed, cx.observed_provenance);
                break;
        }
    }
    for (auto& rule : rules) {
        auto it = rule_hits.find(rule.id);
        if (rule.enabled && it != rule_hits.end() && it->second >= cfg.rule_tighten_threshold) {
            rule.enabled = false;
            out.disabled_rules.push_back(rule.id);
        }
    }
    out.rules = std::move(rules);
    out.grounded = std::move(grounded);
    return out;
}

}  // namespace aec
