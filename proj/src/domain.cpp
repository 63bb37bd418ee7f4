#include "aec/domain.hpp"

#include <algorithm>
#include <functional>

namespace aec {

namespace {

void merge_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
    for (const auto& s : from)
        if (std::find(into.begin(), into.end(), s) == into.end()) into.push_back(s);
}

void merge_unique(std::vector<Literal>& into, const std::vector<Literal>& from) {
    for (const auto& l : from)
        if (std::find(into.begin(), into.end(), l) == into.end()) into.push_back(l);
}

}  // namespace

std::vector<GroundRule> ground_rules(const std::vector<EntailmentRule>& rules,
                                     const DomainSchema& schema) {
    std::vector<GroundRule> out;
    for (const auto& rule : rules) {
        if (!rule.enabled) continue;
        // collect variables with their types (from predicate declarations)
        std::vector<std::pair<std::string, std::string>> vars;
        auto visit = [&](const PredicateId& p) {
            const auto* decl = schema.find_predicate(p.name);
            if (!decl) throw SchemaError("rule " + rule.id + " uses undeclared " + p.name);
            if (decl->arg_types.size() != p.args.size())
                throw SchemaError("rule " + rule.id + " arity mismatch on " + p.name);
            for (size_t i = 0; i < p.args.size(); ++i) {
                const auto& a = p.args[i];
                if (a.empty() || a[0] != '?') continue;
                bool seen = false;
                for (const auto& [v, t] : vars) seen = seen || v == a;
                if (!seen) vars.emplace_back(a, decl->arg_types[i]);
            }
        };
        for (const auto& [p, v] : rule.premises) visit(p);
        visit(rule.conclusion.first);

        std::map<std::string, std::string> binding;
        std::function<void(size_t)> rec = [&](size_t i) {
            if (i == vars.size()) {
                GroundRule g;
                g.id = rule.id;
                for (const auto& [p, v] : rule.premises)
                    g.premises.emplace_back(substitute(p, binding), v);
                g.conclusion = {substitute(rule.conclusion.first, binding), rule.conclusion.second};
                out.push_back(std::move(g));
                return;
            }
            for (const auto& obj : schema.objects_of_type(vars[i].second)) {
                binding[vars[i].first] = obj;
                rec(i + 1);
            }
        };
        rec(0);
    }
    return out;
}

ClosureResult entail_closure(const std::map<PredicateId, bool>& base,
                             const std::vector<GroundRule>& rules, bool closed_world) {
    ClosureResult res;
    // recorded evidence only; the closed-world default must not apply when
    // deciding whether a conclusion is still derivable
    auto recorded = [&](const PredicateId& p) -> std::optional<bool> {
        auto it = base.find(p);
        if (it != base.end()) return it->second;
        auto dt = res.derived.find(p);
        if (dt != res.derived.end()) return dt->second.value;
        return std::nullopt;
    };
    auto lookup = [&](const PredicateId& p) -> std::optional<bool> {
        auto v = recorded(p);
        if (!v && closed_world) return false;
        return v;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& rule : rules) {
            bool fires = true;
            DerivedLit acc;
            for (const auto& [p, req] : rule.premises) {
                auto v = lookup(p);
                if (!v || *v != req) {
                    fires = false;
                    break;
                }
                auto dt = res.derived.find(p);
                if (dt != res.derived.end()) {
                    merge_unique(acc.rule_support, dt->second.rule_support);
                    merge_unique(acc.base_support, dt->second.base_support);
                } else {
                    merge_unique(acc.base_support, {Literal{p, req}});
                }
            }
            if (!fires) continue;
            const auto& [cp, cv] = rule.conclusion;
            auto existing = recorded(cp);
            if (existing) {
                if (*existing != cv) res.conflicts.push_back(cp);
                continue;  // first derivation (or base fact) wins
            }
            acc.value = cv;
            merge_unique(acc.rule_support, {rule.id});
            res.derived.emplace(cp, std::move(acc));
            changed = true;
        }
    }
    return res;
}

EntailOutcome entails(const GroundedStore& store, const PredicateId& p,
                      const std::vector<GroundRule>& rules) {
    EntailOutcome out;
    if (auto v = store.value_of(p)) {
        out.value = *v;
        return out;
    }
    std::map<PredicateId, bool> base;
    for (const auto& [q, f] : store.facts()) base[q] = f.value;
    auto closure = entail_closure(base, rules, /*closed_world=*/false);
    out.conflict =
        std::find(closure.conflicts.begin(), closure.conflicts.end(), p) != closure.conflicts.end();
    auto it = closure.derived.find(p);
    if (it != closure.derived.end()) {
        out.value = it->second.value;
        out.rule_support = it->second.rule_support;
        out.base_support = it->second.base_support;
    }
    return out;
}

GroundedStore apply_plan(std::span<const GroundAction> plan, GroundedStore state,
                         const DomainSchema& schema) {
    for (const auto& a : plan) {
        auto inst = schema.instantiate(a);
        for (const auto& p : inst.add_effects) state.set(p, true, Provenance::SymbolicEffect);
        for (const auto& p : inst.delete_effects) state.set(p, false, Provenance::SymbolicEffect);
    }
    return state;
}

bool goal_satisfied(const GroundedStore& state, const GoalConstraints& goal,
                    const std::vector<GroundRule>& rules) {
    for (const auto& [p, req] : goal.required) {
        auto outcome = entails(state, p, rules);
        if (!outcome.value || *outcome.value != req) return false;
    }
    return true;
}

void close_state(std::set<PredicateId>& state, const std::vector<GroundRule>& rules) {
    std::map<PredicateId, bool> base;
    for (const auto& p : state) base[p] = true;
    auto closure = entail_closure(base, rules, /*closed_world=*/true);
    for (const auto& [p, lit] : closure.derived) {
        if (lit.value)
            state.insert(p);
        else
            state.erase(p);
    }
}

}  // namespace aec
