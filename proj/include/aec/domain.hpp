#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "aec/schema.hpp"
#include "aec/store.hpp"

namespace aec {

// Fully instantiated entailment rule.
struct GroundRule {
    std::string id;
    std::vector<Literal> premises;
    Literal conclusion;
};

// Instantiates all enabled rules over the object universe. Deterministic
// order: rule declaration order, then binding enumeration order.
std::vector<GroundRule> ground_rules(const std::vector<EntailmentRule>& rules,
                                     const DomainSchema& schema);

struct DerivedLit {
    bool value = false;
    std::vector<std::string> rule_support;  // rule ids used anywhere in the derivation
    std::vector<Literal> base_support;      // base facts the derivation rests on
};

struct ClosureResult {
    std::map<PredicateId, DerivedLit> derived;  // newly derived only, base excluded
    std::vector<PredicateId> conflicts;         // opposite values met during chaining
};

// Forward chaining to fixpoint. Open-world: a premise holds only if the base
// map or an earlier derivation assigns it the required value explicitly. With
// closed_world, predicates absent from base are treated as false.
ClosureResult entail_closure(const std::map<PredicateId, bool>& base,
                             const std::vector<GroundRule>& rules,
                             bool closed_world = false);

struct EntailOutcome {
    std::optional<bool> value;  // absent = abstention
    std::vector<std::string> rule_support;
    std::vector<Literal> base_support;
    bool conflict = false;
};

// Sound-but-incomplete entailment of p from a grounded store. A grounded fact
// on p always wins; derivations never override it.
EntailOutcome entails(const GroundedStore& store, const PredicateId& p,
                      const std::vector<GroundRule>& rules);

// Applies each action's effects in order to the store. Pure symbolic
// execution; precondition checking is the verifier's job. Effects are tagged
// SymbolicEffect.
GroundedStore apply_plan(std::span<const GroundAction> plan, GroundedStore state,
                         const DomainSchema& schema);

// True iff every goal literal is present (or entailed) with the required
// value.
bool goal_satisfied(const GroundedStore& state, const GoalConstraints& goal,
                    const std::vector<GroundRule>& rules);

// Closed-world closure over a set of true predicates, in place. Used by the
// planner and the hidden-world dynamics.
void close_state(std::set<PredicateId>& state, const std::vector<GroundRule>& rules);

}  // namespace aec
