#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aec/domain.hpp"
#include "aec/hypothesis.hpp"

namespace aec {

struct AuditEntry {
    std::string check;                    // "pre", "step", "goal"
    std::optional<PredicateId> predicate;
    int step = -1;                        // plan step index for "step" entries
    bool passed = false;
    std::string evidence;                 // "grounded", "entailed", "effect", "unresolved", "contradicted"
    std::vector<std::string> rule_support;
};

struct Verdict {
    bool passed = false;
    std::vector<AuditEntry> audit;

    // Predicates whose only failure mode was being unresolved (candidates for
    // targeted queries).
    std::vector<PredicateId> uncovered() const;
    // True iff some audit entry failed because of an outright contradiction.
    bool contradicted() const;
};

enum class CounterexampleKind {
    EntailmentContradiction,
    GroundingConflict,
    ExecutionContradiction,
};

struct Counterexample {
    CounterexampleKind kind;
    PredicateId predicate;
    bool expected = false;
    bool observed = false;
    std::vector<std::string> rule_ids;
    Provenance observed_provenance = Provenance::ExecutionFeedback;
};

// Grounded evidence usable when reasoning about future states: under monotone
// rules a value-1 fact about a rule-concluded predicate persists, but a
// value-0 fact is perishable (any later world change can flip it), so those
// are dropped. Facts about predicates no rule concludes pass through.
GroundedStore verification_view(const GroundedStore& grounded,
                                const std::vector<GroundRule>& rules);

// Base-level query targets for resolving (p, desired): the unknown premises
// of rules that could conclude it, expanded transitively; p itself when no
// rule applies or every premise is already grounded.
std::vector<PredicateId> expand_query_targets(const PredicateId& p, bool desired,
                                              const GroundedStore& grounded,
                                              const std::vector<GroundRule>& rules);

// Precondition check: every p in Pre(h) grounded or entailed with the expected
// value. Beliefs are not in the signature and cannot be consulted.
Verdict check_pre(const Hypothesis& h, const GroundedStore& grounded,
                  const std::vector<GroundRule>& rules);

// Stepwise compositional compatibility: each action's instantiated
// preconditions must hold in the symbolic state built from the prefix
// (grounded facts, earlier effects, or entailment), and the goal must hold
// after the final action. Stops at the first failing step.
Verdict pullback_verify(const Hypothesis& h, const GroundedStore& grounded,
                        const GoalConstraints& goal, const DomainSchema& schema,
                        const std::vector<GroundRule>& rules);

// check_pre AND pullback_verify, short-circuit in that order.
Verdict verify(const Hypothesis& h, const GroundedStore& grounded, const GoalConstraints& goal,
               const DomainSchema& schema, const std::vector<GroundRule>& rules);

// Test oracle: executes the plan against the complete hidden truth with real
// transition semantics (effects plus physics-rule closure) and checks the goal
// afterward.
bool brute_force_feasible(const Hypothesis& h, const std::map<PredicateId, bool>& hidden_truth,
                          const DomainSchema& schema,
                          const std::vector<GroundRule>& physics_rules,
                          const GoalConstraints& goal);

struct RepairConfig {
    int rule_tighten_threshold = 2;  // K
};

struct RepairResult {
    std::vector<EntailmentRule> rules;
    GroundedStore grounded;
    std::vector<std::string> disabled_rules;
};

// Conservative repair: evidence override on the grounded store,
// and disabling of any rule implicated in >= K entailment contradictions.
RepairResult repair(const std::vector<Counterexample>& counterexamples,
                    std::vector<EntailmentRule> rules, GroundedStore grounded,
                    const RepairConfig& cfg = {});

}  // namespace aec
