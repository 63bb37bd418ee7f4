#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aec/domain.hpp"
#include "aec/rng.hpp"
#include "aec/schema.hpp"
#include "aec/store.hpp"

namespace aec {

// Per-predicate query error model epsilon_oracle(p), keyed by predicate name.
struct OracleConfig {
    double default_error = 0.0;
    std::map<std::string, double> per_predicate;
    bool side_effect_errors = false;  // inject flips into delta-w facts too
    bool persistent_flips = false;    // re-querying p repeats the same outcome

    double error_for(const PredicateId& p) const;
};

struct EnvInstanceConfig {
    std::string domain = "micro";  // "micro" or "household"
    int n_objects = 4;             // household only
    int n_boxes = 3;               // household only (plus fridge1 and sink1)
    double open_fraction = 0.5;    // probability a container starts open
    double attribute_visibility = 1.0;
    int step_cap = 50;
};

DomainSchema make_schema(const EnvInstanceConfig& cfg);

struct QueryOutcome {
    bool value = false;
    std::vector<GroundedFact> delta;
    int steps = 1;
};

struct ExecOutcome {
    bool success = false;
    std::vector<GroundedFact> feedback;
    int steps = 1;
};

// Synthetic partially observed symbolic environment. Owns the hidden world
// (total truth assignment, rule-closed) for one episode. All randomness comes
// from the per-episode seed.
class Environment {
public:
    Environment(const DomainSchema& schema, EnvInstanceConfig cfg, OracleConfig oracle,
                uint64_t seed);

    const GoalConstraints& goal() const { return goal_; }

    // Sound-but-incomplete observation grounder: every emitted fact matches
    // hidden truth; invisible predicates are simply absent.
    GroundedStore initial_grounding();

    // Query macro-action: grounds p (flipped with probability
    // epsilon_oracle(p)), possibly with irreversible side effects whose
    // revelations are returned as delta.
    QueryOutcome query(const PredicateId& p);

    ExecOutcome execute_action(const GroundAction& a);

    int steps_used() const { return steps_used_; }
    int step_cap() const { return cfg_.step_cap; }
    bool budget_exhausted() const { return steps_used_ >= cfg_.step_cap; }

    // Terminal task-completion signal: grounded observations of the goal
    // literals' true values.
    std::vector<GroundedFact> goal_feedback() const;

    // --- instrumentation; tests and the harness only, never the controller ---
    const std::map<PredicateId, bool>& hidden_truth() const { return truth_; }
    bool goal_holds_in_truth() const;
    const std::vector<GroundRule>& physics() const { return physics_; }
    const OracleConfig& oracle() const { return oracle_; }
    const DomainSchema& schema() const { return schema_; }

    // Force a specific hidden assignment (exhaustive test sweeps). Re-closes
    // the truth under the physics rules.
    void set_hidden_truth(const std::map<PredicateId, bool>& truth);
    void set_goal(GoalConstraints goal) { goal_ = std::move(goal); }

private:
    void sample_world();
    void sample_goal();
    void apply_truth_effects(const std::vector<PredicateId>& adds,
                             const std::vector<PredicateId>& dels);
    bool queried_value(const PredicateId& p);
    std::vector<GroundedFact> container_contents(const std::string& c, Provenance prov,
                                                 bool inject_errors);

    const DomainSchema& schema_;
    EnvInstanceConfig cfg_;
    OracleConfig oracle_;
    Rng rng_;
    std::map<PredicateId, bool> truth_;
    GoalConstraints goal_;
    int steps_used_ = 0;
    std::map<PredicateId, bool> flip_memory_;
    std::vector<GroundRule> physics_;
};

}  // namespace aec
