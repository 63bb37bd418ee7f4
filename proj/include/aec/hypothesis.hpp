#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "aec/domain.hpp"
#include "aec/schema.hpp"
#include "aec/store.hpp"

namespace aec {

// A candidate plan: composed action sequence with its precondition set Pre(h)
// and the expected assignment for each precondition.
struct Hypothesis {
    std::string id;
    std::vector<GroundAction> plan;
    std::map<PredicateId, bool> expected;  // dom(expected) == Pre(h)
    int assumption_count = 0;              // |Pre(h) \ dom(w0)|

    std::set<PredicateId> preconditions() const;
    std::string str() const;
};

// Higher is better: shorter plan, then fewer assumptions, then smallest id.
double score(const Hypothesis& h);
bool score_before(const Hypothesis& a, const Hypothesis& b);  // strict "a beats b"
const Hypothesis* best_hypothesis(const std::vector<Hypothesis>& H);

// Keeps hypotheses whose expectation on p matches v; hypotheses that never
// mention p survive (filtering prunes by contradiction, not by ignorance).
std::vector<Hypothesis> filter_hypotheses(std::vector<Hypothesis> H, const PredicateId& p,
                                          bool v);

// Preconditions of h covered by neither store: { p in Pre(h) | p not in
// dom(grounded) u dom(beliefs) }.
std::set<PredicateId> unresolved_set(const GroundedStore& grounded, const BeliefStore& beliefs,
                                     const Hypothesis& h);

// Everything the agent knows or conjectures: grounded facts, beliefs, and the
// current hypothesis pool.
struct EpistemicState {
    GroundedStore grounded;
    BeliefStore beliefs;
    std::vector<Hypothesis> hypotheses;
};

std::set<PredicateId> union_unresolved(const EpistemicState& state);

struct GeneratorConfig {
    int max_assumptions = 6;   // bound A on enumerated unknown predicates
    int depth_cap = 20;        // bound D on plan length
    int max_expansions = 2000; // search node budget per scenario
    int default_limit = 32;
};

// Enumerates assignments over goal-relevant unknown predicates, plans under
// each, and annotates the resulting plans with the external facts they relied
// on. Deterministic; returns at most `limit` hypotheses.
std::vector<Hypothesis> generate_hypotheses(const GroundedStore& initial,
                                            const GoalConstraints& goal,
                                            const DomainSchema& schema,
                                            const std::vector<GroundRule>& rules,
                                            const GeneratorConfig& cfg, int limit);

}  // namespace aec
