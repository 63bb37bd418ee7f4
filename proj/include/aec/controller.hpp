#pragma once

#include <set>
#include <string>
#include <vector>

#include "aec/environment.hpp"
#include "aec/hypothesis.hpp"
#include "aec/predictor.hpp"
#include "aec/trace.hpp"
#include "aec/verifier.hpp"

namespace aec {

enum class Mode { AEC, Direct, QueryOnly, NoVerification, NoGating };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct ControllerConfig {
    double tau = 0.3;       // uncertainty threshold
    double epsilon = 0.05;  // ambiguity margin
    int max_queries = 10;   // per planning-loop invocation
    Mode mode = Mode::AEC;
    int replan_cap = 10;
    GeneratorConfig generator;
};

struct CommitRecord {
    std::string hypothesis_id;
    int round = 0;
    std::vector<PredicateId> grounded_after_init;  // Q at commit time
    double bound = 1.0;                            // 1 - sum of eps_oracle over Q
    bool feasible_at_commit = false;               // brute-force oracle, pre-execution snapshot
};

struct EpisodeOutcome {
    bool success = false;
    int replanning_rounds = 0;
    int queries_used = 0;
    std::vector<std::string> committed;  // hypothesis ids, commit order
    GroundedStore final_state;
    std::vector<TraceEvent> trace;
    std::string fail_reason;  // empty on success
    std::vector<Counterexample> counterexamples;
    std::vector<PredictorCounterexample> predictor_counterexamples;
    std::vector<CommitRecord> commits;
};

// Discrimination-maximizing selection: the predicate splitting the hypothesis
// set into the most discordant pairs, ties broken by occurrence count then
// lexicographically.
PredicateId select_precondition(const std::set<PredicateId>& U,
                                const std::vector<Hypothesis>& H);

// Runs one full episode: the uncertainty-gated query/simulate loop, grounded
// commitment, monitored execution, and replanning up to replan_cap.
EpisodeOutcome run_episode(Environment& env, const DomainSchema& schema,
                           const std::vector<EntailmentRule>& agent_rules,
                           SyntheticPredictor& predictor, const ControllerConfig& cfg);

// True iff no predictor or verifier input in the trace contained belief data.
bool assert_no_leakage(const std::vector<TraceEvent>& trace);

}  // namespace aec
