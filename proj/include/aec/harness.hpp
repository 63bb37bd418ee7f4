#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "aec/controller.hpp"
#include "aec/environment.hpp"
#include "aec/predictor.hpp"

namespace aec {

// Full Monte Carlo experiment description; serializes to/from JSON so runs are
// reproducible from a config file alone.
struct ExperimentConfig {
    uint64_t seed = 1;
    int episodes = 100;
    int threads = 1;
    bool keep_traces = false;  // retain full per-episode traces in the report
    EnvInstanceConfig env;
    OracleConfig oracle;
    ControllerConfig controller;
    SyntheticPredictorConfig predictor;
    std::vector<std::string> extra_rules;  // appended to the agent's rule set

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct EpisodeRecord {
    int index = 0;
    bool success = false;
    int queries = 0;
    int rounds = 0;
    std::string fail_reason;
    std::vector<CommitRecord> commits;
    std::vector<Counterexample> counterexamples;
    std::vector<PredictorCounterexample> predictor_counterexamples;
    int leakage_checked = 0;
    int leakage_violations = 0;
    int gate_checked = 0;
    int gate_violations = 0;
    std::vector<TraceEvent> trace;  // only when keep_traces
};

struct AggregateReport {
    ExperimentConfig config;
    std::vector<EpisodeRecord> episodes;

    int successes = 0;
    long total_queries = 0;
    int total_commits = 0;
    int infeasible_commits = 0;
    double mean_bound = 1.0;  // over commits
    int leakage_checked = 0;
    int leakage_violations = 0;
    int gate_checked = 0;
    int gate_violations = 0;

    double success_rate() const;
    double mean_queries() const;
    nlohmann::json to_json() const;
    std::string serialize() const;  // deterministic, byte-stable
};

// The agent's rule set: the schema's own rules plus any extra rule lines from
// the config. Extra rules must parse under the schema's grammar.
std::vector<EntailmentRule> agent_rules_for(const DomainSchema& schema,
                                            const std::vector<std::string>& extra_rules);

// Runs the corpus. Per-episode seeds come from Rng::derive(seed, 2i) for the
// environment and Rng::derive(seed, 2i+1) for the predictor, so results are
// identical regardless of thread count.
AggregateReport run_corpus(const ExperimentConfig& cfg);

struct Theorem1Report {
    int commits = 0;
    int feasible = 0;
    double empirical_rate = 1.0;
    double mean_bound = 1.0;
    double mc_stderr = 0.0;
    bool conclusive = false;  // requires >= 100 commits
    bool holds = false;       // empirical_rate >= mean_bound - 3 * mc_stderr

    nlohmann::json to_json() const;
};

// Checks the feasibility bound Pr(feasible) >= mean(1 - sum eps_oracle) over
// all commit events in the report, within Monte Carlo error.
Theorem1Report validate_theorem1(const AggregateReport& report);

struct SoundnessSweepResult {
    long checked = 0;       // verified hypotheses tested against the oracle
    long accepted = 0;      // of which the verifier accepted
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Exhaustive verifier soundness check on the micro domain: for every hidden
// world, every goal, and every subset of correct grounded facts, a verifier
// accept must imply brute-force feasibility.
SoundnessSweepResult soundness_sweep(const std::vector<EntailmentRule>& agent_rules);

struct RefinementIteration {
    int iteration = 0;
    double success_rate = 0.0;
    int counterexamples = 0;
    std::vector<std::string> disabled_rules;  // cumulative
    double noise_scale = 0.0;                 // predictor noise after recalibration
    bool sweep_ok = false;
};

struct RefinementReport {
    std::vector<RefinementIteration> iterations;
    std::vector<AggregateReport> reports;  // one full report per iteration

    bool non_decreasing() const;
    bool all_sweeps_ok() const;
    nlohmann::json to_json() const;
};

// Counterexample-driven refinement: between corpus runs, disables rules
// implicated in repeated entailment contradictions and recalibrates the
// predictor's reported uncertainty. Same corpus seeds every iteration, so
// improvements are attributable to the refinement alone. When cx_log_path is
// nonempty, counterexamples are appended there (one JSON object per line)
// across iterations.
RefinementReport run_refinement(ExperimentConfig cfg, int iterations,
                                const RepairConfig& repair_cfg = {},
                                const std::string& cx_log_path = {});

}  // namespace aec
