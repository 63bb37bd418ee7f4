#include "aec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "aec/trace.hpp"

namespace aec {

using nlohmann::json;

namespace {

json oracle_to_json(const OracleConfig& o) {
    json j;
    j["default_error"] = o.default_error;
    j["per_predicate"] = o.per_predicate;
    j["side_effect_errors"] = o.side_effect_errors;
    j["persistent_flips"] = o.persistent_flips;
    return j;
}

OracleConfig oracle_from_json(const json& j) {
    OracleConfig o;
    o.default_error = j.value("default_error", o.default_error);
    if (j.contains("per_predicate"))
        o.per_predicate = j.at("per_predicate").get<std::map<std::string, double>>();
    o.side_effect_errors = j.value("side_effect_errors", o.side_effect_errors);
    o.persistent_flips = j.value("persistent_flips", o.persistent_flips);
    return o;
}

json env_to_json(const EnvInstanceConfig& e) {
    json j;
    j["domain"] = e.domain;
    j["n_objects"] = e.n_objects;
    j["n_boxes"] = e.n_boxes;
    j["open_fraction"] = e.open_fraction;
    j["attribute_visibility"] = e.attribute_visibility;
    j["step_cap"] = e.step_cap;
    return j;
}

EnvInstanceConfig env_from_json(const json& j) {
    EnvInstanceConfig e;
    e.domain = j.value("domain", e.domain);
    e.n_objects = j.value("n_objects", e.n_objects);
    e.n_boxes = j.value("n_boxes", e.n_boxes);
    e.open_fraction = j.value("open_fraction", e.open_fraction);
    e.attribute_visibility = j.value("attribute_visibility", e.attribute_visibility);
    e.step_cap = j.value("step_cap", e.step_cap);
    return e;
}

json controller_to_json(const ControllerConfig& c) {
    json j;
    j["tau"] = c.tau;
    j["epsilon"] = c.epsilon;
    j["max_queries"] = c.max_queries;
    j["mode"] = mode_name(c.mode);
    j["replan_cap"] = c.replan_cap;
    j["max_assumptions"] = c.generator.max_assumptions;
    j["depth_cap"] = c.generator.depth_cap;
    j["max_expansions"] = c.generator.max_expansions;
    j["hypothesis_limit"] = c.generator.default_limit;
    return j;
}

ControllerConfig controller_from_json(const json& j) {
    ControllerConfig c;
    c.tau = j.value("tau", c.tau);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.max_queries = j.value("max_queries", c.max_queries);
    if (j.contains("mode")) c.mode = mode_from_name(j.at("mode").get<std::string>());
    c.replan_cap = j.value("replan_cap", c.replan_cap);
    c.generator.max_assumptions = j.value("max_assumptions", c.generator.max_assumptions);
    c.generator.depth_cap = j.value("depth_cap", c.generator.depth_cap);
    c.generator.max_expansions = j.value("max_expansions", c.generator.max_expansions);
    c.generator.default_limit = j.value("hypothesis_limit", c.generator.default_limit);
    return c;
}

json predictor_to_json(const SyntheticPredictorConfig& p) {
    json j;
    j["accuracy"] = p.accuracy;
    j["ensemble_size"] = p.ensemble_size;
    j["noise_scale"] = p.noise_scale;
    j["seed"] = p.seed;
    return j;
}

SyntheticPredictorConfig predictor_from_json(const json& j) {
    SyntheticPredictorConfig p;
    p.accuracy = j.value("accuracy", p.accuracy);
    p.ensemble_size = j.value("ensemble_size", p.ensemble_size);
    p.noise_scale = j.value("noise_scale", p.noise_scale);
    p.seed = j.value("seed", p.seed);
    return p;
}

const char* cx_kind_name(CounterexampleKind k) {
    switch (k) {
        case CounterexampleKind::EntailmentContradiction: return "entailment";
        case CounterexampleKind::GroundingConflict: return "grounding";
        case CounterexampleKind::ExecutionContradiction: return "execution";
    }
    return "?";
}

json commit_to_json(const CommitRecord& c) {
    json j;
    j["hypothesis"] = c.hypothesis_id;
    j["round"] = c.round;
    json q = json::array();
    for (const auto& p : c.grounded_after_init) q.push_back(p.str());
    j["q"] = q;
    j["bound"] = c.bound;
    j["feasible"] = c.feasible_at_commit;
    return j;
}

json cx_to_json(const Counterexample& c) {
    json j;
    j["kind"] = cx_kind_name(c.kind);
    j["predicate"] = c.predicate.str();
    j["expected"] = c.expected;
    j["observed"] = c.observed;
    j["rules"] = c.rule_ids;
    return j;
}

json episode_to_json(const EpisodeRecord& e, bool with_trace) {
    json j;
    j["index"] = e.index;
    j["success"] = e.success;
    j["queries"] = e.queries;
    j["rounds"] = e.rounds;
    j["fail_reason"] = e.fail_reason;
    json commits = json::array();
    for (const auto& c : e.commits) commits.push_back(commit_to_json(c));
    j["commits"] = commits;
    json cxs = json::array();
    for (const auto& c : e.counterexamples) cxs.push_back(cx_to_json(c));
    j["counterexamples"] = cxs;
    j["leakage_checked"] = e.leakage_checked;
    j["leakage_violations"] = e.leakage_violations;
    j["gate_checked"] = e.gate_checked;
    j["gate_violations"] = e.gate_violations;
    if (with_trace) j["trace"] = serialize_trace(e.trace);
    return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.episodes = j.value("episodes", cfg.episodes);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.keep_traces = j.value("keep_traces", cfg.keep_traces);
    if (j.contains("env")) cfg.env = env_from_json(j.at("env"));
    if (j.contains("oracle")) cfg.oracle = oracle_from_json(j.at("oracle"));
    if (j.contains("controller")) cfg.controller = controller_from_json(j.at("controller"));
    if (j.contains("predictor")) cfg.predictor = predictor_from_json(j.at("predictor"));
    if (j.contains("extra_rules"))
        cfg.extra_rules = j.at("extra_rules").get<std::vector<std::string>>();

    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    require(cfg.episodes >= 1, "episodes must be >= 1");
    require(cfg.threads >= 1, "threads must be >= 1");
    require(cfg.env.domain == "micro" || cfg.env.domain == "household",
            "env.domain must be micro or household");
    require(cfg.env.n_objects >= 1 && cfg.env.n_boxes >= 1, "env sizes must be >= 1");
    require(cfg.env.open_fraction >= 0.0 && cfg.env.open_fraction <= 1.0,
            "env.open_fraction must be in [0,1]");
    require(cfg.env.attribute_visibility >= 0.0 && cfg.env.attribute_visibility <= 1.0,
            "env.attribute_visibility must be in [0,1]");
    require(cfg.env.step_cap >= 1, "env.step_cap must be >= 1");
    require(cfg.oracle.default_error >= 0.0 && cfg.oracle.default_error <= 1.0,
            "oracle.default_error must be in [0,1]");
    for (const auto& entry : cfg.oracle.per_predicate)
        require(entry.second >= 0.0 && entry.second <= 1.0,
                "oracle.per_predicate rates must be in [0,1]");
    require(cfg.controller.tau >= 0.0 && cfg.controller.tau <= 1.0,
            "controller.tau must be in [0,1]");
    require(cfg.controller.epsilon >= 0.0 && cfg.controller.epsilon <= 0.5,
            "controller.epsilon must be in [0,0.5]");
    require(cfg.controller.max_queries >= 0, "controller.max_queries must be >= 0");
    require(cfg.controller.replan_cap >= 0, "controller.replan_cap must be >= 0");
    require(cfg.predictor.accuracy >= 0.5 && cfg.predictor.accuracy <= 1.0,
            "predictor.accuracy must be in [0.5,1]");
    require(cfg.predictor.ensemble_size >= 1, "predictor.ensemble_size must be >= 1");
    require(cfg.predictor.noise_scale >= 0.0, "predictor.noise_scale must be >= 0");
    return cfg;
}

json ExperimentConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["episodes"] = episodes;
    j["threads"] = threads;
    j["keep_traces"] = keep_traces;
    j["env"] = env_to_json(env);
    j["oracle"] = oracle_to_json(oracle);
    j["controller"] = controller_to_json(controller);
    j["predictor"] = predictor_to_json(predictor);
    j["extra_rules"] = extra_rules;
    return j;
}

double AggregateReport::success_rate() const {
    return episodes.empty() ? 0.0 : static_cast<double>(successes) / episodes.size();
}

double AggregateReport::mean_queries() const {
    return episodes.empty() ? 0.0 : static_cast<double>(total_queries) / episodes.size();
}

json AggregateReport::to_json() const {
    json j;
    j["config"] = config.to_json();
    j["successes"] = successes;
    j["success_rate"] = success_rate();
    j["total_queries"] = total_queries;
    j["mean_queries"] = mean_queries();
    j["total_commits"] = total_commits;
    j["infeasible_commits"] = infeasible_commits;
    j["mean_bound"] = mean_bound;
    j["leakage_checked"] = leakage_checked;
    j["leakage_violations"] = leakage_violations;
    j["gate_checked"] = gate_checked;
    j["gate_violations"] = gate_violations;
    json eps = json::array();
    for (const auto& e : episodes) eps.push_back(episode_to_json(e, config.keep_traces));
    j["episodes"] = eps;
    return j;
}

std::string AggregateReport::serialize() const { return to_json().dump(2) + "\n"; }

std::vector<EntailmentRule> agent_rules_for(const DomainSchema& schema,
                                            const std::vector<std::string>& extra_rules) {
    std::vector<EntailmentRule> rules = schema.rules;
    for (const auto& line : extra_rules) {
        auto rule = parse_rule_line(line);
        for (const auto& [p, v] : rule.premises)
            if (!schema.find_predicate(p.name))
                throw SchemaError("extra rule uses undeclared predicate " + p.name);
        if (!schema.find_predicate(rule.conclusion.first.name))
            throw SchemaError("extra rule uses undeclared predicate " +
                              rule.conclusion.first.name);
        rules.push_back(std::move(rule));
    }
    return rules;
}

namespace {

EpisodeRecord run_one(const DomainSchema& schema, const std::vector<EntailmentRule>& rules,
                      const ExperimentConfig& cfg, int index) {
    Environment env(schema, cfg.env, cfg.oracle, Rng::derive(cfg.seed, 2 * index));
    SyntheticPredictor predictor(cfg.predictor, &env.hidden_truth(),
                                 Rng::derive(cfg.seed, 2 * index + 1));
    auto outcome = run_episode(env, schema, rules, predictor, cfg.controller);

    EpisodeRecord rec;
    rec.index = index;
    rec.success = outcome.success;
    rec.queries = outcome.queries_used;
    rec.rounds = outcome.replanning_rounds;
    rec.fail_reason = outcome.fail_reason;
    rec.commits = outcome.commits;
    rec.counterexamples = outcome.counterexamples;
    rec.predictor_counterexamples = outcome.predictor_counterexamples;
    auto leak = audit_no_leakage(outcome.trace);
    rec.leakage_checked = leak.checked;
    rec.leakage_violations = static_cast<int>(leak.violations.size());
    auto gate = audit_gate_semantics(outcome.trace);
    rec.gate_checked = gate.checked;
    rec.gate_violations = static_cast<int>(gate.violations.size());
    if (cfg.keep_traces) rec.trace = std::move(outcome.trace);
    return rec;
}

AggregateReport run_corpus_with_rules(const ExperimentConfig& cfg, const DomainSchema& schema,
                                      const std::vector<EntailmentRule>& rules) {
    AggregateReport report;
    report.config = cfg;
    report.episodes.resize(std::max(cfg.episodes, 0));

    int n_threads = std::clamp(cfg.threads, 1,
                               static_cast<int>(std::thread::hardware_concurrency() | 1));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < cfg.episodes; i = next.fetch_add(1))
            report.episodes[i] = run_one(schema, rules, cfg, i);
    };
    if (n_threads <= 1 || cfg.episodes <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    double bound_sum = 0.0;
    for (const auto& e : report.episodes) {
        report.successes += e.success ? 1 : 0;
        report.total_queries += e.queries;
        for (const auto& c : e.commits) {
            ++report.total_commits;
            if (!c.feasible_at_commit) ++report.infeasible_commits;
            bound_sum += c.bound;
        }
        report.leakage_checked += e.leakage_checked;
        report.leakage_violations += e.leakage_violations;
        report.gate_checked += e.gate_checked;
        report.gate_violations += e.gate_violations;
    }
    report.mean_bound = report.total_commits ? bound_sum / report.total_commits : 1.0;
    return report;
}

}  // namespace

AggregateReport run_corpus(const ExperimentConfig& cfg) {
    DomainSchema schema = make_schema(cfg.env);
    auto rules = agent_rules_for(schema, cfg.extra_rules);
    return run_corpus_with_rules(cfg, schema, rules);
}

json Theorem1Report::to_json() const {
    json j;
    j["commits"] = commits;
    j["feasible"] = feasible;
    j["empirical_rate"] = empirical_rate;
    j["mean_bound"] = mean_bound;
    j["mc_stderr"] = mc_stderr;
    j["conclusive"] = conclusive;
    j["holds"] = holds;
    return j;
}

Theorem1Report validate_theorem1(const AggregateReport& report) {
    Theorem1Report out;
    double bound_sum = 0.0;
    for (const auto& e : report.episodes) {
        for (const auto& c : e.commits) {
            ++out.commits;
            if (c.feasible_at_commit) ++out.feasible;
            bound_sum += c.bound;
        }
    }
    if (out.commits == 0) return out;
    out.empirical_rate = static_cast<double>(out.feasible) / out.commits;
    out.mean_bound = bound_sum / out.commits;
    out.mc_stderr = std::sqrt(std::max(out.empirical_rate * (1.0 - out.empirical_rate), 0.0) /
                              out.commits);
    out.conclusive = out.commits >= 100;
    out.holds = out.empirical_rate >= out.mean_bound - 3.0 * out.mc_stderr;
    return out;
}

SoundnessSweepResult soundness_sweep(const std::vector<EntailmentRule>& agent_rules) {
    SoundnessSweepResult result;
    DomainSchema schema = DomainSchema::micro();
    auto physics = ground_rules(schema.rules, schema);
    // Rules from richer domains may mention predicates the micro schema lacks;
    // those cannot fire here and are skipped.
    std::vector<EntailmentRule> applicable;
    for (const auto& r : agent_rules) {
        bool ok = true;
        auto check = [&](const PredicateId& p) {
            const auto* decl = schema.find_predicate(p.name);
            ok = ok && decl && decl->arg_types.size() == p.args.size();
        };
        for (const auto& [p, v] : r.premises) check(p);
        check(r.conclusion.first);
        if (ok) applicable.push_back(r);
    }
    auto grules = ground_rules(applicable, schema);

    auto objects = schema.objects_of_type("obj");
    auto containers = schema.objects_of_type("cont");

    // Base (non-derived) predicates with their mutex structure: each object is
    // in exactly one container, each container is open or closed.
    std::vector<PredicateId> base;
    for (const auto& c : containers) base.push_back(PredicateId{"open", {c}});
    const int n_worlds =
        static_cast<int>(std::pow(containers.size(), objects.size()) * (1 << containers.size()));

    std::vector<GoalConstraints> goals;
    for (const auto& o : objects) {
        for (const auto& c : containers)
            goals.push_back(GoalConstraints{{{PredicateId{"in", {o, c}}, true}}});
        goals.push_back(GoalConstraints{{{PredicateId{"reachable", {o}}, true}}});
    }

    GeneratorConfig gen_cfg;
    for (int world = 0; world < n_worlds; ++world) {
        // decode world id: container index per object, then open bits
        std::map<PredicateId, bool> truth;
        for (const auto& p : schema.ground_predicates()) truth[p] = false;
        int code = world;
        for (const auto& o : objects) {
            truth[PredicateId{"in", {o, containers[code % containers.size()]}}] = true;
            code /= static_cast<int>(containers.size());
        }
        for (const auto& c : containers) {
            truth[PredicateId{"open", {c}}] = code % 2;
            code /= 2;
        }
        std::set<PredicateId> closed;
        for (const auto& [p, v] : truth)
            if (v) closed.insert(p);
        close_state(closed, physics);
        for (auto& [p, v] : truth) v = closed.count(p) != 0;

        // observable (non-derived) predicates the grounding can include
        std::vector<PredicateId> observable;
        for (const auto& p : schema.ground_predicates())
            if (!schema.predicate_is_derived(p.name)) observable.push_back(p);

        for (const auto& goal : goals) {
            for (int mask = 0; mask < (1 << observable.size()); ++mask) {
                GroundedStore w;
                for (size_t b = 0; b < observable.size(); ++b)
                    if (mask & (1 << b))
                        w.set(observable[b], truth.at(observable[b]),
                              Provenance::InitialObservation);
                auto H = generate_hypotheses(w, goal, schema, grules, gen_cfg,
                                             gen_cfg.default_limit);
                for (const auto& h : H) {
                    ++result.checked;
                    auto verdict = verify(h, w, goal, schema, grules);
                    if (!verdict.passed) continue;
                    ++result.accepted;
                    if (!brute_force_feasible(h, truth, schema, physics, goal))
                        result.violations.push_back("world=" + std::to_string(world) +
                                                    " goal=" + goal.str() + " h=" + h.str());
                }
            }
        }
    }
    return result;
}

bool RefinementReport::non_decreasing() const {
    for (size_t i = 1; i < iterations.size(); ++i)
        if (iterations[i].success_rate < iterations[i - 1].success_rate) return false;
    return true;
}

bool RefinementReport::all_sweeps_ok() const {
    for (const auto& it : iterations)
        if (!it.sweep_ok) return false;
    return true;
}

json RefinementReport::to_json() const {
    json arr = json::array();
    for (const auto& it : iterations) {
        json j;
        j["iteration"] = it.iteration;
        j["success_rate"] = it.success_rate;
        j["counterexamples"] = it.counterexamples;
        j["disabled_rules"] = it.disabled_rules;
        j["noise_scale"] = it.noise_scale;
        j["sweep_ok"] = it.sweep_ok;
        arr.push_back(j);
    }
    json out;
    out["iterations"] = arr;
    out["non_decreasing"] = non_decreasing();
    return out;
}

RefinementReport run_refinement(ExperimentConfig cfg, int iterations,
                                const RepairConfig& repair_cfg,
                                const std::string& cx_log_path) {
    RefinementReport report;
    DomainSchema schema = make_schema(cfg.env);
    auto rules = agent_rules_for(schema, cfg.extra_rules);
    std::vector<std::string> disabled;

    for (int it = 0; it < iterations; ++it) {
        auto agg = run_corpus_with_rules(cfg, schema, rules);

        std::vector<Counterexample> cxs;
        std::vector<PredictorCounterexample> pcxs;
        for (const auto& e : agg.episodes) {
            cxs.insert(cxs.end(), e.counterexamples.begin(), e.counterexamples.end());
            pcxs.insert(pcxs.end(), e.predictor_counterexamples.begin(),
                        e.predictor_counterexamples.end());
        }
        if (!cx_log_path.empty()) {
            std::ofstream log(cx_log_path, std::ios::app);
            for (const auto& c : cxs) {
                json j = cx_to_json(c);
                j["iteration"] = it;
                log << j.dump() << "\n";
            }
        }

        auto repaired = repair(cxs, rules, GroundedStore{}, repair_cfg);
        rules = std::move(repaired.rules);
        for (const auto& id : repaired.disabled_rules)
            if (std::find(disabled.begin(), disabled.end(), id) == disabled.end())
                disabled.push_back(id);
        cfg.predictor = recalibrate(cfg.predictor, pcxs);

        RefinementIteration entry;
        entry.iteration = it;
        entry.success_rate = agg.success_rate();
        entry.counterexamples = static_cast<int>(cxs.size());
        entry.disabled_rules = disabled;
        entry.noise_scale = cfg.predictor.noise_scale;
        entry.sweep_ok = soundness_sweep(rules).ok();
        report.iterations.push_back(std::move(entry));
        report.reports.push_back(std::move(agg));
    }
    return report;
}

}  // namespace aec
