#include "aec/controller.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace aec {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::AEC: return "AEC";
        case Mode::Direct: return "Direct";
        case Mode::QueryOnly: return "QueryOnly";
        case Mode::NoVerification: return "NoVerification";
        case Mode::NoGating: return "NoGating";
    }
    return "?";
}

Mode mode_from_name(const std::string& name) {
    for (Mode m : {Mode::AEC, Mode::Direct, Mode::QueryOnly, Mode::NoVerification, Mode::NoGating})
        if (name == mode_name(m)) return m;
    throw std::invalid_argument("unknown mode: " + name);
}

PredicateId select_precondition(const std::set<PredicateId>& U,
                                const std::vector<Hypothesis>& H) {
    if (U.empty()) throw std::invalid_argument("select_precondition on empty set");
    const PredicateId* best = nullptr;
    long best_pairs = -1;
    long best_occ = -1;
    for (const auto& p : U) {
        long n1 = 0, n0 = 0;
        for (const auto& h : H) {
            auto it = h.expected.find(p);
            if (it == h.expected.end()) continue;
            (it->second ? n1 : n0) += 1;
        }
        long pairs = n1 * n0;
        long occ = n1 + n0;
        if (!best || std::tuple(pairs, occ) > std::tuple(best_pairs, best_occ) ||
            (pairs == best_pairs && occ == best_occ && p < *best)) {
            best = &p;
            best_pairs = pairs;
            best_occ = occ;
        }
    }
    return *best;
}

bool assert_no_leakage(const std::vector<TraceEvent>& trace) {
    return audit_no_leakage(trace).ok();
}

namespace {

// Per-episode working state shared by the helpers below.
struct EpisodeCtx {
    Environment& env;
    const DomainSchema& schema;
    const std::vector<GroundRule>& rules;
    const ControllerConfig& cfg;
    EpisodeOutcome& out;
    GroundedStore w;
    BeliefStore beliefs;
    std::vector<Hypothesis> H;
    int seq = 0;

    TraceEvent& emit(const std::string& kind) {
        TraceEvent e;
        e.seq = seq++;
        e.kind = kind;
        out.trace.push_back(std::move(e));
        return out.trace.back();
    }

    void filter_on(const PredicateId& p, bool v) {
        bool mentioned = false;
        for (const auto& h : H) mentioned = mentioned || h.expected.count(p);
        if (!mentioned) return;
        auto before = H.size();
        H = filter_hypotheses(std::move(H), p, v);
        emit("filter")
            .add("p", p.str())
            .add("v", v)
            .add("before", static_cast<int>(before))
            .add("after", static_cast<int>(H.size()));
    }

    // Belief eviction plus predictor-counterexample collection for a
    // newly grounded predicate.
    void evict_belief(const PredicateId& p, bool actual) {
        auto b = beliefs.get(p);
        if (!b) return;
        out.predictor_counterexamples.push_back(
            PredictorCounterexample{p, b->discretized_value, actual, b->uncertainty});
        beliefs.erase(p);
    }

    // Detects contradictions with prior grounded evidence before the new fact
    // lands (the evidence-override policy: latest external evidence wins).
    void note_conflict(const PredicateId& p, bool incoming, Provenance prov) {
        auto prev = w.value_of(p);
        if (!prev || *prev == incoming) return;
        out.counterexamples.push_back(Counterexample{CounterexampleKind::GroundingConflict, p,
                                                     *prev, incoming, {}, prov});
        emit("conflict").add("p", p.str()).add("old", *prev).add("new", incoming);
    }

    void absorb_query(const PredicateId& p, const QueryOutcome& q) {
        note_conflict(p, q.value, Provenance::QueryResult);
        for (const auto& f : q.delta) note_conflict(f.predicate, f.value, f.provenance);
        evict_belief(p, q.value);
        for (const auto& f : q.delta) evict_belief(f.predicate, f.value);
        w = ground_update(w, p, q.value, q.delta, /*evidence_override=*/true);
        filter_on(p, q.value);
        for (const auto& f : q.delta) filter_on(f.predicate, f.value);
    }

    void absorb_feedback(const std::vector<GroundedFact>& facts) {
        for (const auto& f : facts) {
            note_conflict(f.predicate, f.value, f.provenance);
            evict_belief(f.predicate, f.value);
            w.set(f.predicate, f.value, f.provenance);
            filter_on(f.predicate, f.value);
        }
    }

    // Wrapper query outside the gated loop (uncovered preconditions, forced).
    void targeted_query(const PredicateId& p, int& qbudget, const char* why) {
        auto q = env.query(p);
        --qbudget;
        ++out.queries_used;
        emit("query")
            .add("p", p.str())
            .add("v", q.value)
            .add("delta", fact_list_str(q.delta))
            .add("forced", true)
            .add("why", why)
            .add("budget", qbudget);
        absorb_query(p, q);
    }

    // Attributes an observed contradiction of (p -> expected) to its evidence
    // source in the committed verdict.
    void attribute(const PredicateId& p, bool expected, bool observed, const Verdict& verdict,
                   bool gated) {
        Counterexample cx;
        cx.predicate = p;
        cx.expected = expected;
        cx.observed = observed;
        cx.kind = CounterexampleKind::ExecutionContradiction;
        if (gated) {
            for (const auto& e : verdict.audit) {
                if (!e.predicate || *e.predicate != p || !e.passed) continue;
                if (e.evidence == "entailed") {
                    cx.kind = CounterexampleKind::EntailmentContradiction;
                    cx.rule_ids = e.rule_support;
                } else if (e.evidence == "grounded" &&
                           w.provenance_of(p) == Provenance::QueryResult) {
                    cx.kind = CounterexampleKind::GroundingConflict;
                }
                break;
            }
        }
        out.counterexamples.push_back(std::move(cx));
    }
};

// Expected value of p under the committed hypothesis/goal, for query-target
// expansion of unresolved predicates.
bool desired_value(const PredicateId& p, const Hypothesis& h, const GoalConstraints& goal,
                   const DomainSchema& schema) {
    auto it = h.expected.find(p);
    if (it != h.expected.end()) return it->second;
    for (const auto& [g, req] : goal.required)
        if (g == p) return req;
    for (const auto& a : h.plan) {
        auto inst = schema.instantiate(a);
        for (const auto& [q, req] : inst.preconditions)
            if (q == p) return req;
    }
    return true;
}

const char* kind_name(CounterexampleKind k) {
    switch (k) {
        case CounterexampleKind::EntailmentContradiction: return "entailment";
        case CounterexampleKind::GroundingConflict: return "grounding";
        case CounterexampleKind::ExecutionContradiction: return "execution";
    }
    return "?";
}

}  // namespace

EpisodeOutcome run_episode(Environment& env, const DomainSchema& schema,
                           const std::vector<EntailmentRule>& agent_rules,
                           SyntheticPredictor& predictor, const ControllerConfig& cfg) {
    EpisodeOutcome out;
    auto grules = ground_rules(agent_rules, schema);
    EpisodeCtx ctx{env, schema, grules, cfg, out};
    const GoalConstraints& goal = env.goal();
    ctx.w = env.initial_grounding();
    const auto w0_dom = ctx.w.domain();

    ctx.emit("episode_start")
        .add("mode", mode_name(cfg.mode))
        .add("goal", goal.str())
        .add("w0", predicate_list_str(w0_dom));

    const bool gated = cfg.mode != Mode::Direct && cfg.mode != Mode::NoVerification;
    int round = 0;
    for (; round <= cfg.replan_cap; ++round) {
        // Goal already entailed by grounded evidence (e.g. established by query
        // side effects): commit the empty plan.
        Hypothesis empty;
        empty.id = "h-empty";
        auto egoal = verify(empty, ctx.w, goal, schema, grules);
        if (egoal.passed) {
            ctx.emit("verify")
                .add("h", empty.id)
                .add("passed", true)
                .add("winput", predicate_list_str(ctx.w.domain()))
                .add("beliefdom", predicate_list_str(ctx.beliefs.domain()));
            CommitRecord rec;
            rec.hypothesis_id = empty.id;
            rec.round = round;
            for (const auto& p : ctx.w.domain())
                if (!w0_dom.count(p)) rec.grounded_after_init.push_back(p);
            double eps_sum = 0.0;
            for (const auto& p : rec.grounded_after_init) eps_sum += env.oracle().error_for(p);
            rec.bound = 1.0 - eps_sum;
            rec.feasible_at_commit =
                brute_force_feasible(empty, env.hidden_truth(), schema, env.physics(), goal);
            std::set<PredicateId> q_set(rec.grounded_after_init.begin(),
                                        rec.grounded_after_init.end());
            out.commits.push_back(rec);
            out.committed.push_back(empty.id);
            ctx.emit("commit")
                .add("h", empty.id)
                .add("verified", true)
                .add("q", predicate_list_str(q_set))
                .add("bound", rec.bound);
            if (env.goal_holds_in_truth()) {
                out.success = true;
                ctx.emit("success").add("round", round);
                break;
            }
            auto fb = env.goal_feedback();
            for (const auto& f : fb) {
                bool required = true;
                for (const auto& [g, req] : goal.required)
                    if (g == f.predicate) required = req;
                if (f.value != required)
                    ctx.attribute(f.predicate, required, f.value, egoal, true);
            }
            ctx.absorb_feedback(fb);
            ctx.emit("replan").add("round", round).add("reason", "goal-unsatisfied");
            continue;
        }

        ctx.H = generate_hypotheses(ctx.w, goal, schema, grules, cfg.generator,
                                    cfg.generator.default_limit);
        ctx.beliefs = BeliefStore{};
        ctx.emit("generate").add("round", round).add("count", static_cast<int>(ctx.H.size()));
        if (ctx.H.empty()) {
            out.fail_reason = "no-hypotheses";
            break;
        }

        int qbudget = cfg.max_queries;
        if (cfg.mode != Mode::Direct) {
            auto U = union_unresolved({ctx.w, ctx.beliefs, ctx.H});
            while (!U.empty() && qbudget > 0 && !ctx.H.empty() && !env.budget_exhausted()) {
                PredicateId p = select_precondition(U, ctx.H);
                bool forced = false;
                bool do_query = false;
                Prediction pred;
                bool have_pred = false;
                if (cfg.mode == Mode::QueryOnly) {
                    do_query = true;
                    forced = true;
                } else {
                    pred = predictor.predict(ctx.w, p);
                    have_pred = true;
                    ctx.emit("predict")
                        .add("p", p.str())
                        .add("mu", pred.mu)
                        .add("sigma", pred.sigma)
                        .add("winput", predicate_list_str(ctx.w.domain()))
                        .add("beliefdom", predicate_list_str(ctx.beliefs.domain()));
                    if (cfg.mode == Mode::NoGating) {
                        do_query = false;  // gate replaced by always-simulate
                        forced = true;
                    } else {
                        bool ambiguous = std::abs(pred.mu - 0.5) < cfg.epsilon;
                        do_query = ambiguous || pred.sigma > cfg.tau;
                    }
                }
                if (do_query) {
                    auto q = env.query(p);
                    --qbudget;
                    ++out.queries_used;
                    auto& e = ctx.emit("query")
                                  .add("p", p.str())
                                  .add("v", q.value)
                                  .add("delta", fact_list_str(q.delta))
                                  .add("forced", forced)
                                  .add("budget", qbudget);
                    if (have_pred)
                        e.add("mu", pred.mu)
                            .add("sigma", pred.sigma)
                            .add("eps", cfg.epsilon)
                            .add("tau", cfg.tau);
                    ctx.absorb_query(p, q);
                } else {
                    bool v_hat = pred.mu >= 0.5;
                    ctx.beliefs = insert_belief(ctx.beliefs, ctx.w, p, v_hat, pred.sigma);
                    ctx.emit("simulate")
                        .add("p", p.str())
                        .add("vhat", v_hat)
                        .add("mu", pred.mu)
                        .add("sigma", pred.sigma)
                        .add("eps", cfg.epsilon)
                        .add("tau", cfg.tau)
                        .add("forced", forced);
                    ctx.filter_on(p, v_hat);
                }
                U = union_unresolved({ctx.w, ctx.beliefs, ctx.H});
            }
        }

        if (ctx.H.empty()) {
            ctx.emit("replan").add("round", round).add("reason", "hypotheses-exhausted");
            continue;
        }
        const Hypothesis* h_star = best_hypothesis(ctx.H);
        Verdict verdict;
        if (gated) {
            verdict = verify(*h_star, ctx.w, goal, schema, grules);
            ctx.emit("verify")
                .add("h", h_star->id)
                .add("passed", verdict.passed)
                .add("winput", predicate_list_str(ctx.w.domain()))
                .add("beliefdom", predicate_list_str(ctx.beliefs.domain()));
            // Uncovered preconditions with budget left trigger targeted
            // queries before giving up on the round. Unresolved derived
            // predicates are resolved through their unknown base premises.
            while (!verdict.passed && qbudget > 0 && !env.budget_exhausted()) {
                auto uncovered = verdict.uncovered();
                if (uncovered.empty()) break;
                size_t grounded_before = ctx.w.size();
                // absorb_query may filter ctx.H and invalidate h_star
                const Hypothesis snapshot = *h_star;
                for (const auto& p : uncovered) {
                    bool want = desired_value(p, snapshot, goal, schema);
                    for (const auto& t : expand_query_targets(p, want, ctx.w, grules)) {
                        if (qbudget <= 0 || env.budget_exhausted()) break;
                        if (ctx.w.contains(t)) continue;
                        ctx.targeted_query(t, qbudget, "uncovered");
                    }
                }
                if (ctx.w.size() == grounded_before) break;  // no progress possible
                if (ctx.H.empty()) break;
                h_star = best_hypothesis(ctx.H);
                verdict = verify(*h_star, ctx.w, goal, schema, grules);
                ctx.emit("verify")
                    .add("h", h_star->id)
                    .add("passed", verdict.passed)
                    .add("winput", predicate_list_str(ctx.w.domain()))
                    .add("beliefdom", predicate_list_str(ctx.beliefs.domain()));
            }
            if (ctx.H.empty()) {
                ctx.emit("replan").add("round", round).add("reason", "hypotheses-exhausted");
                continue;
            }
            if (!verdict.passed) {
                ctx.emit("replan").add("round", round).add("reason", "verifier-reject");
                continue;
            }
        } else {
            verdict.passed = true;
        }

        // Commit. Q and the feasibility oracle snapshot are instrumentation
        // for the feasibility-bound accounting; the controller takes no decisions from
        // them.
        Hypothesis committed = *h_star;
        CommitRecord rec;
        rec.hypothesis_id = committed.id;
        rec.round = round;
        for (const auto& p : ctx.w.domain())
            if (!w0_dom.count(p)) rec.grounded_after_init.push_back(p);
        double eps_sum = 0.0;
        for (const auto& p : rec.grounded_after_init) eps_sum += env.oracle().error_for(p);
        rec.bound = 1.0 - eps_sum;
        rec.feasible_at_commit =
            brute_force_feasible(committed, env.hidden_truth(), schema, env.physics(), goal);
        out.commits.push_back(rec);
        out.committed.push_back(committed.id);
        std::set<PredicateId> q_set(rec.grounded_after_init.begin(),
                                    rec.grounded_after_init.end());
        ctx.emit("commit")
            .add("h", committed.id)
            .add("verified", gated)
            .add("q", predicate_list_str(q_set))
            .add("bound", rec.bound);

        // Execute with the replanning monitor.
        bool replan = false;
        bool aborted = false;
        for (size_t i = 0; i < committed.plan.size(); ++i) {
            if (env.budget_exhausted()) {
                out.fail_reason = "step-budget";
                aborted = true;
                break;
            }
            const auto& action = committed.plan[i];
            auto res = env.execute_action(action);
            ctx.emit("execute")
                .add("a", action.str())
                .add("success", res.success)
                .add("feedback", fact_list_str(res.feedback));
            if (!res.success) {
                const auto& violated = res.feedback.front();
                auto inst = schema.instantiate(action);
                bool required = true;
                for (const auto& [p, req] : inst.preconditions)
                    if (p == violated.predicate) required = req;
                ctx.attribute(violated.predicate, required, violated.value, verdict, gated);
                ctx.absorb_feedback(res.feedback);
                ctx.emit("replan")
                    .add("round", round)
                    .add("reason", "execution-failure")
                    .add("kind", kind_name(out.counterexamples.back().kind));
                replan = true;
                break;
            }
            ctx.absorb_feedback(res.feedback);
            // Monitor: grounded counterevidence against a remaining-plan
            // precondition (not re-established by intervening effects).
            GroundedStore lookahead = ctx.w;
            for (size_t j = i + 1; j < committed.plan.size() && !replan; ++j) {
                auto later = schema.instantiate(committed.plan[j]);
                for (const auto& [p, req] : later.preconditions) {
                    auto v = lookahead.value_of(p);
                    if (v && *v != req) {
                        ctx.attribute(p, req, *v, verdict, gated);
                        ctx.emit("replan")
                            .add("round", round)
                            .add("reason", "grounded-contradiction")
                            .add("p", p.str());
                        replan = true;
                        break;
                    }
                }
                for (const auto& p : later.add_effects)
                    lookahead.set(p, true, Provenance::SymbolicEffect);
                for (const auto& p : later.delete_effects)
                    lookahead.set(p, false, Provenance::SymbolicEffect);
            }
            if (replan) break;
        }
        if (aborted) break;
        if (replan) continue;

        if (env.goal_holds_in_truth()) {
            out.success = true;
            ctx.emit("success").add("round", round);
            break;
        }
        // Terminal contradiction: the task-completion signal grounds the goal
        // literals' true values.
        auto fb = env.goal_feedback();
        for (const auto& f : fb) {
            bool required = true;
            for (const auto& [g, req] : goal.required)
                if (g == f.predicate) required = req;
            if (f.value != required) ctx.attribute(f.predicate, required, f.value, verdict, gated);
        }
        ctx.absorb_feedback(fb);
        ctx.emit("replan").add("round", round).add("reason", "goal-unsatisfied");
    }

    if (!out.success && out.fail_reason.empty())
        out.fail_reason = round > cfg.replan_cap ? "replan-cap" : out.fail_reason;
    if (!out.success && out.fail_reason.empty()) out.fail_reason = "unknown";
    out.replanning_rounds = out.success ? std::min(round, cfg.replan_cap) : cfg.replan_cap;
    if (!out.success) ctx.emit("fail").add("reason", out.fail_reason);
    out.final_state = ctx.w;
    return out;
}

}  // namespace aec
