#include "aec/environment.hpp"

#include <algorithm>
#include <stdexcept>

namespace aec {

double OracleConfig::error_for(const PredicateId& p) const {
    auto it = per_predicate.find(p.name);
    if (it != per_predicate.end()) return it->second;
    return default_error;
}

DomainSchema make_schema(const EnvInstanceConfig& cfg) {
    if (cfg.domain == "micro") return DomainSchema::micro();
    if (cfg.domain == "household") return DomainSchema::household(cfg.n_objects, cfg.n_boxes);
    throw std::invalid_argument("unknown domain: " + cfg.domain);
}

Environment::Environment(const DomainSchema& schema, EnvInstanceConfig cfg, OracleConfig oracle,
                         uint64_t seed)
    : schema_(schema), cfg_(std::move(cfg)), oracle_(std::move(oracle)), rng_(seed) {
    physics_ = ground_rules(schema_.rules, schema_);
    sample_world();
    sample_goal();
}

void Environment::sample_world() {
    for (const auto& p : schema_.ground_predicates()) truth_[p] = false;

    auto objects = schema_.objects_of_type("obj");
    auto containers = schema_.objects_of_type("cont");
    for (const auto& o : objects) {
        const auto& c = containers[rng_.below(containers.size())];
        truth_[PredicateId{"in", {o, c}}] = true;
    }
    for (const auto& c : containers)
        truth_[PredicateId{"open", {c}}] = rng_.bernoulli(cfg_.open_fraction);
    if (cfg_.domain == "household") {
        for (const auto& o : objects)
            truth_[PredicateId{"clean", {o}}] = rng_.bernoulli(0.3);
    }
    set_hidden_truth(truth_);
}

void Environment::set_hidden_truth(const std::map<PredicateId, bool>& truth) {
    truth_ = truth;
    std::set<PredicateId> state;
    for (const auto& [p, v] : truth_)
        if (v) state.insert(p);
    close_state(state, physics_);
    for (auto& [p, v] : truth_) v = state.count(p) != 0;
}

void Environment::sample_goal() {
    auto objects = schema_.objects_of_type("obj");
    auto containers = schema_.objects_of_type("cont");
    const auto& o = objects[rng_.below(objects.size())];

    GoalConstraints goal;
    if (cfg_.domain == "micro" && rng_.bernoulli(0.25)) {
        // reachability goal; falls through to a relocation goal if already met
        PredicateId reach{"reachable", {o}};
        if (!truth_.at(reach)) {
            goal.required.push_back({reach, true});
            goal_ = goal;
            return;
        }
    }
    // relocation goal: move o somewhere it is not
    std::vector<std::string> targets;
    for (const auto& c : containers)
        if (!truth_.at(PredicateId{"in", {o, c}})) targets.push_back(c);
    const auto& target = targets[rng_.below(targets.size())];
    goal.required.push_back({PredicateId{"in", {o, target}}, true});

    if (cfg_.domain == "household") {
        double r = rng_.uniform();
        if (r < 0.35 && !truth_.at(PredicateId{"clean", {o}}))
            goal.required.push_back({PredicateId{"clean", {o}}, true});
        else if (r < 0.55 && !truth_.at(PredicateId{"cold", {o}}))
            goal.required.push_back({PredicateId{"cold", {o}}, true});
    }
    goal_ = goal;
}

GroundedStore Environment::initial_grounding() {
    GroundedStore w0;
    auto objects = schema_.objects_of_type("obj");
    auto containers = schema_.objects_of_type("cont");
    // container open/closed states are surface-visible
    for (const auto& c : containers) {
        PredicateId p{"open", {c}};
        w0.set(p, truth_.at(p), Provenance::InitialObservation);
    }
    // contents of open containers are fully visible (incl. absences)
    for (const auto& c : containers) {
        if (!truth_.at(PredicateId{"open", {c}})) continue;
        for (const auto& o : objects) {
            PredicateId p{"in", {o, c}};
            w0.set(p, truth_.at(p), Provenance::InitialObservation);
        }
    }
    // attributes of visible objects, per visibility rule
    if (cfg_.domain == "household") {
        for (const auto& o : objects) {
            bool visible = false;
            for (const auto& c : containers)
                if (truth_.at(PredicateId{"open", {c}}) && truth_.at(PredicateId{"in", {o, c}}))
                    visible = true;
            if (!visible) continue;
            for (const char* attr : {"clean", "cold"}) {
                if (!rng_.bernoulli(cfg_.attribute_visibility)) continue;
                PredicateId p{attr, {o}};
                w0.set(p, truth_.at(p), Provenance::InitialObservation);
            }
        }
    }
    return w0;
}

bool Environment::queried_value(const PredicateId& p) {
    if (oracle_.persistent_flips) {
        auto it = flip_memory_.find(p);
        if (it != flip_memory_.end()) return it->second;
    }
    bool v = truth_.at(p);
    if (rng_.bernoulli(oracle_.error_for(p))) v = !v;
    if (oracle_.persistent_flips) flip_memory_[p] = v;
    return v;
}

std::vector<GroundedFact> Environment::container_contents(const std::string& c, Provenance prov,
                                                          bool inject_errors) {
    std::vector<GroundedFact> out;
    for (const auto& o : schema_.objects_of_type("obj")) {
        PredicateId p{"in", {o, c}};
        bool v = truth_.at(p);
        if (inject_errors && rng_.bernoulli(oracle_.error_for(p))) v = !v;
        out.push_back(GroundedFact{p, v, prov});
    }
    return out;
}

void Environment::apply_truth_effects(const std::vector<PredicateId>& adds,
                                      const std::vector<PredicateId>& dels) {
    std::set<PredicateId> state;
    for (const auto& [p, v] : truth_)
        if (v) state.insert(p);
    for (const auto& p : adds) state.insert(p);
    for (const auto& p : dels) state.erase(p);
    close_state(state, physics_);
    for (auto& [p, v] : truth_) v = state.count(p) != 0;
}

QueryOutcome Environment::query(const PredicateId& p) {
    if (!schema_.well_typed(p)) throw std::invalid_argument("query of undeclared " + p.str());
    QueryOutcome out;
    out.steps = 1;
    steps_used_ += out.steps;

    // Inspecting the contents of a closed container opens it: the hidden
    // world changes irreversibly and the whole container is revealed.
    if (p.name == "in") {
        const auto& c = p.args[1];
        PredicateId open_p{"open", {c}};
        if (!truth_.at(open_p)) {
            apply_truth_effects({open_p}, {});
            out.delta.push_back(GroundedFact{open_p, true, Provenance::QuerySideEffect});
            for (auto& f : container_contents(c, Provenance::QuerySideEffect,
                                              oracle_.side_effect_errors))
                if (f.predicate != p) out.delta.push_back(std::move(f));
        }
    }
    out.value = queried_value(p);
    return out;
}

ExecOutcome Environment::execute_action(const GroundAction& a) {
    auto inst = schema_.instantiate(a);
    ExecOutcome out;
    out.steps = 1;
    steps_used_ += out.steps;
    for (const auto& [p, req] : inst.preconditions) {
        if (truth_.at(p) != req) {
            out.success = false;
            out.feedback.push_back(GroundedFact{p, truth_.at(p), Provenance::ExecutionFeedback});
            return out;
        }
    }
    apply_truth_effects(inst.add_effects, inst.delete_effects);
    out.success = true;
    for (const auto& p : inst.add_effects)
        out.feedback.push_back(GroundedFact{p, true, Provenance::ExecutionFeedback});
    for (const auto& p : inst.delete_effects)
        out.feedback.push_back(GroundedFact{p, false, Provenance::ExecutionFeedback});
    // opening a container reveals its contents
    if (a.action == "open_box")
        for (auto& f : container_contents(a.args[0], Provenance::ExecutionFeedback, false))
            out.feedback.push_back(std::move(f));
    return out;
}

std::vector<GroundedFact> Environment::goal_feedback() const {
    std::vector<GroundedFact> out;
    for (const auto& [g, req] : goal_.required)
        out.push_back(GroundedFact{g, truth_.at(g), Provenance::ExecutionFeedback});
    return out;
}

bool Environment::goal_holds_in_truth() const {
    for (const auto& [g, req] : goal_.required)
        if (truth_.at(g) != req) return false;
    return true;
}

}  // namespace aec
