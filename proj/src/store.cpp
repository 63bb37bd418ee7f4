#include "aec/store.hpp"

namespace aec {

const char* provenance_code(Provenance p) {
    switch (p) {
        case Provenance::InitialObservation: return "init";
        case Provenance::QueryResult: return "query";
        case Provenance::ExecutionFeedback: return "exec";
        case Provenance::QuerySideEffect: return "side";
        case Provenance::SymbolicEffect: return "sym";
    }
    return "?";
}

std::optional<Provenance> provenance_from_code(std::string_view code) {
    if (code == "init") return Provenance::InitialObservation;
    if (code == "query") return Provenance::QueryResult;
    if (code == "exec") return Provenance::ExecutionFeedback;
    if (code == "side") return Provenance::QuerySideEffect;
    if (code == "sym") return Provenance::SymbolicEffect;
    return std::nullopt;
}

std::optional<bool> GroundedStore::value_of(const PredicateId& p) const {
    auto it = facts_.find(p);
    if (it == facts_.end()) return std::nullopt;
    return it->second.value;
}

std::optional<Provenance> GroundedStore::provenance_of(const PredicateId& p) const {
    auto it = facts_.find(p);
    if (it == facts_.end()) return std::nullopt;
    return it->second.provenance;
}

void GroundedStore::set(const PredicateId& p, bool v, Provenance prov) {
    facts_[p] = GroundedFact{p, v, prov};
}

std::set<PredicateId> GroundedStore::domain() const {
    std::set<PredicateId> out;
    for (const auto& [p, f] : facts_) out.insert(p);
    return out;
}

namespace {

void ground_one(GroundedStore& store, const PredicateId& p, bool v, Provenance prov,
                bool evidence_override) {
    auto existing = store.value_of(p);
    if (existing && *existing != v) {
        if (!evidence_override && store.provenance_of(p) == Provenance::QueryResult)
            throw GroundingConflictError(p, *existing, v);
        store.set(p, v, prov);
        return;
    }
    // Same value (or new): insert; same-value re-grounding upgrades provenance
    // to the stronger evidence source.
    store.set(p, v, prov);
}

}  // namespace

GroundedStore ground_update(GroundedStore store, const PredicateId& p, bool v,
                            const std::vector<GroundedFact>& delta, bool evidence_override) {
    ground_one(store, p, v, Provenance::QueryResult, evidence_override);
    for (const auto& f : delta)
        ground_one(store, f.predicate, f.value, f.provenance, evidence_override);
    return store;
}

std::optional<Belief> BeliefStore::get(const PredicateId& p) const {
    auto it = beliefs_.find(p);
    if (it == beliefs_.end()) return std::nullopt;
    return it->second;
}

std::set<PredicateId> BeliefStore::domain() const {
    std::set<PredicateId> out;
    for (const auto& [p, b] : beliefs_) out.insert(p);
    return out;
}

BeliefStore insert_belief(BeliefStore store, const GroundedStore& grounded,
                          const PredicateId& p, bool v_hat, double sigma) {
    if (grounded.contains(p))
        throw std::logic_error("belief insert on grounded predicate " + p.str());
    if (sigma < 0.0 || sigma > 1.0)
        throw std::invalid_argument("uncertainty out of [0,1] for " + p.str());
    store.beliefs_[p] = Belief{p, v_hat, sigma};
    return store;
}

}  // namespace aec
