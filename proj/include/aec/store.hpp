#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "aec/predicate.hpp"

namespace aec {

// Evidence source for a grounded fact. SymbolicEffect marks facts produced by
// symbolic plan application during verification; everything else is external
// evidence.
enum class Provenance {
    InitialObservation,
    QueryResult,
    ExecutionFeedback,
    QuerySideEffect,
    SymbolicEffect,
};

const char* provenance_code(Provenance p);  // short code used in traces
std::optional<Provenance> provenance_from_code(std::string_view code);

struct GroundedFact {
    PredicateId predicate;
    bool value = false;
    Provenance provenance = Provenance::InitialObservation;

    bool operator==(const GroundedFact&) const = default;
};

// Thrown when a grounding event contradicts an existing QueryResult fact and
// evidence override is disabled. Signals a grounder/oracle inconsistency that
// the repair policy must handle.
struct GroundingConflictError : std::runtime_error {
    PredicateId predicate;
    bool existing_value;
    bool incoming_value;
    GroundingConflictError(PredicateId p, bool existing, bool incoming)
        : std::runtime_error("grounding conflict on " + p.str()),
          predicate(std::move(p)),
          existing_value(existing),
          incoming_value(incoming) {}
};

// The grounded fact store w: externally supported predicate assignments only.
// Predicates absent from the domain are unknown, never assumed false.
class GroundedStore {
public:
    bool contains(const PredicateId& p) const { return facts_.count(p) != 0; }
    std::optional<bool> value_of(const PredicateId& p) const;
    std::optional<Provenance> provenance_of(const PredicateId& p) const;

    // Raw insert/overwrite; use ground_update for query-driven updates.
    void set(const PredicateId& p, bool v, Provenance prov);

    size_t size() const { return facts_.size(); }
    std::set<PredicateId> domain() const;
    const std::map<PredicateId, GroundedFact>& facts() const { return facts_; }

    bool operator==(const GroundedStore&) const = default;

private:
    std::map<PredicateId, GroundedFact> facts_;
};

// Folds a query outcome into the store. The queried value gets QueryResult
// provenance; delta facts keep the provenance they carry (QuerySideEffect for
// query revelations). Re-grounding with the same value upgrades provenance;
// contradicting a prior QueryResult throws unless evidence_override is set.
GroundedStore ground_update(GroundedStore store, const PredicateId& p, bool v,
                            const std::vector<GroundedFact>& delta,
                            bool evidence_override = false);

struct Belief {
    PredicateId predicate;
    bool discretized_value = false;
    double uncertainty = 0.0;  // sigma in [0,1]

    bool operator==(const Belief&) const = default;
};

// The belief store w-hat: model predictions only, disjoint from the grounded
// domain at every controller step.
class BeliefStore {
public:
    bool contains(const PredicateId& p) const { return beliefs_.count(p) != 0; }
    std::optional<Belief> get(const PredicateId& p) const;
    void erase(const PredicateId& p) { beliefs_.erase(p); }
    size_t size() const { return beliefs_.size(); }
    std::set<PredicateId> domain() const;
    const std::map<PredicateId, Belief>& beliefs() const { return beliefs_; }

    bool operator==(const BeliefStore&) const = default;

    friend BeliefStore insert_belief(BeliefStore store, const GroundedStore& grounded,
                                     const PredicateId& p, bool v_hat, double sigma);

private:
    std::map<PredicateId, Belief> beliefs_;
};

// Inserting a belief for a grounded predicate is a programming error (the dual
// of belief leakage) and throws std::logic_error. Re-insertion overwrites.
BeliefStore insert_belief(BeliefStore store, const GroundedStore& grounded,
                          const PredicateId& p, bool v_hat, double sigma);

}  // namespace aec
