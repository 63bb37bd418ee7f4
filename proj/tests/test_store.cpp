#include <set>
#include <vector>

#include "doctest.h"

#include "aec/rng.hpp"
#include "aec/store.hpp"

using namespace aec;

namespace {
PredicateId pid(const std::string& s) { return PredicateId::parse(s); }
}  // namespace

TEST_CASE("grounded store basics: absent predicates are unknown") {
    GroundedStore w;
    CHECK_FALSE(w.contains(pid("open(c1)")));
    CHECK_FALSE(w.value_of(pid("open(c1)")).has_value());  // unknown, not false
    w.set(pid("open(c1)"), false, Provenance::InitialObservation);
    CHECK(w.contains(pid("open(c1)")));
    CHECK(w.value_of(pid("open(c1)")) == false);
    CHECK(w.size() == 1);
}

TEST_CASE("ground_update unions the queried value and side-effect delta") {
    GroundedStore w;
    std::vector<GroundedFact> delta{{pid("in(o2,c1)"), false, Provenance::QuerySideEffect}};
    auto w2 = ground_update(w, pid("in(o1,c1)"), true, delta);
    CHECK(w2.size() == 2);
    CHECK(w2.value_of(pid("in(o1,c1)")) == true);
    CHECK(w2.provenance_of(pid("in(o1,c1)")) == Provenance::QueryResult);
    CHECK(w2.value_of(pid("in(o2,c1)")) == false);
    CHECK(w2.provenance_of(pid("in(o2,c1)")) == Provenance::QuerySideEffect);
}

TEST_CASE("ground_update with empty delta grows the store by one fact") {
    GroundedStore w;
    w.set(pid("open(c1)"), true, Provenance::InitialObservation);
    auto w2 = ground_update(w, pid("open(c2)"), false, {});
    CHECK(w2.size() == w.size() + 1);
}

TEST_CASE("re-grounding the same value upgrades provenance only") {
    GroundedStore w;
    w.set(pid("in(o1,c1)"), true, Provenance::InitialObservation);
    auto w2 = ground_update(w, pid("in(o1,c1)"), true, {});
    CHECK(w2.size() == 1);
    CHECK(w2.value_of(pid("in(o1,c1)")) == true);  // value unchanged
    CHECK(w2.provenance_of(pid("in(o1,c1)")) == Provenance::QueryResult);
}

TEST_CASE("contradicting a prior query result throws unless overridden") {
    GroundedStore w;
    w.set(pid("in(o1,c1)"), true, Provenance::QueryResult);
    CHECK_THROWS_AS(ground_update(w, pid("in(o1,c1)"), false, {}), GroundingConflictError);
    auto w2 = ground_update(w, pid("in(o1,c1)"), false, {}, /*evidence_override=*/true);
    CHECK(w2.value_of(pid("in(o1,c1)")) == false);
    CHECK(w2.size() == 1);  // domain never shrinks, value replaced in place
}

TEST_CASE("conflict error carries the disputed predicate and values") {
    GroundedStore w;
    w.set(pid("open(c1)"), false, Provenance::QueryResult);
    try {
        ground_update(w, pid("open(c1)"), true, {});
        FAIL("expected GroundingConflictError");
    } catch (const GroundingConflictError& e) {
        CHECK(e.predicate == pid("open(c1)"));
        CHECK(e.existing_value == false);
        CHECK(e.incoming_value == true);
    }
}

TEST_CASE("insert_belief basics and overwrite semantics") {
    GroundedStore w;
    BeliefStore b;
    b = insert_belief(b, w, pid("in(o1,c1)"), true, 0.1);
    CHECK(b.size() == 1);
    CHECK(b.get(pid("in(o1,c1)"))->discretized_value == true);
    CHECK(b.get(pid("in(o1,c1)"))->uncertainty == 0.1);

    b = insert_belief(b, w, pid("in(o1,c1)"), false, 0.2);  // latest prediction wins
    CHECK(b.size() == 1);
    CHECK(b.get(pid("in(o1,c1)"))->discretized_value == false);
    CHECK(b.get(pid("in(o1,c1)"))->uncertainty == 0.2);
}

TEST_CASE("inserting a belief on a grounded predicate is a loud error") {
    GroundedStore w;
    w.set(pid("in(o1,c1)"), true, Provenance::QueryResult);
    BeliefStore b;
    CHECK_THROWS_AS(insert_belief(b, w, pid("in(o1,c1)"), true, 0.1), std::logic_error);
}

TEST_CASE("provenance codes round-trip") {
    for (auto p : {Provenance::InitialObservation, Provenance::QueryResult,
                   Provenance::ExecutionFeedback, Provenance::QuerySideEffect,
                   Provenance::SymbolicEffect}) {
        auto back = provenance_from_code(provenance_code(p));
        REQUIRE(back.has_value());
        CHECK(*back == p);
    }
    CHECK_FALSE(provenance_from_code("nope").has_value());
}

TEST_CASE("grounding is monotone under random update sequences") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        GroundedStore w;
        size_t prev = 0;
        for (int step = 0; step < 40; ++step) {
            PredicateId p{"p" + std::to_string(rng.below(10)), {}};
            bool v = rng.bernoulli(0.5);
            w = ground_update(w, p, v, {}, /*evidence_override=*/true);
            CHECK(w.size() >= prev);  // |dom(w)| never shrinks
            prev = w.size();
        }
    }
}

TEST_CASE("grounded and belief domains stay disjoint when eviction is applied") {
    // The controller evicts the belief whenever a predicate gets grounded;
    // replaying that discipline on random traffic keeps the domains disjoint.
    Rng rng(11);
    GroundedStore w;
    BeliefStore b;
    for (int step = 0; step < 200; ++step) {
        PredicateId p{"p" + std::to_string(rng.below(12)), {}};
        if (rng.bernoulli(0.5)) {
            w = ground_update(w, p, rng.bernoulli(0.5), {}, true);
            b.erase(p);
        } else if (!w.contains(p)) {
            b = insert_belief(b, w, p, rng.bernoulli(0.5), rng.uniform());
        }
        std::set<PredicateId> wd = w.domain();
        for (const auto& q : b.domain()) CHECK(wd.count(q) == 0);
    }
}
