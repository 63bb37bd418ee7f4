#include <stdexcept>

#include "doctest.h"

#include "aec/predicate.hpp"

using namespace aec;

TEST_CASE("predicate parse and str round-trip") {
    auto p = PredicateId::parse("in(o1,c1)");
    CHECK(p.name == "in");
    CHECK(p.args == std::vector<std::string>{"o1", "c1"});
    CHECK(p.str() == "in(o1,c1)");
    CHECK(PredicateId::parse(p.str()) == p);

    auto bare = PredicateId::parse("raining");
    CHECK(bare.args.empty());
    CHECK(bare.str() == "raining");
}

TEST_CASE("predicate equality is structural") {
    PredicateId a{"in", {"o1", "c1"}};
    PredicateId b{"in", {"o1", "c1"}};
    PredicateId c{"in", {"o1", "c2"}};
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a < c);  // total order for deterministic containers
}

TEST_CASE("predicate variables and groundness") {
    CHECK(PredicateId{"in", {"o1", "c1"}}.is_ground());
    CHECK_FALSE(PredicateId{"in", {"?o", "c1"}}.is_ground());
}

TEST_CASE("predicate parse rejects malformed input") {
    CHECK_THROWS_AS(PredicateId::parse("in(o1,c1"), std::invalid_argument);
    CHECK_THROWS_AS(PredicateId::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(PredicateId::parse("in()x"), std::invalid_argument);
}

TEST_CASE("literal formatting") {
    Literal lit{PredicateId{"open", {"c1"}}, true};
    CHECK(literal_str(lit) == "open(c1)=1");
    lit.second = false;
    CHECK(literal_str(lit) == "open(c1)=0");
}
