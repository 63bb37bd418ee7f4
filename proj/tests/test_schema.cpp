#include <algorithm>

#include "doctest.h"

#include "aec/schema.hpp"

using namespace aec;

TEST_CASE("micro schema parses and validates") {
    auto s = DomainSchema::micro();
    CHECK(s.types == std::vector<std::string>{"obj", "cont"});
    CHECK(s.objects_of_type("obj") == std::vector<std::string>{"o1", "o2"});
    CHECK(s.objects_of_type("cont") == std::vector<std::string>{"c1", "c2"});
    REQUIRE(s.find_predicate("in") != nullptr);
    CHECK(s.find_predicate("in")->arg_types == std::vector<std::string>{"obj", "cont"});
    REQUIRE(s.find_action("move") != nullptr);
    CHECK(s.find_action("move")->params.size() == 3);
    REQUIRE(s.rules.size() == 1);
    CHECK(s.rules[0].id == "reach_open");
    CHECK(s.predicate_is_derived("reachable"));
    CHECK_FALSE(s.predicate_is_derived("in"));
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("household schema scales with its size parameters") {
    auto s = DomainSchema::household(4, 3);
    CHECK(s.objects_of_type("obj").size() == 4);
    CHECK(s.objects_of_type("cont").size() == 5);  // fridge1, sink1, 3 boxes
    REQUIRE(s.find_action("wash") != nullptr);
    CHECK(s.predicate_is_derived("cold"));
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("ground predicate and action enumeration") {
    auto s = DomainSchema::micro();
    auto preds = s.ground_predicates();
    // in: 2x2, open: 2, reachable: 2
    CHECK(preds.size() == 8);
    auto actions = s.ground_actions();
    // open_box: 2; move: 2 objects x 2 ordered distinct container pairs
    CHECK(actions.size() == 6);
    for (const auto& a : actions) {
        if (a.action == "move") CHECK(a.args[1] != a.args[2]);  // src != dst
    }
}

TEST_CASE("instantiate binds arguments and typechecks") {
    auto s = DomainSchema::micro();
    auto inst = s.instantiate(GroundAction{"move", {"o1", "c1", "c2"}});
    REQUIRE(inst.preconditions.size() == 3);
    CHECK(inst.preconditions[0] == Literal{PredicateId::parse("in(o1,c1)"), true});
    CHECK(inst.add_effects == std::vector<PredicateId>{PredicateId::parse("in(o1,c2)")});
    CHECK(inst.delete_effects == std::vector<PredicateId>{PredicateId::parse("in(o1,c1)")});

    CHECK_THROWS_AS(s.instantiate(GroundAction{"move", {"o1", "c1"}}), SchemaError);   // arity
    CHECK_THROWS_AS(s.instantiate(GroundAction{"move", {"c1", "o1", "c2"}}), SchemaError);  // type
    CHECK_THROWS_AS(s.instantiate(GroundAction{"teleport", {"o1"}}), SchemaError);
}

TEST_CASE("well_typed checks against declarations") {
    auto s = DomainSchema::micro();
    CHECK(s.well_typed(PredicateId::parse("in(o1,c1)")));
    CHECK_FALSE(s.well_typed(PredicateId::parse("in(c1,o1)")));
    CHECK_FALSE(s.well_typed(PredicateId::parse("in(o1)")));
    CHECK_FALSE(s.well_typed(PredicateId::parse("frobnicate(o1)")));
}

TEST_CASE("ground action text round-trip") {
    GroundAction a{"move", {"o1", "c1", "c2"}};
    CHECK(a.str() == "move(o1,c1,c2)");
    CHECK(GroundAction::parse(a.str()) == a);
}

TEST_CASE("rule line parsing") {
    auto r = parse_rule_line("wet_sink: in(?o,sink1)=1 & open(sink1)=1 => clean(?o)=1");
    CHECK(r.id == "wet_sink");
    REQUIRE(r.premises.size() == 2);
    CHECK(r.premises[0] == Literal{PredicateId::parse("in(?o,sink1)"), true});
    CHECK(r.conclusion == Literal{PredicateId::parse("clean(?o)"), true});
    CHECK(r.enabled);

    CHECK_THROWS_AS(parse_rule_line("no_arrow: a=1 & b=1"), SchemaError);
    CHECK_THROWS_AS(parse_rule_line("=> c=1"), SchemaError);
}

TEST_CASE("substitute binds pattern variables and leaves unbound ones") {
    auto pat = PredicateId::parse("in(?o,?c)");
    auto p = substitute(pat, {{"?o", "o1"}, {"?c", "c2"}});
    CHECK(p == PredicateId::parse("in(o1,c2)"));
    auto partial = substitute(pat, {{"?o", "o1"}});
    CHECK(partial == PredicateId::parse("in(o1,?c)"));
}

TEST_CASE("schema parse rejects inconsistent declarations") {
    CHECK_THROWS_AS(DomainSchema::parse("object o1 : ghost\n"), SchemaError);
    CHECK_THROWS_AS(DomainSchema::parse("type obj\npredicate in(obj,ghost)\n"), SchemaError);
    CHECK_THROWS_AS(DomainSchema::parse("type obj\nobject o1 : obj\n"
                                        "action grab(?o:obj)\n  pre holding(?o)=1\n"),
                    SchemaError);
}
