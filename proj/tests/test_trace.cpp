#include "doctest.h"

#include "aec/trace.hpp"

using namespace aec;

namespace {
PredicateId pid(const std::string& s) { return PredicateId::parse(s); }
}  // namespace

TEST_CASE("trace event line round-trip") {
    TraceEvent e;
    e.seq = 3;
    e.kind = "query";
    e.add("pred", "in(o1,c1)").add("mu", 0.52).add("forced", false).add("budget", 9);
    auto back = TraceEvent::parse_line(e.line());
    CHECK(back.seq == 3);
    CHECK(back.kind == "query");
    CHECK(back.get("pred") == "in(o1,c1)");
    CHECK(back.get_double("mu") == 0.52);
    CHECK(back.get("forced") == "0");
    CHECK(back.get("budget") == "9");
    CHECK(back.line() == e.line());
}

TEST_CASE("format_double is round-trip exact") {
    for (double v : {0.0, 1.0, 0.1, 0.3333333333333333, 1e-9, 0.9999999999999999}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("trace serialization is line-delimited and parseable") {
    std::vector<TraceEvent> events(2);
    events[0].seq = 0;
    events[0].kind = "predict";
    events[0].add("pred", "open(c1)");
    events[1].seq = 1;
    events[1].kind = "commit";
    events[1].add("hyp", "h0");
    auto text = serialize_trace(events);
    auto back = parse_trace(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].kind == "predict");
    CHECK(back[1].get("hyp") == "h0");
    CHECK(serialize_trace(back) == text);
}

TEST_CASE("store snapshot round-trip") {
    GroundedStore w;
    w.set(pid("in(o1,c1)"), true, Provenance::QueryResult);
    w.set(pid("open(c2)"), false, Provenance::InitialObservation);
    auto text = store_snapshot(w);
    CHECK(text.find("in(o1,c1)=1") != std::string::npos);
    CHECK(text.find("open(c2)=0") != std::string::npos);
    auto back = parse_store_snapshot(text);
    CHECK(back == w);
}

TEST_CASE("predicate list round-trip") {
    std::set<PredicateId> preds{pid("a(x)"), pid("b")};
    auto text = predicate_list_str(preds);
    auto back = parse_predicate_list(text);
    REQUIRE(back.size() == 2);
    CHECK(std::set<PredicateId>(back.begin(), back.end()) == preds);
    CHECK(parse_predicate_list("").empty());
}

TEST_CASE("leakage audit flags predictor inputs overlapping the belief domain") {
    TraceEvent clean;
    clean.kind = "predict";
    clean.add("pred", "open(c1)").add("winput", "in(o1,c1)").add("beliefdom", "open(c2)");
    TraceEvent dirty;
    dirty.kind = "predict";
    dirty.add("pred", "open(c1)").add("winput", "in(o1,c1);open(c2)").add("beliefdom", "open(c2)");

    auto ok = audit_no_leakage({clean});
    CHECK(ok.ok());
    CHECK(ok.checked == 1);

    auto bad = audit_no_leakage({clean, dirty});
    CHECK_FALSE(bad.ok());
    CHECK(bad.checked == 2);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].find("belief content") != std::string::npos);
}

TEST_CASE("gate audit checks the query-vs-simulate rule on unforced decisions") {
    auto decision = [](const char* kind, double mu, double sigma, double eps, double tau,
                       bool forced) {
        TraceEvent e;
        e.kind = kind;
        e.add("pred", "p").add("mu", mu).add("sigma", sigma).add("eps", eps).add("tau", tau);
        e.add("forced", forced);
        return e;
    };
    // |mu-0.5| < eps forces a query; sigma > tau forces a query.
    std::vector<TraceEvent> good{
        decision("query", 0.52, 0.1, 0.05, 0.3, false),   // ambiguous -> query
        decision("query", 0.9, 0.5, 0.05, 0.3, false),    // high sigma -> query
        decision("simulate", 0.9, 0.1, 0.05, 0.3, false), // confident -> simulate
        decision("query", 0.9, 0.1, 0.05, 0.3, true),     // forced: exempt from the rule
    };
    auto ok = audit_gate_semantics(good);
    CHECK(ok.ok());
    CHECK(ok.checked == 3);  // forced decisions are not gate-checked

    std::vector<TraceEvent> bad{
        decision("simulate", 0.52, 0.1, 0.05, 0.3, false),  // should have queried
    };
    CHECK_FALSE(audit_gate_semantics(bad).ok());

    std::vector<TraceEvent> bad2{
        decision("query", 0.9, 0.1, 0.05, 0.3, false),  // should have simulated
    };
    CHECK_FALSE(audit_gate_semantics(bad2).ok());
}
