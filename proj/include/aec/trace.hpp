#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aec/store.hpp"

namespace aec {

std::string format_double(double v);  // round-trip exact, deterministic

// One line-delimited structured record. The logical sequence number doubles as
// the timestamp so traces are byte-stable across runs.
struct TraceEvent {
    int seq = 0;
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    TraceEvent& add(const std::string& key, std::string value);
    TraceEvent& add(const std::string& key, const char* value);
    TraceEvent& add(const std::string& key, double value);
    TraceEvent& add(const std::string& key, int value);
    TraceEvent& add(const std::string& key, bool value);
    std::optional<std::string> get(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;

    std::string line() const;
    static TraceEvent parse_line(const std::string& line);
};

std::string serialize_trace(const std::vector<TraceEvent>& events);
std::vector<TraceEvent> parse_trace(const std::string& text);

// "pred(args)=0|1@prov" fact lists and bare predicate lists, ';'-joined.
std::string fact_list_str(const std::vector<GroundedFact>& facts);
std::string predicate_list_str(const std::set<PredicateId>& preds);
std::vector<PredicateId> parse_predicate_list(const std::string& text);

// Line-oriented store snapshot format: "predicate(args...)=0|1 @provenance".
std::string store_snapshot(const GroundedStore& store);
GroundedStore parse_store_snapshot(const std::string& text);

struct AuditReport {
    int checked = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Zero predictor or verifier inputs may contain belief-store content. Every
// predict/verify event records the input grounded domain and the belief
// domain at call time.
AuditReport audit_no_leakage(const std::vector<TraceEvent>& events);

// The query branch fired iff |mu - 0.5| < eps or sigma > tau, for every gated
// (non-forced) loop decision.
AuditReport audit_gate_semantics(const std::vector<TraceEvent>& events);

}  // namespace aec
