#include "aec/trace.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace aec {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

TraceEvent& TraceEvent::add(const std::string& key, std::string value) {
    if (value.find(' ') != std::string::npos)
        throw std::invalid_argument("trace value may not contain spaces: " + value);
    fields.emplace_back(key, std::move(value));
    return *this;
}

TraceEvent& TraceEvent::add(const std::string& key, const char* value) {
    return add(key, std::string(value));
}

TraceEvent& TraceEvent::add(const std::string& key, double value) {
    return add(key, format_double(value));
}

TraceEvent& TraceEvent::add(const std::string& key, int value) {
    return add(key, std::to_string(value));
}

TraceEvent& TraceEvent::add(const std::string& key, bool value) {
    return add(key, std::string(value ? "1" : "0"));
}

std::optional<std::string> TraceEvent::get(const std::string& key) const {
    for (const auto& [k, v] : fields)
        if (k == key) return v;
    return std::nullopt;
}

std::optional<double> TraceEvent::get_double(const std::string& key) const {
    auto s = get(key);
    if (!s) return std::nullopt;
    return std::stod(*s);
}

std::string TraceEvent::line() const {
    std::string out = std::to_string(seq) + " " + kind;
    for (const auto& [k, v] : fields) out += " " + k + "=" + v;
    return out;
}

TraceEvent TraceEvent::parse_line(const std::string& line) {
    std::istringstream iss(line);
    TraceEvent e;
    if (!(iss >> e.seq >> e.kind)) throw std::invalid_argument("bad trace line: " + line);
    std::string tok;
    while (iss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad trace field: " + tok);
        e.fields.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return e;
}

std::string serialize_trace(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += e.line();
        out += '\n';
    }
    return out;
}

std::vector<TraceEvent> parse_trace(const std::string& text) {
    std::vector<TraceEvent> out;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line)) {
        if (line.empty()) continue;
        out.push_back(TraceEvent::parse_line(line));
    }
    return out;
}

std::string fact_list_str(const std::vector<GroundedFact>& facts) {
    std::string out;
    for (size_t i = 0; i < facts.size(); ++i) {
        if (i) out += ';';
        out += literal_str({facts[i].predicate, facts[i].value});
        out += '@';
        out += provenance_code(facts[i].provenance);
    }
    return out.empty() ? "-" : out;
}

std::string predicate_list_str(const std::set<PredicateId>& preds) {
    std::string out;
    for (const auto& p : preds) {
        if (!out.empty()) out += ';';
        out += p.str();
    }
    return out.empty() ? "-" : out;
}

std::vector<PredicateId> parse_predicate_list(const std::string& text) {
    std::vector<PredicateId> out;
    if (text == "-" || text.empty()) return out;
    size_t start = 0;
    while (start < text.size()) {
        auto semi = text.find(';', start);
        auto piece =
            text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
        out.push_back(PredicateId::parse(piece));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return out;
}

std::string store_snapshot(const GroundedStore& store) {
    std::string out;
    for (const auto& [p, f] : store.facts()) {
        out += literal_str({p, f.value});
        out += " @";
        out += provenance_code(f.provenance);
        out += '\n';
    }
    return out;
}

GroundedStore parse_store_snapshot(const std::string& text) {
    GroundedStore store;
    std::istringstream iss(text);
    std::string line;
    while (std::getline(iss, line)) {
        if (line.empty()) continue;
        auto at = line.rfind(" @");
        if (at == std::string::npos) throw std::invalid_argument("bad snapshot line: " + line);
        auto prov = provenance_from_code(line.substr(at + 2));
        if (!prov) throw std::invalid_argument("bad provenance in: " + line);
        auto eq = line.rfind('=', at);
        if (eq == std::string::npos) throw std::invalid_argument("bad snapshot line: " + line);
        auto p = PredicateId::parse(line.substr(0, eq));
        store.set(p, line.substr(eq + 1, at - eq - 1) == "1", *prov);
    }
    return store;
}

namespace {

bool lists_intersect(const std::vector<PredicateId>& a, const std::vector<PredicateId>& b) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (x == y) return true;
    return false;
}

}  // namespace

AuditReport audit_no_leakage(const std::vector<TraceEvent>& events) {
    AuditReport report;
    for (const auto& e : events) {
        if (e.kind != "predict" && e.kind != "verify") continue;
        auto winput = e.get("winput");
        auto beliefdom = e.get("beliefdom");
        if (!winput || !beliefdom) {
            report.violations.push_back("event " + std::to_string(e.seq) +
                                        ": missing input snapshot");
            continue;
        }
        ++report.checked;
        auto w = parse_predicate_list(*winput);
        auto b = parse_predicate_list(*beliefdom);
        if (lists_intersect(w, b))
            report.violations.push_back("event " + std::to_string(e.seq) + " (" + e.kind +
                                        "): belief content in input");
    }
    return report;
}

AuditReport audit_gate_semantics(const std::vector<TraceEvent>& events) {
    AuditReport report;
    for (const auto& e : events) {
        if (e.kind != "query" && e.kind != "simulate") continue;
        auto forced = e.get("forced");
        if (!forced || *forced != "0") continue;  // mode-forced branches are exempt
        auto mu = e.get_double("mu");
        auto sigma = e.get_double("sigma");
        auto eps = e.get_double("eps");
        auto tau = e.get_double("tau");
        if (!mu || !sigma || !eps || !tau) {
            report.violations.push_back("event " + std::to_string(e.seq) + ": missing gate data");
            continue;
        }
        ++report.checked;
        bool should_query = std::abs(*mu - 0.5) < *eps || *sigma > *tau;
        bool did_query = e.kind == "query";
        if (should_query != did_query)
            report.violations.push_back("event " + std::to_string(e.seq) +
                                        ": gate semantics violated");
    }
    return report;
}

}  // namespace aec
