#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aec/controller.hpp"
#include "aec/harness.hpp"
#include "aec/trace.hpp"

namespace py = pybind11;
using namespace aec;

namespace {

ExperimentConfig config_from_str(const std::string& text) {
    return ExperimentConfig::from_json(nlohmann::json::parse(text));
}

// One fully-instrumented episode; returns the outcome plus its trace so python
// callers can audit it.
py::dict run_single(const std::string& config_json, int index) {
    auto cfg = config_from_str(config_json);
    DomainSchema schema = make_schema(cfg.env);
    auto rules = agent_rules_for(schema, cfg.extra_rules);
    Environment env(schema, cfg.env, cfg.oracle, Rng::derive(cfg.seed, 2 * index));
    SyntheticPredictor predictor(cfg.predictor, &env.hidden_truth(),
                                 Rng::derive(cfg.seed, 2 * index + 1));
    auto outcome = run_episode(env, schema, rules, predictor, cfg.controller);

    py::dict d;
    d["success"] = outcome.success;
    d["queries_used"] = outcome.queries_used;
    d["replanning_rounds"] = outcome.replanning_rounds;
    d["fail_reason"] = outcome.fail_reason;
    d["committed"] = outcome.committed;
    d["trace"] = serialize_trace(outcome.trace);
    d["final_state"] = store_snapshot(outcome.final_state);
    d["no_leakage"] = assert_no_leakage(outcome.trace);
    return d;
}

py::dict audit_to_dict(const AuditReport& r) {
    py::dict d;
    d["checked"] = r.checked;
    d["violations"] = r.violations;
    d["ok"] = r.ok();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "active epistemic control: grounded/belief stores, gated control, "
              "verified commitment, and the Monte Carlo harness";

    py::class_<PredicateId>(m, "PredicateId")
        .def(py::init<std::string, std::vector<std::string>>(), py::arg("name"), py::arg("args"))
        .def_static("parse", [](const std::string& s) { return PredicateId::parse(s); })
        .def_readonly("name", &PredicateId::name)
        .def_readonly("args", &PredicateId::args)
        .def("__str__", &PredicateId::str)
        .def("__repr__", &PredicateId::str)
        .def("__eq__", [](const PredicateId& a, const PredicateId& b) { return a == b; })
        .def("__lt__", [](const PredicateId& a, const PredicateId& b) { return a < b; })
        .def("__hash__", [](const PredicateId& p) { return py::hash(py::str(p.str())); });

    py::class_<GroundedStore>(m, "GroundedStore")
        .def(py::init<>())
        .def("contains", &GroundedStore::contains)
        .def("value_of",
             [](const GroundedStore& s, const PredicateId& p) -> py::object {
                 auto v = s.value_of(p);
                 return v ? py::cast(*v) : py::none();
             })
        .def("set",
             [](GroundedStore& s, const PredicateId& p, bool v, const std::string& prov) {
                 auto pr = provenance_from_code(prov);
                 if (!pr) throw std::invalid_argument("bad provenance code: " + prov);
                 s.set(p, v, *pr);
             },
             py::arg("predicate"), py::arg("value"), py::arg("provenance") = "init")
        .def("domain",
             [](const GroundedStore& s) {
                 std::vector<std::string> out;
                 for (const auto& p : s.domain()) out.push_back(p.str());
                 return out;
             })
        .def("snapshot", [](const GroundedStore& s) { return store_snapshot(s); })
        .def("__len__", &GroundedStore::size);

    py::class_<BeliefStore>(m, "BeliefStore")
        .def(py::init<>())
        .def("contains", &BeliefStore::contains)
        .def("domain",
             [](const BeliefStore& s) {
                 std::vector<std::string> out;
                 for (const auto& p : s.domain()) out.push_back(p.str());
                 return out;
             })
        .def("__len__", &BeliefStore::size);

    // Eq-style store updates with the leakage guard intact: inserting a belief
    // for a grounded predicate raises.
    m.def("ground_update",
          [](GroundedStore s, const PredicateId& p, bool v, bool evidence_override) {
              return ground_update(std::move(s), p, v, {}, evidence_override);
          },
          py::arg("store"), py::arg("predicate"), py::arg("value"),
          py::arg("evidence_override") = false);
    m.def("insert_belief",
          [](BeliefStore s, const GroundedStore& grounded, const PredicateId& p, bool v_hat,
             double sigma) { return insert_belief(std::move(s), grounded, p, v_hat, sigma); },
          py::arg("store"), py::arg("grounded"), py::arg("predicate"), py::arg("value"),
          py::arg("sigma"));
    m.def("discretize",
          [](double mu, double sigma, double eps) -> py::object {
              auto d = discretize(Prediction{mu, sigma}, eps);
              if (is_ambiguous(d)) return py::none();
              return py::cast(std::get<bool>(d));
          },
          py::arg("mu"), py::arg("sigma"), py::arg("eps"),
          "Discretized prediction, or None when ambiguous");

    m.def("default_config",
          [] { return ExperimentConfig{}.to_json().dump(2); },
          "The default experiment config as a JSON string");
    m.def("run_corpus",
          [](const std::string& config_json) {
              return run_corpus(config_from_str(config_json)).serialize();
          },
          py::arg("config_json"), "Run a Monte Carlo corpus; returns the report JSON");
    m.def("validate_theorem1",
          [](const std::string& config_json) {
              auto report = run_corpus(config_from_str(config_json));
              return validate_theorem1(report).to_json().dump(2);
          },
          py::arg("config_json"), "Run a corpus and check the feasibility bound");
    m.def("run_refinement",
          [](const std::string& config_json, int iterations) {
              return run_refinement(config_from_str(config_json), iterations).to_json().dump(2);
          },
          py::arg("config_json"), py::arg("iterations") = 4);
    m.def("run_single", &run_single, py::arg("config_json"), py::arg("index") = 0);
    m.def("soundness_sweep",
          [] {
              auto r = soundness_sweep(DomainSchema::micro().rules);
              py::dict d;
              d["checked"] = r.checked;
              d["accepted"] = r.accepted;
              d["violations"] = r.violations;
              d["ok"] = r.ok();
              return d;
          },
          "Exhaustive verifier soundness check on the micro domain");
    m.def("audit_no_leakage",
          [](const std::string& trace_text) {
              return audit_to_dict(audit_no_leakage(parse_trace(trace_text)));
          },
          py::arg("trace_text"));
    m.def("audit_gate_semantics",
          [](const std::string& trace_text) {
              return audit_to_dict(audit_gate_semantics(parse_trace(trace_text)));
          },
          py::arg("trace_text"));

    py::register_exception<GroundingConflictError>(m, "GroundingConflict");
}
