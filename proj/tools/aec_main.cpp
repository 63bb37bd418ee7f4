#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "aec/harness.hpp"
#include "aec/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

struct CommonOpts {
    std::string config_path;
    uint64_t seed = 0;
    bool seed_set = false;
    int episodes = 0;
    int threads = 0;
    std::string mode;
    std::string out_path;
    std::string trace_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "experiment config file (JSON)");
    cmd->add_option("--seed", opts.seed, "override the global seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("-n,--episodes", opts.episodes, "override episode count");
    cmd->add_option("-j,--threads", opts.threads, "override worker count");
    cmd->add_option("--mode", opts.mode,
                    "override controller mode (AEC|Direct|QueryOnly|NoVerification|NoGating)");
    cmd->add_option("-o,--out", opts.out_path, "write the structured report here");
    cmd->add_option("--trace-dir", opts.trace_dir, "write per-episode traces into this directory");
}

aec::ExperimentConfig load_config(const CommonOpts& opts) {
    aec::ExperimentConfig cfg;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw std::runtime_error("cannot open config: " + opts.config_path);
        json j;
        in >> j;
        cfg = aec::ExperimentConfig::from_json(j);
    }
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.episodes > 0) cfg.episodes = opts.episodes;
    if (opts.threads > 0) cfg.threads = opts.threads;
    if (!opts.mode.empty()) cfg.controller.mode = aec::mode_from_name(opts.mode);
    if (cfg.episodes < 1) throw std::runtime_error("episodes must be >= 1");
    if (!opts.trace_dir.empty()) cfg.keep_traces = true;
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << text;
}

void dump_traces(const aec::AggregateReport& report, const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& e : report.episodes) {
        char name[32];
        std::snprintf(name, sizeof name, "episode_%06d.trace", e.index);
        write_text((fs::path(dir) / name).string(), aec::serialize_trace(e.trace));
    }
}

void print_summary(const aec::AggregateReport& r) {
    std::cout << "episodes        " << r.episodes.size() << "\n"
              << "mode            " << aec::mode_name(r.config.controller.mode) << "\n"
              << "success_rate    " << aec::format_double(r.success_rate()) << "\n"
              << "mean_queries    " << aec::format_double(r.mean_queries()) << "\n"
              << "commits         " << r.total_commits << "\n"
              << "infeasible      " << r.infeasible_commits << "\n"
              << "mean_bound      " << aec::format_double(r.mean_bound) << "\n"
              << "leakage         " << r.leakage_violations << "/" << r.leakage_checked << "\n"
              << "gate            " << r.gate_violations << "/" << r.gate_checked << "\n";
}

// columnar text for external plotting: one row per episode
std::string plot_data(const aec::AggregateReport& r) {
    std::string out = "episode success queries rounds commits infeasible\n";
    for (const auto& e : r.episodes) {
        int infeasible = 0;
        for (const auto& c : e.commits) infeasible += c.feasible_at_commit ? 0 : 1;
        out += std::to_string(e.index) + " " + (e.success ? "1" : "0") + " " +
               std::to_string(e.queries) + " " + std::to_string(e.rounds) + " " +
               std::to_string(e.commits.size()) + " " + std::to_string(infeasible) + "\n";
    }
    return out;
}

int cmd_run(const CommonOpts& opts, const std::string& plot_path) {
    auto cfg = load_config(opts);
    auto report = aec::run_corpus(cfg);
    print_summary(report);
    if (!opts.out_path.empty()) write_text(opts.out_path, report.serialize());
    if (!opts.trace_dir.empty()) dump_traces(report, opts.trace_dir);
    if (!plot_path.empty()) write_text(plot_path, plot_data(report));
    bool clean = report.leakage_violations == 0 && report.gate_violations == 0;
    return clean ? kOk : kViolation;
}

int cmd_validate(const CommonOpts& opts) {
    auto cfg = load_config(opts);
    auto report = aec::run_corpus(cfg);
    auto t1 = aec::validate_theorem1(report);
    std::cout << t1.to_json().dump(2) << "\n";
    if (!opts.out_path.empty()) write_text(opts.out_path, t1.to_json().dump(2) + "\n");
    if (!opts.trace_dir.empty()) dump_traces(report, opts.trace_dir);
    if (!t1.conclusive) {
        std::cerr << "inconclusive: " << t1.commits << " commits (need >= 100)\n";
        return kViolation;
    }
    return t1.holds ? kOk : kViolation;
}

int cmd_refine(const CommonOpts& opts, int iterations, const std::string& cx_log) {
    auto cfg = load_config(opts);
    auto report = aec::run_refinement(cfg, iterations, {}, cx_log);
    std::cout << report.to_json().dump(2) << "\n";
    if (!opts.out_path.empty()) write_text(opts.out_path, report.to_json().dump(2) + "\n");
    return report.all_sweeps_ok() ? kOk : kViolation;
}

int cmd_ablate(const CommonOpts& opts) {
    auto cfg = load_config(opts);
    json table = json::array();
    std::cout << "mode success_rate mean_queries mean_rounds infeasible_commits\n";
    for (aec::Mode m : {aec::Mode::AEC, aec::Mode::Direct, aec::Mode::QueryOnly,
                        aec::Mode::NoVerification, aec::Mode::NoGating}) {
        auto variant = cfg;
        variant.controller.mode = m;
        auto report = aec::run_corpus(variant);
        double rounds = 0;
        for (const auto& e : report.episodes) rounds += e.rounds;
        if (!report.episodes.empty()) rounds /= report.episodes.size();
        std::cout << aec::mode_name(m) << " " << aec::format_double(report.success_rate()) << " "
                  << aec::format_double(report.mean_queries()) << " "
                  << aec::format_double(rounds) << " " << report.infeasible_commits << "\n";
        json row;
        row["mode"] = aec::mode_name(m);
        row["success_rate"] = report.success_rate();
        row["mean_queries"] = report.mean_queries();
        row["mean_rounds"] = rounds;
        row["infeasible_commits"] = report.infeasible_commits;
        table.push_back(row);
    }
    if (!opts.out_path.empty()) write_text(opts.out_path, table.dump(2) + "\n");
    return kOk;
}

int cmd_audit(const std::string& trace_dir, bool gate_too) {
    if (!fs::is_directory(trace_dir)) {
        std::cerr << "not a directory: " << trace_dir << "\n";
        return kConfigError;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(trace_dir))
        if (entry.path().extension() == ".trace") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    long checked = 0;
    long violations = 0;
    for (const auto& f : files) {
        std::ifstream in(f);
        std::stringstream buf;
        buf << in.rdbuf();
        auto events = aec::parse_trace(buf.str());
        auto leak = aec::audit_no_leakage(events);
        checked += leak.checked;
        violations += static_cast<long>(leak.violations.size());
        for (const auto& v : leak.violations) std::cerr << f.filename().string() << ": " << v << "\n";
        if (gate_too) {
            auto gate = aec::audit_gate_semantics(events);
            checked += gate.checked;
            violations += static_cast<long>(gate.violations.size());
            for (const auto& v : gate.violations)
                std::cerr << f.filename().string() << ": " << v << "\n";
        }
    }
    std::cout << "files " << files.size() << " checked " << checked << " violations " << violations
              << "\n";
    return violations == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"active epistemic control experiments"};
    app.require_subcommand(1);

    CommonOpts run_opts, val_opts, ref_opts, abl_opts;
    std::string plot_path, cx_log, audit_dir;
    int iterations = 4;
    bool gate_too = false;

    auto* run = app.add_subcommand("run", "run a Monte Carlo corpus");
    add_common(run, run_opts);
    run->add_option("--plot-data", plot_path, "write columnar per-episode data here");

    auto* val = app.add_subcommand("validate-theorem1", "check the feasibility bound");
    add_common(val, val_opts);

    auto* ref = app.add_subcommand("refine", "counterexample-driven refinement loop");
    add_common(ref, ref_opts);
    ref->add_option("-i,--iterations", iterations, "refinement iterations")
        ->check(CLI::PositiveNumber);
    ref->add_option("--cx-log", cx_log, "append counterexamples to this file");

    auto* abl = app.add_subcommand("ablate", "sweep all controller modes on a shared corpus");
    add_common(abl, abl_opts);

    auto* audit = app.add_subcommand("audit-leakage", "audit a directory of trace files");
    audit->add_option("trace_dir", audit_dir, "directory of .trace files")->required();
    audit->add_flag("--gate", gate_too, "also audit gate semantics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts, plot_path);
        if (val->parsed()) return cmd_validate(val_opts);
        if (ref->parsed()) return cmd_refine(ref_opts, iterations, cx_log);
        if (abl->parsed()) return cmd_ablate(abl_opts);
        if (audit->parsed()) return cmd_audit(audit_dir, gate_too);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
