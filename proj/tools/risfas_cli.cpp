// Command-line front end: analytic sweeps, Monte Carlo sweeps, validation
// reports and distribution tables for the RIS-aided fluid-antenna secrecy
// model. Exit codes: 0 ok, 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "risfas/diag.hpp"
#include "risfas/sweep.hpp"

using namespace risfas;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<int> glq_order;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file (defaults when omitted)");
    cmd->add_option("--out", o.out_path, "output file (stdout when omitted)");
    cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", o.seed, "override master seed");
    cmd->add_option("--workers", o.workers, "override worker count");
    cmd->add_option("--glq-order", o.glq_order, "override Gauss-Laguerre order K");
}

sweep::SweepSpec resolve_spec(const CommonOpts& o) {
    sweep::SweepSpec spec = o.config_path.empty()
                                ? sweep::parse_config(nlohmann::json::object())
                                : sweep::load_config(o.config_path);
    if (o.seed) spec.master_seed = *o.seed;
    if (o.workers) spec.workers = *o.workers;
    if (o.glq_order) spec.base.glq_order = *o.glq_order;
    spec.validate();
    return spec;
}

void deliver(const CommonOpts& o, const std::string& content) {
    if (o.out_path.empty())
        std::cout << content;
    else
        sweep::write_file(o.out_path, content);
}

void report_diagnostics() {
    const auto& c = diag::counters();
    const auto clamps = c.probability_clamps.load();
    const auto budget = c.mvn_budget_exhausted.load();
    const auto clt = c.clt_small_m_warnings.load();
    if (clamps)
        std::fprintf(stderr, "diag: %llu probability clamp(s) beyond 1e-9\n",
                     static_cast<unsigned long long>(clamps));
    if (budget)
        std::fprintf(stderr, "diag: %llu MVN call(s) exhausted the sample budget\n",
                     static_cast<unsigned long long>(budget));
    if (clt)
        std::fprintf(stderr, "diag: CLT parameters requested for M < 4 (%llu time(s))\n",
                     static_cast<unsigned long long>(clt));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided fluid-antenna secrecy outage analysis"};
    app.require_subcommand(1);

    CommonOpts analyze_opts, simulate_opts, validate_opts, dist_opts;
    CLI::App* analyze =
        app.add_subcommand("analyze", "analytic SOP sweep (GLQ and reference paths)");
    add_common(analyze, analyze_opts);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo SOP sweep");
    add_common(simulate, simulate_opts);
    CLI::App* validate = app.add_subcommand("validate", "analytic-vs-MC comparison report");
    add_common(validate, validate_opts);
    CLI::App* dist = app.add_subcommand("dist", "CDF/PDF tables for both nodes");
    add_common(dist, dist_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            sweep::SweepSpec spec = resolve_spec(analyze_opts);
            // analytic run: drop MC output if the config lists it
            std::erase(spec.outputs, sweep::Output::sop_mc);
            if (spec.outputs.empty())
                spec.outputs = {sweep::Output::sop_glq, sweep::Output::sop_reference};
            const auto rows = sweep::run_sweep(spec);
            deliver(analyze_opts, analyze_opts.format == "json" ? sweep::to_json(spec, rows)
                                                                : sweep::to_csv(spec, rows));
        } else if (*simulate) {
            sweep::SweepSpec spec = resolve_spec(simulate_opts);
            spec.outputs = {sweep::Output::sop_mc};
            if (!spec.mc_cfg) spec.mc_cfg = mc::McConfig{};
            spec.validate();
            const auto rows = sweep::run_sweep(spec);
            deliver(simulate_opts, simulate_opts.format == "json" ? sweep::to_json(spec, rows)
                                                                  : sweep::to_csv(spec, rows));
        } else if (*validate) {
            sweep::SweepSpec spec = resolve_spec(validate_opts);
            if (!spec.mc_cfg) spec.mc_cfg = mc::McConfig{};
            const auto rows = sweep::run_validate(spec);
            deliver(validate_opts, validate_opts.format == "json" ? sweep::to_json(spec, rows)
                                                                  : sweep::to_csv(rows));
        } else if (*dist) {
            sweep::SweepSpec spec = resolve_spec(dist_opts);
            const auto rows = sweep::run_dist(spec);
            const bool with_mc = spec.mc_cfg.has_value();
            deliver(dist_opts, dist_opts.format == "json" ? sweep::to_json(spec, rows, with_mc)
                                                          : sweep::to_csv(rows, with_mc));
        }
    } catch (const sweep::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
    report_diagnostics();
    return 0;
}
