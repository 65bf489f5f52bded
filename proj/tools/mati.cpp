#include <CLI11.hpp>
#include <iostream>

#include "mati/cli/run.hpp"

namespace {

struct Flags {
    std::string config, scenario, protocol, estimator, mode, d, d_rate, d_grid, tau, epsilon, k_nu,
        horizon, spacing, output, gain_set, problem, p;
    std::optional<double> gamma_ugas, gamma_lp, gamma_d, gamma_des, tolerance;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials, workers;
    bool svg = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "INI file; flags given here override it");
    sub->add_option("--scenario", f.scenario, "example1 | example2");
    sub->add_option("--protocol", f.protocol, "rr | tod");
    sub->add_option("--estimator", f.estimator, "zoh | model");
    sub->add_option("--mode", f.mode, "ugas | lp | target");
    sub->add_option("--d", f.d, "delay bound, e.g. 10ms");
    sub->add_option("--d-rate", f.d_rate, "delay rate bound (dimensionless)");
    sub->add_option("--epsilon", f.epsilon, "minimum transmission spacing, e.g. 1ms");
    sub->add_option("--noise", f.k_nu, "noise bound K_nu");
    sub->add_option("--p", f.p, "Lp order (number or inf)");
    sub->add_option("--gain-set", f.gain_set, "lmi | figure");
    sub->add_option("--gamma-ugas", f.gamma_ugas, "override gamma_H for ugas");
    sub->add_option("--gamma-lp", f.gamma_lp, "override gamma_H for lp/target");
    sub->add_option("--gamma-d", f.gamma_d, "override detectability gain");
    sub->add_option("--gamma-des", f.gamma_des, "desired omega->x gain");
    sub->add_option("--output,-o", f.output, "output file or directory (default: $MATI_OUTPUT_DIR)");
    sub->add_option("--workers", f.workers, "parallel workers (0 = all cores)");
}

void apply(const Flags& f, mati::cli::RunConfig& cfg) {
    using namespace mati;
    using namespace mati::cli;
    if (!f.config.empty()) apply_config_file(f.config, cfg);
    try {
        if (!f.scenario.empty()) cfg.scenario = f.scenario;
        if (!f.protocol.empty()) cfg.protocol = protocol_kind_from_string(f.protocol);
        if (!f.estimator.empty()) cfg.estimator = estimator_from_string(f.estimator);
        if (!f.mode.empty()) cfg.mode = cert_mode_from_string(f.mode);
        if (!f.gain_set.empty()) {
            if (f.gain_set != "lmi" && f.gain_set != "figure") throw UsageError("gain set must be lmi or figure");
            cfg.gains.gain_set = f.gain_set == "lmi" ? GainSet::Lmi : GainSet::Figure;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& ex) {
        throw UsageError(ex.what());
    }
    if (!f.d.empty()) cfg.d = parse_duration(f.d);
    if (!f.d_rate.empty()) cfg.d_rate = std::stod(f.d_rate);
    if (!f.d_grid.empty()) cfg.d_grid = parse_delay_grid(f.d_grid);
    if (!f.tau.empty()) parse_tau(f.tau, cfg);
    if (!f.epsilon.empty()) cfg.epsilon = parse_duration(f.epsilon);
    if (!f.k_nu.empty()) cfg.k_nu = std::stod(f.k_nu);
    if (!f.p.empty()) cfg.p_order = f.p == "inf" ? kInf : std::stod(f.p);
    if (!f.horizon.empty()) cfg.horizon = parse_duration(f.horizon);
    if (!f.spacing.empty()) cfg.spacing = f.spacing;
    if (!f.output.empty()) cfg.output = f.output;
    if (!f.problem.empty()) cfg.problem = f.problem;
    if (f.gamma_ugas) cfg.gains.gamma_ugas = f.gamma_ugas;
    if (f.gamma_lp) cfg.gains.gamma_lp = f.gamma_lp;
    if (f.gamma_d) cfg.gains.gamma_d = f.gamma_d;
    if (f.gamma_des) cfg.gains.gamma_des = f.gamma_des;
    if (f.tolerance) cfg.tolerance = *f.tolerance;
    if (f.seed) cfg.seed = *f.seed;
    if (f.trials) cfg.trials = *f.trials;
    if (f.workers) cfg.workers = *f.workers;
    if (f.svg) cfg.svg = true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MATI certification and validation for delayed networked control loops"};
    app.require_subcommand(1);
    Flags f;

    auto* certify = app.add_subcommand("certify", "certify the maximal transmission interval");
    add_common(certify, f);

    auto* sweep = app.add_subcommand("sweep", "certify over a delay grid and write CSV");
    add_common(sweep, f);
    sweep->add_option("--d-grid", f.d_grid, "start:step:stop with unit, e.g. 0:5:50ms");
    sweep->add_flag("--svg", f.svg, "also write an SVG chart next to the CSV");

    auto* simulate = app.add_subcommand("simulate", "simulate one closed-loop trajectory");
    add_common(simulate, f);
    simulate->add_option("--tau", f.tau, "interval, e.g. 5ms, or a multiple of tau* such as 0.9x");
    simulate->add_option("--horizon", f.horizon, "simulated time, e.g. 10s");
    simulate->add_option("--seed", f.seed, "random seed");
    simulate->add_option("--spacing", f.spacing, "random | fixed");
    simulate->add_flag("--svg", f.svg, "also write an SVG of x(t)");

    auto* gain = app.add_subcommand("gain", "estimate an L2 gain from the LMI");
    add_common(gain, f);
    gain->add_option("--problem", f.problem, "tod | rr | detect | scalar");
    gain->add_option("--tol", f.tolerance, "relative bisection tolerance");

    auto* verify = app.add_subcommand("verify", "UGAS battery from random initial histories");
    add_common(verify, f);
    verify->add_option("--tau", f.tau, "interval or multiple of tau* (default 0.9x)");
    verify->add_option("--horizon", f.horizon, "simulated time per trial");
    verify->add_option("--trials", f.trials, "number of initial histories");
    verify->add_option("--seed", f.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : mati::cli::kExitUsage;
    }

    mati::cli::RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        apply(f, cfg);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return mati::cli::kExitUsage;
    }
    return mati::cli::run(cfg, std::cout, std::cerr);
}
