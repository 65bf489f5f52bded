#include "mati/cli/run.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>

#include "mati/cli/svg.hpp"
#include "mati/core/errors.hpp"
#include "mati/gains/lmi.hpp"
#include "mati/simulator/validation.hpp"
#include "mati/smallgain/sweep.hpp"

namespace mati::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char b[64];
    std::snprintf(b, sizeof b, "%.10g", v);
    return b;
}

std::string ms(double seconds) { return num(seconds * 1e3) + " ms"; }

// Explicit --output wins; otherwise MATI_OUTPUT_DIR; otherwise nothing is written.
std::optional<fs::path> output_target(const RunConfig& cfg, const std::string& default_name) {
    std::string base = cfg.output;
    if (base.empty()) {
        if (const char* env = std::getenv("MATI_OUTPUT_DIR"); env && *env) base = std::string(env) + "/";
    }
    if (base.empty()) return std::nullopt;
    fs::path p(base);
    if (base.back() == '/' || fs::is_directory(p)) return p / default_name;
    return p;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

Scenario make_scenario(const RunConfig& cfg, double d) {
    ExampleOptions opt = cfg.gains;
    opt.k_nu = cfg.k_nu;
    return build_scenario(cfg.scenario, d, cfg.d_rate, cfg.protocol, cfg.estimator, opt);
}

SearchConfig search_config(const RunConfig& cfg) {
    SearchConfig s;
    s.p_order = cfg.p_order;
    return s;
}

MatiCertificate certify_scenario(const RunConfig& cfg, const Scenario& sc, CertMode mode) {
    ErrorSystemParams params = sc.error_params();
    params.epsilon = cfg.epsilon;
    const double gh = sc.gamma_h(mode);
    if (!std::isfinite(gh))
        throw std::runtime_error("no finite gamma_H for this delay (nominal loop unstable)");
    return certify(params, gh, mode, sc.gains.gamma_d, sc.gains.gamma_des, search_config(cfg));
}

double resolve_tau(const RunConfig& cfg, const Scenario& sc, CertMode mode, std::ostream& out) {
    if (cfg.tau && !cfg.tau_relative) return *cfg.tau;
    const double f = cfg.tau ? *cfg.tau : 0.9;
    MatiCertificate c = certify_scenario(cfg, sc, mode);
    out << "tau*       " << ms(c.tau) << " (" << to_string(mode) << "), using " << num(f) << "x\n";
    return f * c.tau;
}

double default_horizon(const RunConfig& cfg) {
    if (cfg.horizon > 0.0) return cfg.horizon;
    return cfg.scenario == "example2" ? 10.0 : 20.0;
}

void print_header(const RunConfig& cfg, const Scenario& sc, std::ostream& out) {
    out << "scenario   " << sc.name << "  protocol " << to_string(cfg.protocol) << "  estimator "
        << to_string(cfg.estimator) << "\n";
    out << "delay      " << ms(cfg.d);
    if (cfg.d_rate > 0.0) out << "  rate bound " << num(cfg.d_rate);
    out << "\n";
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
    Scenario sc = make_scenario(cfg, cfg.d);
    print_header(cfg, sc, out);
    MatiCertificate c = certify_scenario(cfg, sc, cfg.mode);
    out << "mode       " << to_string(c.mode) << "\n";
    out << "L          " << num(sc.growth_l) << "\n";
    out << "gamma_H    " << num(c.gamma_h) << "\n";
    out << "tau*       " << ms(c.tau) << "\n";
    out << "epsilon    " << ms(c.epsilon) << "\n";
    out << "witness    lambda " << num(c.witness.lambda) << "  M " << num(c.witness.big_m) << "  r "
        << num(c.witness.r) << "  lambda2 " << num(c.witness.lambda2) << "\n";
    out << "margins    I " << num(c.margin_I) << "  II " << num(c.margin_II) << "\n";
    out << "gamma_W    " << num(c.gamma_w) << "\n";
    char sg[96];
    std::snprintf(sg, sizeof sg, "%.15g < %.10g", c.gamma_w * c.gamma_h, c.small_gain_bound);
    out << "small gain gamma_W*gamma_H " << sg << "\n";
    out << "K_W        " << num(c.k_w) << "\n";
    out << "bias       " << num(c.bias) << "\n";
    if (c.composite) {
        out << "w->(H,e)   gain " << num(c.composite->gain) << "  bias " << num(c.composite->bias) << "\n";
        if (c.composite->has_detectability)
            out << "w->(x,e)   gain " << num(c.composite->xe_gain) << "  bias " << num(c.composite->xe_bias)
                << "\n";
    }
    if (auto path = output_target(cfg, "certificate.json")) {
        write_file(*path, c.to_json() + "\n");
        out << "wrote      " << path->string() << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    ExampleOptions opt = cfg.gains;
    opt.k_nu = cfg.k_nu;
    SweepTemplate base = scenario_sweep(cfg.scenario, cfg.d_rate, cfg.protocol, cfg.estimator, cfg.mode, opt);
    SweepTemplate tmpl = [base, eps = cfg.epsilon](double d) {
        SweepPoint pt = base(d);
        pt.params.epsilon = eps;
        return pt;
    };
    auto rows = sweep(tmpl, cfg.d_grid, cfg.protocol, cfg.estimator, cfg.mode, search_config(cfg), cfg.workers);
    const std::string csv = sweep_csv(rows);
    auto path = output_target(cfg, "sweep.csv");
    if (!path) {
        if (cfg.svg) throw UsageError("--svg needs --output or MATI_OUTPUT_DIR");
        out << csv;
        return kExitOk;
    }
    write_file(*path, csv);
    int certified = 0;
    for (const auto& r : rows) certified += r.cert ? 1 : 0;
    out << "wrote " << path->string() << " (" << rows.size() << " rows, " << certified << " certified)\n";
    if (cfg.svg) {
        Series s{to_string(cfg.protocol) + " " + to_string(cfg.estimator), {}, {}};
        for (const auto& r : rows) {
            if (!r.cert) continue;
            s.x.push_back(r.d * 1e3);
            s.y.push_back(r.cert->tau * 1e3);
        }
        fs::path svg = *path;
        svg.replace_extension(".svg");
        write_file(svg, svg_line_chart(cfg.scenario + " MATI (" + to_string(cfg.mode) + ")", "delay [ms]",
                                       "tau* [ms]", {s}));
        out << "wrote " << svg.string() << "\n";
    }
    return kExitOk;
}

Vec random_history(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec z(dim);
    for (int i = 0; i < dim; ++i) z(i) = u(rng);
    return z;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    Scenario sc = make_scenario(cfg, cfg.d);
    print_header(cfg, sc, out);
    SimConfig sim;
    sim.tau = resolve_tau(cfg, sc, cfg.mode, out);
    sim.epsilon = cfg.epsilon.value_or(0.0);
    sim.horizon = default_horizon(cfg);
    sim.seed = cfg.seed;
    sim.spacing = cfg.spacing == "fixed" ? Spacing::Fixed : Spacing::Random;
    sim.initial = constant_history(random_history(sc.state_dim + sc.error_dim, cfg.seed));
    SimTrace tr = integrate(sc, sim);
    out << "tau        " << ms(sim.tau) << "  step " << ms(tr.step) << "  horizon " << num(sim.horizon)
        << " s\n";
    out << "events     " << tr.events.size() << "\n";
    out << "|(x,e)(T)| " << num(tr.final_state.norm()) << "  (initial " << num(tr.initial_norm) << ")\n";
    out << "L2 norms   x " << num(tr.norms.x) << "  e " << num(tr.norms.e) << "  H " << num(tr.norms.h) << "\n";
    out << "growth     max violation " << num(verify_growth_inequality(tr, sc)) << "\n";
    if (auto path = output_target(cfg, "trace.csv")) {
        write_file(*path, trace_csv(tr));
        out << "wrote      " << path->string() << "\n";
        if (cfg.svg) {
            std::vector<Series> ss;
            for (int i = 0; i < tr.nx; ++i) ss.push_back({"x" + std::to_string(i + 1), tr.t, {}});
            for (std::size_t k = 0; k < tr.t.size(); ++k)
                for (int i = 0; i < tr.nx; ++i) ss[i].y.push_back(tr.x[k](i));
            fs::path svg = *path;
            svg.replace_extension(".svg");
            write_file(svg, svg_line_chart(sc.name + " trajectory", "t [s]", "state", ss));
            out << "wrote      " << svg.string() << "\n";
        }
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    Scenario sc = make_scenario(cfg, cfg.d);
    print_header(cfg, sc, out);
    const double tau = resolve_tau(cfg, sc, CertMode::Ugas, out);
    UgasConfig uc;
    uc.trials = cfg.trials;
    uc.horizon = default_horizon(cfg);
    uc.seed = cfg.seed;
    uc.check_growth = true;
    uc.workers = cfg.workers;
    UgasReport rep = verify_ugas(sc, tau, uc);
    out << "tau        " << ms(tau) << "  horizon " << num(uc.horizon) << " s\n";
    out << "converged  " << rep.converged << "/" << rep.trials << "  (|(x,e)(T)| < 1e-3 initial)\n";
    out << "diverged   " << rep.diverged << "\n";
    out << "worst      " << num(rep.worst_ratio) << "\n";
    out << "growth     max violation " << num(rep.max_growth_violation) << "\n";
    return kExitOk;
}

int cmd_gain(const RunConfig& cfg, std::ostream& out) {
    LmiProblem p;
    const bool delayed = cfg.d > 0.0;
    if (cfg.problem == "tod") p = example1_lmi(Example1Output::Tod, delayed);
    if (cfg.problem == "rr") p = example1_lmi(Example1Output::Rr, delayed);
    if (cfg.problem == "detect") p = example1_lmi(Example1Output::Detectability, delayed);
    if (cfg.problem == "scalar") p = scalar_sanity_lmi();
    GainEstimate g = estimate_l2_gain(p, cfg.tolerance);
    Eigen::IOFormat f(Eigen::FullPrecision, 0, " ", "\n", "           ");
    out << "problem    " << cfg.problem << (p.delayed ? " (delayed)" : " (undelayed)") << "\n";
    out << "gamma_H    " << num(g.gamma_h) << "\n";
    out << "margin     " << num(g.margin) << "\n";
    out << "C\n" << g.c_mat.format(f) << "\n";
    if (p.delayed) out << "E\n" << g.e_mat.format(f) << "\n";
    if (auto path = output_target(cfg, "gain_trace.csv")) {
        std::string csv = "gamma,feasible,margin\n";
        for (const auto& t : g.trace) csv += num(t.gamma) + "," + (t.feasible ? "1" : "0") + "," + num(t.margin) + "\n";
        write_file(*path, csv);
        out << "wrote      " << path->string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        if (cfg.command == "certify") return cmd_certify(cfg, out);
        if (cfg.command == "sweep") return cmd_sweep(cfg, out);
        if (cfg.command == "simulate") return cmd_simulate(cfg, out);
        if (cfg.command == "verify") return cmd_verify(cfg, out);
        return cmd_gain(cfg, out);
    } catch (const InfeasibleTarget& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace mati::cli
