#include "mati/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <set>

namespace mati::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("malformed " + what + ": '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw UsageError("malformed " + what + ": '" + s + "'");
    return v;
}

// Splits a trailing unit ("ms" or "s") off a value.
std::pair<std::string, double> split_unit(const std::string& text) {
    std::string t = trim(text);
    if (t.size() > 2 && t.ends_with("ms")) return {t.substr(0, t.size() - 2), 1e-3};
    if (t.size() > 1 && t.ends_with("s")) return {t.substr(0, t.size() - 1), 1.0};
    return {t, 0.0};
}

}  // namespace

double parse_duration(const std::string& text, bool require_unit) {
    auto [num, scale] = split_unit(text);
    double v = parse_number(trim(num), "duration");
    if (scale == 0.0) {
        if (require_unit && v != 0.0) throw UsageError("duration needs a unit (ms or s): '" + text + "'");
        scale = 1.0;
    }
    if (v < 0.0) throw UsageError("negative duration: '" + text + "'");
    return v * scale;
}

std::vector<double> parse_delay_grid(const std::string& text, bool require_unit) {
    std::vector<double> out;
    if (text.find(',') != std::string::npos) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto next = text.find(',', pos);
            if (next == std::string::npos) next = text.size();
            out.push_back(parse_duration(text.substr(pos, next - pos), require_unit));
            pos = next + 1;
        }
        return out;
    }
    auto [body, scale] = split_unit(text);
    if (scale == 0.0) {
        if (require_unit) throw UsageError("delay grid needs a unit (ms or s): '" + text + "'");
        scale = 1.0;
    }
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = body.find(':', pos);
        parts.push_back(trim(body.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (parts.size() == 1) return {parse_number(parts[0], "delay") * scale};
    if (parts.size() != 3) throw UsageError("delay grid must be start:step:stop: '" + text + "'");
    const double a = parse_number(parts[0], "grid start"), h = parse_number(parts[1], "grid step"),
                 b = parse_number(parts[2], "grid stop");
    if (a < 0.0 || !(h > 0.0) || b < a) throw UsageError("bad delay grid: '" + text + "'");
    const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    for (long k = 0; k <= n; ++k) out.push_back((a + h * static_cast<double>(k)) * scale);
    return out;
}

void parse_tau(const std::string& text, RunConfig& cfg, bool require_unit) {
    std::string t = trim(text);
    if (!t.empty() && (t.back() == 'x' || t.back() == 'X')) {
        double f = parse_number(t.substr(0, t.size() - 1), "tau multiple");
        if (!(f > 0.0)) throw UsageError("tau multiple must be positive");
        cfg.tau = f;
        cfg.tau_relative = true;
        return;
    }
    double v = parse_duration(t, require_unit);
    if (!(v > 0.0)) throw UsageError("tau must be positive");
    cfg.tau = v;
    cfg.tau_relative = false;
}

void RunConfig::validate() const {
    static const std::set<std::string> commands{"certify", "sweep", "simulate", "gain", "verify"};
    if (!commands.contains(command)) throw UsageError("unknown command: " + command);
    if (command != "gain" && scenario != "example1" && scenario != "example2")
        throw UsageError("unknown scenario: " + scenario);
    if (scenario == "example1" && d_rate != 0.0)
        throw UsageError("example1 has constant delays; drop --d-rate");
    if (command == "sweep" && d_grid.empty()) throw UsageError("sweep needs --d-grid");
    if (command == "gain") {
        static const std::set<std::string> problems{"tod", "rr", "detect", "scalar"};
        if (!problems.contains(problem)) throw UsageError("unknown gain problem: " + problem);
        if (!(tolerance > 0.0)) throw UsageError("tolerance must be positive");
    }
    if (spacing != "random" && spacing != "fixed") throw UsageError("spacing must be random or fixed");
    if (trials < 1) throw UsageError("trials must be at least 1");
    if (!(horizon >= 0.0)) throw UsageError("horizon must be non-negative");
    if (!(p_order >= 1.0)) throw UsageError("p must be >= 1");
    if (!(k_nu >= 0.0)) throw UsageError("noise bound must be non-negative");
    if (epsilon && !(*epsilon > 0.0)) throw UsageError("epsilon must be positive");
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& ex) {
        throw UsageError("cannot read config: " + std::string(ex.what()));
    }
    static const std::set<std::string> known{
        "scenario.name", "scenario.protocol", "scenario.estimator", "scenario.delay",
        "scenario.delay_rate", "scenario.noise_bound", "scenario.gain_set", "scenario.gamma_ugas",
        "scenario.gamma_lp", "scenario.gamma_d", "scenario.gamma_des", "certify.mode",
        "certify.epsilon", "certify.p", "sweep.grid", "sweep.svg", "simulate.tau",
        "simulate.horizon", "simulate.seed", "simulate.spacing", "simulate.trials", "output.path"};
    for (const auto& [section, body] : tree) {
        for (const auto& [key, value] : body) {
            if (!known.contains(section + "." + key))
                throw UsageError("unknown config key: " + section + "." + key);
        }
    }
    auto get = [&](const char* key) { return tree.get_optional<std::string>(key); };
    auto number = [&](const std::string& v, const char* what) { return parse_number(trim(v), what); };
    try {
        if (auto v = get("scenario.name")) cfg.scenario = trim(*v);
        if (auto v = get("scenario.protocol")) cfg.protocol = protocol_kind_from_string(trim(*v));
        if (auto v = get("scenario.estimator")) cfg.estimator = estimator_from_string(trim(*v));
        if (auto v = get("scenario.delay")) cfg.d = parse_duration(*v, true);
        if (auto v = get("scenario.delay_rate")) cfg.d_rate = number(*v, "delay_rate");
        if (auto v = get("scenario.noise_bound")) cfg.k_nu = number(*v, "noise_bound");
        if (auto v = get("scenario.gain_set")) {
            std::string s = trim(*v);
            if (s != "lmi" && s != "figure") throw UsageError("gain_set must be lmi or figure");
            cfg.gains.gain_set = s == "lmi" ? GainSet::Lmi : GainSet::Figure;
        }
        if (auto v = get("scenario.gamma_ugas")) cfg.gains.gamma_ugas = number(*v, "gamma_ugas");
        if (auto v = get("scenario.gamma_lp")) cfg.gains.gamma_lp = number(*v, "gamma_lp");
        if (auto v = get("scenario.gamma_d")) cfg.gains.gamma_d = number(*v, "gamma_d");
        if (auto v = get("scenario.gamma_des")) cfg.gains.gamma_des = number(*v, "gamma_des");
        if (auto v = get("certify.mode")) cfg.mode = cert_mode_from_string(trim(*v));
        if (auto v = get("certify.epsilon")) cfg.epsilon = parse_duration(*v, true);
        if (auto v = get("certify.p")) cfg.p_order = trim(*v) == "inf" ? kInf : number(*v, "p");
        if (auto v = get("sweep.grid")) cfg.d_grid = parse_delay_grid(*v, true);
        if (auto v = get("sweep.svg")) cfg.svg = trim(*v) == "true" || trim(*v) == "1";
        if (auto v = get("simulate.tau")) parse_tau(*v, cfg, true);
        if (auto v = get("simulate.horizon")) cfg.horizon = parse_duration(*v, true);
        if (auto v = get("simulate.seed")) cfg.seed = static_cast<std::uint64_t>(number(*v, "seed"));
        if (auto v = get("simulate.spacing")) cfg.spacing = trim(*v);
        if (auto v = get("simulate.trials")) cfg.trials = static_cast<int>(number(*v, "trials"));
        if (auto v = get("output.path")) cfg.output = trim(*v);
    } catch (const UsageError&) {
        throw;
    } catch (const std::invalid_argument& ex) {
        throw UsageError(ex.what());
    }
}

}  // namespace mati::cli
