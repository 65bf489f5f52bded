#include "mati/core/types.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace mati {

void ErrorSystemParams::validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("error system: a must be finite and >= 0");
    if (!(std::abs(c) < 1.0)) throw std::invalid_argument("error system: |c| must be < 1");
    if (!(d_max >= 0.0) || !std::isfinite(d_max)) throw std::invalid_argument("error system: d_max must be finite and >= 0");
    if (!(k_nu >= 0.0)) throw std::invalid_argument("error system: k_nu must be >= 0");
    if (epsilon && !(*epsilon > 0.0)) throw std::invalid_argument("error system: epsilon must be > 0");
    if (!(a_lower > 0.0) || !(a_upper >= a_lower))
        throw std::invalid_argument("error system: need 0 < a_lower <= a_upper");
}

void RazumikhinWitness::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("witness: lambda must be > 0");
    if (!(big_m > 1.0) || !std::isfinite(big_m)) throw std::invalid_argument("witness: M must be > 1");
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("witness: r must be > 0");
    if (!(lambda2 > 0.0 && lambda2 < 1.0)) throw std::invalid_argument("witness: lambda2 must lie in (0,1)");
}

RazumikhinWitness make_witness(double lambda, double big_m, double r, double c,
                               double lambda2_if_c_zero) {
    RazumikhinWitness w{lambda, big_m, r, c != 0.0 ? c * c : lambda2_if_c_zero};
    w.validate();
    return w;
}

std::string to_string(CertMode m) {
    switch (m) {
    case CertMode::Ugas: return "ugas";
    case CertMode::LpStable: return "lp";
    case CertMode::LpWithTarget: return "target";
    }
    return "?";
}

CertMode cert_mode_from_string(const std::string& s) {
    if (s == "ugas") return CertMode::Ugas;
    if (s == "lp" || s == "lp_stable") return CertMode::LpStable;
    if (s == "target" || s == "lp_with_target") return CertMode::LpWithTarget;
    throw std::invalid_argument("unknown mode '" + s + "' (expected ugas|lp|target)");
}

std::string to_string(ProtocolKind k) {
    return k == ProtocolKind::RoundRobin ? "rr" : "tod";
}

ProtocolKind protocol_kind_from_string(const std::string& s) {
    if (s == "rr") return ProtocolKind::RoundRobin;
    if (s == "tod") return ProtocolKind::TryOnceDiscard;
    throw std::invalid_argument("unknown protocol '" + s + "' (expected rr|tod)");
}

std::string to_string(EstimatorKind k) { return k == EstimatorKind::Zoh ? "zoh" : "model"; }

EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "zoh") return EstimatorKind::Zoh;
    if (s == "model") return EstimatorKind::Model;
    throw std::invalid_argument("unknown estimator '" + s + "' (expected zoh|model)");
}

namespace {

using nlohmann::json;

// JSON has no infinity; p = inf is stored as the string "inf".
json number_or_inf(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double read_number(const json& j) {
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::invalid_argument("certificate: bad number '" + s + "'");
    }
    return j.get<double>();
}

}  // namespace

std::string MatiCertificate::to_json() const {
    json j;
    j["tau"] = tau;
    j["epsilon"] = epsilon;
    j["witness"] = {{"lambda", witness.lambda}, {"M", witness.big_m}, {"r", witness.r},
                    {"lambda2", witness.lambda2}};
    json p = {{"a", params.a}, {"c", params.c}, {"d_max", params.d_max}, {"k_nu", params.k_nu},
              {"a_lower", params.a_lower}, {"a_upper", params.a_upper}};
    p["epsilon"] = params.epsilon ? json(*params.epsilon) : json(nullptr);
    j["params"] = p;
    j["gamma_h"] = gamma_h;
    j["gamma_w"] = gamma_w;
    j["bias"] = bias;
    j["k_w"] = number_or_inf(k_w);
    j["p"] = number_or_inf(p_order);
    j["mode"] = to_string(mode);
    j["small_gain_bound"] = small_gain_bound;
    j["margin_I"] = margin_I;
    j["margin_II"] = margin_II;
    if (composite) {
        const auto& g = *composite;
        json cg = {{"gamma_h", g.gamma_h}, {"k_h", g.k_h}, {"error_bias", g.error_bias}, {"gain", g.gain}, {"bias", g.bias},
                   {"e_e0", g.e_e0}, {"e_x0", g.e_x0}, {"e_omega", g.e_omega}, {"e_bias", g.e_bias},
                   {"h_e0", g.h_e0}, {"h_x0", g.h_x0}, {"h_omega", g.h_omega}, {"h_bias", g.h_bias},
                   {"has_detectability", g.has_detectability},
                   {"x_e0", g.x_e0}, {"x_x0", g.x_x0}, {"x_omega", g.x_omega}, {"x_bias", g.x_bias},
                   {"xe_gain", g.xe_gain}, {"xe_bias", g.xe_bias}};
        j["composite"] = cg;
    }
    return j.dump(2);
}

MatiCertificate MatiCertificate::from_json(const std::string& text) {
    json j = json::parse(text);
    MatiCertificate c;
    c.tau = j.at("tau").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    const auto& w = j.at("witness");
    c.witness = {w.at("lambda").get<double>(), w.at("M").get<double>(), w.at("r").get<double>(),
                 w.at("lambda2").get<double>()};
    const auto& p = j.at("params");
    c.params.a = p.at("a").get<double>();
    c.params.c = p.at("c").get<double>();
    c.params.d_max = p.at("d_max").get<double>();
    c.params.k_nu = p.at("k_nu").get<double>();
    c.params.a_lower = p.at("a_lower").get<double>();
    c.params.a_upper = p.at("a_upper").get<double>();
    if (!p.at("epsilon").is_null()) c.params.epsilon = p.at("epsilon").get<double>();
    c.gamma_h = j.at("gamma_h").get<double>();
    c.gamma_w = j.at("gamma_w").get<double>();
    c.bias = j.at("bias").get<double>();
    c.k_w = read_number(j.at("k_w"));
    c.p_order = read_number(j.at("p"));
    c.mode = cert_mode_from_string(j.at("mode").get<std::string>());
    c.small_gain_bound = j.at("small_gain_bound").get<double>();
    c.margin_I = j.at("margin_I").get<double>();
    c.margin_II = j.at("margin_II").get<double>();
    if (j.contains("composite")) {
        const auto& cg = j.at("composite");
        CompositeGains g;
        g.gamma_h = cg.at("gamma_h").get<double>();
        g.k_h = cg.at("k_h").get<double>();
        g.error_bias = cg.at("error_bias").get<double>();
        g.gain = cg.at("gain").get<double>();
        g.bias = cg.at("bias").get<double>();
        g.e_e0 = cg.at("e_e0").get<double>();
        g.e_x0 = cg.at("e_x0").get<double>();
        g.e_omega = cg.at("e_omega").get<double>();
        g.e_bias = cg.at("e_bias").get<double>();
        g.h_e0 = cg.at("h_e0").get<double>();
        g.h_x0 = cg.at("h_x0").get<double>();
        g.h_omega = cg.at("h_omega").get<double>();
        g.h_bias = cg.at("h_bias").get<double>();
        g.has_detectability = cg.at("has_detectability").get<bool>();
        g.x_e0 = cg.at("x_e0").get<double>();
        g.x_x0 = cg.at("x_x0").get<double>();
        g.x_omega = cg.at("x_omega").get<double>();
        g.x_bias = cg.at("x_bias").get<double>();
        g.xe_gain = cg.at("xe_gain").get<double>();
        g.xe_bias = cg.at("xe_bias").get<double>();
        c.composite = g;
    }
    return c;
}

}  // namespace mati
