#include "mati/razumikhin/conditions.hpp"

#include <cmath>
#include <stdexcept>

namespace mati {

FeasibilityReport check_conditions(const RazumikhinWitness& w, double tau, double a, double d_max) {
    w.validate();
    if (!(tau >= 0.0)) throw std::invalid_argument("check_conditions: tau must be >= 0");
    if (!(d_max >= 0.0)) throw std::invalid_argument("check_conditions: d_max must be >= 0");
    const double l1 = w.lambda1(a);
    FeasibilityReport rep;
    // lambda1 M e^{-lambda tau} may underflow to 0; that is the correct limit.
    rep.margin_I = std::log(w.big_m) - tau * (w.lambda + w.r + l1 * w.big_m * std::exp(-w.lambda * tau));
    rep.margin_II = -std::log(w.lambda2) -
                    tau * (w.lambda + w.r + (l1 / w.lambda2) * std::exp(w.lambda * d_max));
    if (std::isnan(rep.margin_II)) rep.margin_II = -kInf;  // 0 * inf when tau = 0 and e^{...} overflows
    rep.feasible = rep.margin_I > 0.0 && rep.margin_II > 0.0;
    return rep;
}

double error_gain(const RazumikhinWitness& w) {
    w.validate();
    return 2.0 / w.lambda * std::sqrt(w.big_m);
}

double error_bias(const RazumikhinWitness& w, double k_nu_tilde, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("error_bias: epsilon must be > 0");
    if (!(k_nu_tilde >= 0.0)) throw std::invalid_argument("error_bias: noise bound must be >= 0");
    w.validate();
    if (k_nu_tilde == 0.0) return 0.0;
    return k_nu_tilde * std::sqrt(w.big_m) / std::expm1(0.5 * w.lambda * epsilon);
}

double decay_envelope(const RazumikhinWitness& w, double xi0_norm, double t_elapsed) {
    if (!(t_elapsed >= 0.0)) throw std::invalid_argument("decay_envelope: elapsed time must be >= 0");
    return std::sqrt(w.big_m) * xi0_norm * std::exp(-0.5 * w.lambda * t_elapsed);
}

double initial_gain(const RazumikhinWitness& w, double a, double d_max, double p) {
    w.validate();
    if (!(p >= 1.0)) throw std::invalid_argument("initial_gain: p must be >= 1");
    double core = 2.0 * std::sqrt(w.big_m) *
                  (1.0 + std::abs(a) * (2.0 / w.lambda) * std::expm1(0.5 * d_max * w.lambda));
    if (std::isinf(p)) return core;
    return core * std::pow(1.0 / (p * w.lambda), 1.0 / p);
}

}  // namespace mati
