#include "mati/smallgain/certify.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mati/core/errors.hpp"
#include "mati/razumikhin/conditions.hpp"

namespace mati {

namespace {

constexpr double kCapShrink = 1.0 - 1e-12;

// Best margin of condition (I) over M in (1, cap) at fixed tau.
// The bracketed expression is convex in M with minimiser e^{lambda tau} / (tau lambda1).
struct MChoice {
    double big_m;
    double margin;
};

MChoice best_m(double tau, double lambda, double r, double lambda1, double cap) {
    const double m_hi = std::isfinite(cap) ? cap * kCapShrink : kInf;
    double m;
    if (lambda1 == 0.0) {
        m = std::isfinite(m_hi) ? m_hi : std::exp(2.0 * tau * (lambda + r) + 1.0);
    } else if (tau == 0.0) {
        m = std::isfinite(m_hi) ? m_hi : 2.0;
    } else {
        m = std::exp(lambda * tau) / (tau * lambda1);
        if (!(m <= m_hi)) m = m_hi;
    }
    const double m_lo = std::nextafter(1.0, 2.0);
    if (!(m > m_lo)) m = m_lo;
    double margin = std::log(m) - tau * (lambda + r + lambda1 * m * std::exp(-lambda * tau));
    return {m, margin};
}

double tau_bound_II(double lambda, double r, double lambda1, double lambda2, double d_max) {
    double denom = lambda + r + (lambda1 / lambda2) * std::exp(lambda * d_max);
    if (!std::isfinite(denom)) return 0.0;
    return -std::log(lambda2) / denom;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (n - 1));
    return v;
}

struct Evaluation {
    double lambda = 0, r = 0, lambda2 = 0, tau = 0, big_m = 1;
    bool found = false;
};

struct Problem {
    double a, c, d_max, gamma_h, kappa;
    double lambda_lo, lambda_hi;  // search box in lambda; r box follows r_center
    SearchConfig cfg;

    double lambda2_for(double lambda, double r) const {
        if (c != 0.0) return c * c;
        return best_free_lambda2(lambda, r, a, d_max, cfg.lambda2_floor);
    }

    Evaluation eval(double lambda, double r) const {
        Evaluation ev;
        ev.lambda = lambda;
        ev.r = r;
        if (!(lambda > 0.0) || !(r > 0.0) || !std::isfinite(lambda) || !std::isfinite(r)) return ev;
        ev.lambda2 = lambda2_for(lambda, r);
        const double cap = m_cap(lambda, gamma_h, kappa);
        if (!(cap > 1.0)) return ev;
        auto s = max_interval(a, d_max, lambda, r, ev.lambda2, cap, cfg);
        ev.found = s.found;
        ev.tau = s.tau;
        ev.big_m = s.big_m;
        return ev;
    }

    double r_center(double lambda, double lambda2) const {
        if (a == 0.0) return cfg.r_floor;
        double e = std::exp(std::min(0.5 * lambda * d_max, 300.0));
        return a * e / std::sqrt(lambda2);
    }
};

double nm_objective(const gsl_vector* v, void* params) {
    const auto* pb = static_cast<const Problem*>(params);
    double lambda = std::exp(gsl_vector_get(v, 0));
    double r = std::exp(gsl_vector_get(v, 1));
    if (!(lambda >= pb->lambda_lo && lambda <= pb->lambda_hi)) return 0.0;
    double rc = pb->r_center(lambda, pb->c != 0.0 ? pb->c * pb->c : 0.5);
    double span = std::pow(10.0, pb->cfg.r_span);
    if (!(r >= rc / span && r <= rc * span)) return 0.0;
    auto ev = pb->eval(lambda, r);
    return ev.found ? -ev.tau : 0.0;
}

Evaluation refine(const Problem& pb, const Evaluation& start) {
    const gsl_multimin_fminimizer_type* T = gsl_multimin_fminimizer_nmsimplex2;
    std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(T, 2), gsl_multimin_fminimizer_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2), gsl_vector_free);
    std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2), gsl_vector_free);
    gsl_vector_set(x.get(), 0, std::log(start.lambda));
    gsl_vector_set(x.get(), 1, std::log(start.r));
    gsl_vector_set_all(step.get(), 0.05);

    gsl_multimin_function fn;
    fn.n = 2;
    fn.f = nm_objective;
    fn.params = const_cast<Problem*>(&pb);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get());
    for (int it = 0; it < pb.cfg.refine_iterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), 1e-9) == GSL_SUCCESS) break;
    }
    auto best = pb.eval(std::exp(gsl_vector_get(s->x, 0)), std::exp(gsl_vector_get(s->x, 1)));
    return (best.found && best.tau > start.tau) ? best : start;
}

}  // namespace

double small_gain_bound(CertMode mode, std::optional<double> gamma_d, std::optional<double> gamma_des) {
    if (mode != CertMode::LpWithTarget) return 1.0;
    if (!gamma_d || !gamma_des) throw std::invalid_argument("target mode needs gamma_d and gamma_des");
    if (!(*gamma_d >= 0.0) || !(*gamma_des > 0.0))
        throw std::invalid_argument("target mode: need gamma_d >= 0 and gamma_des > 0");
    double kappa = 1.0 - *gamma_d / *gamma_des;
    if (!(kappa > 0.0))
        throw InfeasibleTarget("infeasible target: gamma_d >= gamma_des leaves no room for the error gain");
    return kappa;
}

double m_cap(double lambda, double gamma_h, double kappa) {
    if (gamma_h == 0.0) return kInf;
    double q = kappa * lambda / (2.0 * gamma_h);
    return q * q;
}

double best_free_lambda2(double lambda, double r, double a, double d_max, double floor) {
    const double beta = (a * a / r) * std::exp(lambda * d_max);
    const double alpha = lambda + r;
    if (beta == 0.0 || !std::isfinite(beta)) return floor;
    // tau_II(s) = s / (alpha + beta e^s) with s = -ln lambda2 is unimodal; golden section on s.
    auto f = [&](double s) { return s / (alpha + beta * std::exp(s)); };
    double lo = 1e-12, hi = -std::log(floor);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    return std::clamp(std::exp(-0.5 * (lo + hi)), floor, 1.0 - 1e-12);
}

IntervalSearch max_interval(double a, double d_max, double lambda, double r, double lambda2,
                            double cap, const SearchConfig& cfg) {
    IntervalSearch out;
    const double l1 = a * a / r;
    double ub = tau_bound_II(lambda, r, l1, lambda2, d_max);
    if (std::isfinite(cap)) ub = std::min(ub, std::log(cap) / lambda);  // (I) needs lambda tau < ln M
    if (!(ub > 0.0)) return out;

    auto feasible = [&](double tau) {
        if (!(tau * (lambda + r + (l1 / lambda2) * std::exp(lambda * d_max)) < -std::log(lambda2)))
            return false;
        return best_m(tau, lambda, r, l1, cap).margin > 0.0;
    };

    // The feasible set in tau need not be an interval: scan down from the bound
    // and stop at the first feasible point, then bisect the bracket above it.
    double hi = ub;
    double lo = ub * (1.0 - 1e-12);
    const double stop = ub * 1e-12;
    while (lo > stop && !feasible(lo)) {
        hi = lo;
        lo /= cfg.scan_ratio;
    }
    if (!(lo > stop)) return out;
    for (int it = 0; it < cfg.bisection_steps; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (feasible(mid) ? lo : hi) = mid;
    }
    // Step back from the boundary so the stored witness keeps a small positive margin.
    if (double shy = lo * (1.0 - 1e-9); feasible(shy)) lo = shy;
    out.tau = lo;
    out.big_m = best_m(lo, lambda, r, l1, cap).big_m;
    out.found = true;
    return out;
}

MatiCertificate certify(const ErrorSystemParams& params, double gamma_h, CertMode mode,
                        std::optional<double> gamma_d, std::optional<double> gamma_des,
                        const SearchConfig& search) {
    params.validate();
    if (!(gamma_h >= 0.0) || !std::isfinite(gamma_h))
        throw std::invalid_argument("certify: gamma_h must be finite and >= 0");
    if (gamma_d && gamma_des && mode == CertMode::LpWithTarget && !(*gamma_d < *gamma_des))
        throw InfeasibleTarget("infeasible target: gamma_d must be below gamma_des");
    const double kappa = small_gain_bound(mode, gamma_d, gamma_des);

    Problem pb{params.a, params.c, params.d_max, gamma_h, kappa, 0.0, 0.0, search};
    const double lambda_sg = gamma_h > 0.0 ? 2.0 * gamma_h / kappa : 0.0;
    const double grid_lo = std::max(search.lambda_min, lambda_sg * (1.0 + 1e-9));
    const double grid_hi = std::max(search.lambda_max, 100.0 * grid_lo);
    pb.lambda_lo = grid_lo;
    pb.lambda_hi = grid_hi;

    Evaluation best;
    for (double lambda : logspace(grid_lo, grid_hi, search.lambda_points)) {
        double l2_ref = params.c != 0.0 ? params.c * params.c : 0.5;
        double rc = pb.r_center(lambda, l2_ref);
        double span = std::pow(10.0, search.r_span);
        for (double r : logspace(rc / span, rc * span, search.r_points)) {
            auto ev = pb.eval(lambda, r);
            if (ev.found && ev.tau > best.tau) best = ev;
        }
    }
    if (!best.found)
        throw SearchFailure("certify: witness search found no feasible transmission interval");
    if (search.refine) best = refine(pb, best);

    MatiCertificate cert;
    cert.params = params;
    cert.mode = mode;
    cert.gamma_h = gamma_h;
    cert.small_gain_bound = kappa;
    cert.p_order = search.p_order;
    cert.tau = best.tau;
    cert.witness = RazumikhinWitness{best.lambda, best.big_m, best.r, best.lambda2};

    auto rep = check_conditions(cert.witness, cert.tau, params.a, params.d_max);
    cert.gamma_w = error_gain(cert.witness);
    if (!rep.feasible || !(cert.gamma_w * gamma_h < kappa))
        throw SearchFailure("certify: refined witness failed re-validation");
    cert.margin_I = rep.margin_I;
    cert.margin_II = rep.margin_II;

    if (params.epsilon) {
        if (*params.epsilon > cert.tau)
            throw SearchFailure("certify: no feasible interval at or above the requested epsilon");
        cert.epsilon = *params.epsilon;
    } else {
        cert.epsilon = cert.tau / 10.0;
    }
    const double k_nu = mode == CertMode::Ugas ? 0.0 : params.k_nu;
    cert.params.k_nu = k_nu;
    cert.bias = error_bias(cert.witness, params.a_upper * k_nu, cert.epsilon);
    cert.k_w = initial_gain(cert.witness, params.a, params.d_max, search.p_order);

    auto comp = compose_small_gain(cert.gamma_w, gamma_h, cert.k_w, search.k_h, cert.bias,
                                   params.a_lower, params.a_upper);
    if (gamma_d) comp = compose_detectability(comp, *gamma_d, search.k_d, params.a_upper);
    cert.composite = comp;
    return cert;
}

CompositeGains compose_small_gain(double gamma_w, double gamma_h, double k_w, double k_h,
                                  double bias, double a_lower, double a_upper) {
    if (!(gamma_w >= 0.0) || !(gamma_h >= 0.0) || !(k_w >= 0.0) || !(k_h >= 0.0) || !(bias >= 0.0))
        throw std::invalid_argument("compose_small_gain: inputs must be >= 0");
    if (!(a_lower > 0.0) || !(a_upper >= a_lower))
        throw std::invalid_argument("compose_small_gain: need 0 < a_lower <= a_upper");
    const double loop = gamma_w * gamma_h;
    if (!(loop < 1.0)) throw std::domain_error("compose_small_gain: gamma_w * gamma_h must be < 1");
    const double s = 1.0 / (1.0 - loop);

    CompositeGains g;
    g.gamma_h = gamma_h;
    g.k_h = k_h;
    g.error_bias = bias;
    g.e_e0 = a_upper * k_w / a_lower * s;
    g.e_x0 = gamma_w * k_h / a_lower * s;
    g.e_omega = loop / a_lower * s;
    g.e_bias = 1.0 / a_lower * s;
    g.h_x0 = k_h * s;
    g.h_e0 = gamma_h * a_upper * k_w * s;
    g.h_omega = gamma_h * s;
    g.h_bias = gamma_h * s;
    g.gain = gamma_h * (1.0 + gamma_w / a_lower) * s;
    g.bias = (gamma_h + 1.0 / a_lower) * s * bias;
    return g;
}

CompositeGains compose_detectability(const CompositeGains& composite, double gamma_d, double k_d,
                                     double a_upper) {
    if (!(gamma_d >= 0.0) || !(k_d >= 0.0)) throw std::invalid_argument("compose_detectability: gains must be >= 0");
    CompositeGains g = composite;
    const double gh = composite.gamma_h;
    // ||x|| <= (K_d + gamma_d K_H)||x0|| + a gamma_d (gamma_H + 1)||e|| + gamma_d (gamma_H + 1)||omega||,
    // then ||e|| is replaced by its own bound.
    const double through_e = a_upper * gamma_d * (gh + 1.0);
    const double b = composite.error_bias;
    g.has_detectability = true;
    g.x_x0 = k_d + gamma_d * composite.k_h + through_e * composite.e_x0;
    g.x_e0 = through_e * composite.e_e0;
    g.x_omega = gamma_d * (gh + 1.0) + through_e * composite.e_omega;
    g.x_bias = through_e * composite.e_bias * b;
    g.xe_gain = g.x_omega + composite.e_omega;
    g.xe_bias = g.x_bias + composite.e_bias * b;
    return g;
}

double adjust_for_dropouts(double tau, int n_d) {
    if (n_d < 1) throw std::invalid_argument("adjust_for_dropouts: n_d must be >= 1");
    return tau / n_d;
}

double async_link_interval(double tau_rr) {
    if (!(tau_rr > 0.0)) throw std::invalid_argument("async_link_interval: tau must be > 0");
    return tau_rr;
}

}  // namespace mati
