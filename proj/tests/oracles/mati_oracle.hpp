#pragma once

// Brute-force reference for the largest certified transmission interval.
// No closed-form M, no bisection: dense grids over (lambda, r, lambda2, M) and a
// descending geometric tau scan, pruned by the best interval seen so far.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

struct Options {
    int lambda_points = 400;
    int r_points = 400;
    int m_points = 400;
    int lambda2_points = 40;  // only when c = 0
    double tau_ratio = 1.0002;
    double m_ceiling = 1e6;   // used when gamma_h = 0
};

struct Result {
    double tau = 0.0;
    double lambda = 0.0, r = 0.0, big_m = 0.0, lambda2 = 0.0;
};

inline std::vector<double> geom(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        v[static_cast<std::size_t>(k)] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(k) / (n - 1));
    return v;
}

// Same search box as the solver under test: lambda in [max(1e-2, 2 gh/kappa), max(1e3, 100 lo)],
// r within two decades of a e^{lambda d/2}/sqrt(lambda2_ref) (or of 1e-2 when a = 0).
inline Result max_interval(double a, double c, double d, double gamma_h, double kappa,
                           const Options& opt = {}) {
    const double lam_sg = gamma_h > 0 ? 2.0 * gamma_h / kappa : 0.0;
    const double lam_lo = std::max(1e-2, lam_sg * (1.0 + 1e-9));
    const double lam_hi = std::max(1e3, 100.0 * lam_lo);
    const auto lambdas = geom(lam_lo, lam_hi, opt.lambda_points);
    const double l2_ref = c != 0.0 ? c * c : 0.5;

    std::vector<double> l2s;
    if (c != 0.0) l2s = {c * c};
    else {
        // s = -ln lambda2 spread geometrically over [1e-4, 27.6]
        for (double s : geom(1e-4, -std::log(1e-12), opt.lambda2_points)) l2s.push_back(std::exp(-s));
    }

    Result best;
    auto visit = [&](double lam, double r) {
        const double l1 = a * a / r;
        double m_max = gamma_h > 0 ? std::pow(kappa * lam / (2.0 * gamma_h), 2) * (1.0 - 1e-12)
                                   : opt.m_ceiling;
        if (!(m_max > 1.0)) return;
        std::vector<double> ms;
        for (double q : geom(1e-9, 1.0, opt.m_points)) ms.push_back(1.0 + (m_max - 1.0) * q);
        for (double l2 : l2s) {
            double den2 = lam + r + (l1 / l2) * std::exp(lam * d);
            double tau_ii = std::isfinite(den2) ? -std::log(l2) / den2 : 0.0;
            double ub = std::min(tau_ii, std::log(m_max) / (lam + r));
            if (!(ub > best.tau)) continue;
            for (double tau = ub * (1.0 - 1e-12); tau > best.tau; tau /= opt.tau_ratio) {
                if (!(tau * den2 < -std::log(l2))) continue;
                for (auto it = ms.rbegin(); it != ms.rend(); ++it) {
                    double m = *it;
                    if (tau * (lam + r + l1 * m * std::exp(-lam * tau)) < std::log(m)) {
                        best = {tau, lam, r, m, l2};
                        break;
                    }
                }
                if (best.tau == tau) break;
            }
        }
    };

    auto r_grid = [&](double lam) {
        double rc = a == 0.0 ? 1e-2 : a * std::exp(std::min(0.5 * lam * d, 300.0)) / std::sqrt(l2_ref);
        return geom(rc / 100.0, rc * 100.0, opt.r_points);
    };

    // Coarse pass first so pruning bites during the dense pass.
    for (std::size_t i = 0; i < lambdas.size(); i += 8) {
        auto rs = r_grid(lambdas[i]);
        for (std::size_t j = 0; j < rs.size(); j += 8) visit(lambdas[i], rs[j]);
    }
    for (double lam : lambdas)
        for (double r : r_grid(lam)) visit(lam, r);
    return best;
}

}  // namespace oracle
