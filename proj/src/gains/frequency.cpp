#include "mati/gains/frequency.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mati {

namespace {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;

int state_dim(const DelayedLti& s) {
    if (s.A.empty()) throw std::invalid_argument("delayed lti: no state matrix");
    return static_cast<int>(s.A.front().rows());
}

CMat delayed_sum(const std::vector<Eigen::MatrixXd>& ms, cd z, int rows, int cols) {
    CMat out = CMat::Zero(rows, cols);
    cd zk = 1.0;
    for (const auto& m : ms) {
        out += zk * m.cast<cd>();
        zk *= z;
    }
    return out;
}

CMat char_matrix(const DelayedLti& s, double w) {
    const int n = state_dim(s);
    cd z = std::exp(cd(0.0, -w * s.delay));
    return cd(0.0, w) * CMat::Identity(n, n) - delayed_sum(s.A, z, n, n);
}

double sigma_at(const DelayedLti& s, double w) {
    const int n = state_dim(s);
    const int m = static_cast<int>(s.B.front().cols());
    const int p = static_cast<int>(s.C.front().rows());
    cd z = std::exp(cd(0.0, -w * s.delay));
    CMat X = char_matrix(s, w).partialPivLu().solve(delayed_sum(s.B, z, n, m));
    CMat T = delayed_sum(s.C, z, p, n) * X;
    if (!s.D.empty()) T += delayed_sum(s.D, z, p, m);
    Eigen::JacobiSVD<CMat> svd(T);
    return svd.singularValues()(0);
}

}  // namespace

int unstable_roots(const DelayedLti& sys, const FrequencyGrid& grid) {
    const int n = state_dim(sys);
    // Track arg det(jwI - A(e^{-jwd})) from w = 0 to a frequency where the s^n term dominates.
    double coef = 0.0;
    for (const auto& a : sys.A) coef += a.norm();
    const double w_top = std::max(grid.w_max, 1e3 * (1.0 + coef));
    const int pts = 20000;
    double prev = std::arg(char_matrix(sys, 0.0).determinant());
    double total = 0.0;
    const double lo = 1e-6;
    for (int k = 0; k <= pts; ++k) {
        double w = k == 0 ? lo : lo * std::pow(w_top / lo, double(k) / pts);
        double cur = std::arg(char_matrix(sys, w).determinant());
        double d = cur - prev;
        while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
        while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
        total += d;
        prev = cur;
    }
    // Delta arg over [0, inf) equals (n - 2Z) pi / 2.
    double z = 0.5 * (n - 2.0 * total / std::numbers::pi);
    return static_cast<int>(std::lround(z));
}

double peak_gain(const DelayedLti& sys, const FrequencyGrid& grid, bool check_stability) {
    if (sys.B.empty() || sys.C.empty()) throw std::invalid_argument("delayed lti: missing B or C");
    if (check_stability && unstable_roots(sys, grid) != 0) return std::numeric_limits<double>::infinity();
    double best = sigma_at(sys, 0.0), best_w = 0.0;
    const double a = std::log(grid.w_min), b = std::log(grid.w_max);
    for (int k = 0; k < grid.points; ++k) {
        double w = std::exp(a + (b - a) * k / (grid.points - 1));
        double s = sigma_at(sys, w);
        if (s > best) {
            best = s;
            best_w = w;
        }
    }
    if (best_w > 0.0) {
        // Golden section in log w between the neighbouring grid points.
        const double step = (b - a) / (grid.points - 1);
        double lo = std::log(best_w) - step, hi = std::log(best_w) + step;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60; ++it) {
            double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            double f1 = sigma_at(sys, std::exp(x1)), f2 = sigma_at(sys, std::exp(x2));
            best = std::max({best, f1, f2});
            (f1 < f2 ? lo : hi) = (f1 < f2 ? x1 : x2);
        }
    }
    return best;
}

}  // namespace mati
