#include "mati/simulator/examples.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "mati/gains/frequency.hpp"

namespace mati {

namespace {

using M2 = Eigen::Matrix2d;
using V2 = Eigen::Vector2d;

M2 mat(double a, double b, double c, double d) {
    M2 m;
    m << a, b, c, d;
    return m;
}

Vec vec(const V2& v) { return Vec(v); }

double spectral_norm(const M2& m) {
    return Eigen::JacobiSVD<M2>(m).singularValues()(0);
}

double scale_for(ProtocolKind k) { return k == ProtocolKind::RoundRobin ? std::sqrt(2.0) : 1.0; }

void common_setup(Scenario& sc, ProtocolKind protocol, EstimatorKind estimator) {
    sc.state_dim = 2;
    sc.error_dim = 2;
    sc.disturbance_dim = 2;
    sc.links = default_partition(2);
    sc.protocol = make_protocol(protocol, 2);
    sc.estimator = estimator;
}

// ---- first example ---------------------------------------------------------

namespace ex1 {
const M2 A1 = mat(-0.5, 1, -2, -1);
const M2 A2 = mat(0, 0, 0, -0.3);
const M2 B1 = mat(-0.25, 0, 1, 0);
const M2 B = mat(0, 0, -2, -2);
const M2 C1 = mat(0.5, -1, 0, 0);
const M2 C2 = mat(0, 0, 2, 1);  // from differentiating the plant; the LMI keeps the printed one
const M2 C3 = mat(0, 0, 0, 0.3);
const M2 C4 = mat(0.25, 0, 0, 0);
const M2 C5 = mat(0, 0, -1, 0);
const M2 C6 = mat(-1, 0, 0, 0);
const M2 C7 = mat(0, 0, 0, -1);
const M2 P1 = mat(1, 0, 0, 0);
const M2 P2 = mat(0, 0, 0, 1);

// sin(u(t) x2(t - d_p1)) with u built from the received values
double nl(const V2& x, const V2& e, const V2& xd, const V2& xdp) {
    return std::sin((-2.0 * (x(0) + e(0)) - 2.0 * (xd(1) + e(1))) * xdp(1));
}

struct Gains {
    double ugas, lp;
};

Gains figure_gains(double d, EstimatorKind est) {
    const bool delayed = d > 0.0;
    if (est == EstimatorKind::Zoh) return delayed ? Gains{22.3631, 26.4601} : Gains{9.6598, 10.8958};
    return delayed ? Gains{27.3659, 31.7892} : Gains{4.3344, 5.3258};
}
}  // namespace ex1

// ---- pendulum ----------------------------------------------------------------

namespace ex2 {
constexpr double g = 9.8, len = 2.0;
const M2 A1 = mat(0, 1, -25, -1);
const M2 A2 = mat(0, 0, 0, -27);
const M2 B = mat(0, 0, -25, -27);
const M2 B1 = mat(0, -1, 0, 0);
const M2 B2 = mat(0, 0, 25, 1);  // from differentiating the plant
const M2 B3 = mat(0, 0, 0, 27);
const M2 C1 = mat(-1, 0, 0, 0);
const M2 C2 = mat(0, 0, 0, -1);
const M2 P1 = mat(1, 0, 0, 0);
const M2 P2 = mat(0, 0, 0, 1);
const M2 G = mat(0, 0, g / len, 0);  // sector direction of n in e1

// (g/L)(cos(x1 + e1) - cos(x1)) in product form
double n(double x1, double e1) {
    return -2.0 * g / len * std::sin(0.5 * (e1 + 2.0 * x1)) * std::sin(0.5 * e1);
}
}  // namespace ex2

}  // namespace

Scenario build_example1(double d, ProtocolKind protocol, EstimatorKind estimator,
                        const ExampleOptions& opt) {
    using namespace ex1;
    if (!(d >= 0.0)) throw std::invalid_argument("example1: d must be non-negative");
    Scenario sc;
    sc.name = "example1";
    common_setup(sc, protocol, estimator);
    sc.link_delays = {constant_delay(0.0), constant_delay(d)};
    sc.plant_delay = d;
    sc.growth_delay = constant_delay(d);
    sc.lookback = 2.0 * d;
    sc.k_nu = opt.k_nu;
    const bool model = estimator == EstimatorKind::Model;
    const double s = scale_for(protocol);

    sc.f = [d](double t, const History& h) {
        V2 x = h.x(t), xd = h.x(t - d), e = h.e(t), w = h.omega(t);
        double nv = nl(x, e, xd, xd);
        return vec(A1 * x + A2 * xd + B1 * x * nv + B * e + w);
    };
    sc.g = [d, model](double t, const History& h) {
        V2 x = h.x(t), xd = h.x(t - d), x2d = h.x(t - 2 * d);
        V2 ed = h.e(t - d), w = h.omega(t), wd = h.omega(t - d);
        double nd = nl(xd, ed, x2d, x2d);
        double nv = nl(x, h.e(t), xd, xd);
        V2 de = -B * ed + C1 * x + C2 * xd + C3 * x2d + C4 * x * nv + C5 * xd * nd + C6 * w + C7 * wd;
        if (model) de += B * (ed + P1 * xd + P2 * x2d);
        return vec(de);
    };
    sc.h_norm = [d, model, s](double t, const History& h) {
        V2 x = h.x(t), xd = h.x(t - d), x2d = h.x(t - 2 * d);
        V2 w = h.omega(t), wd = h.omega(t - d);
        V2 lin = C1 * x + C2 * xd + C3 * x2d + C6 * w + C7 * wd;
        if (model) lin += B * (P1 * xd + P2 * x2d);
        return s * (lin.norm() + (C4 * x).norm() + (C5 * xd).norm());
    };
    sc.growth_l = model ? 0.0 : s * spectral_norm(B);

    Gains gh = figure_gains(d, estimator);
    if (opt.gain_set == GainSet::Lmi && !model) gh = {18.7051, 18.7051};
    sc.gains.ugas = opt.gamma_ugas.value_or(s * gh.ugas);
    sc.gains.lp = opt.gamma_lp.value_or(s * gh.lp);
    sc.gains.gamma_d = opt.gamma_d.value_or(d > 0.0 ? 7.9597 : 3.5884);
    sc.gains.gamma_des = opt.gamma_des.value_or(50.0);
    sc.validate();
    return sc;
}

PendulumGains pendulum_gains(double d_max, double d_rate_max, EstimatorKind estimator) {
    using namespace ex2;
    static std::mutex mu;
    static std::map<std::tuple<double, double, int>, PendulumGains> cache;
    const auto key = std::make_tuple(d_max, d_rate_max, static_cast<int>(estimator));
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const bool model = estimator == EstimatorKind::Model;
    PendulumGains out;
    const int samples = d_max > 0.0 ? 4 : 0;
    for (int k = 0; k <= samples; ++k) {
        const double dd = samples ? d_max * k / samples : 0.0;
        for (double nsec : {-1.0, 0.0, 1.0}) {
            const Eigen::MatrixXd Be = B + nsec * G;
            DelayedLti sys;
            sys.delay = dd;
            sys.A = {A1, A2};
            Eigen::MatrixXd Bew(2, 4);
            Bew << Be, Eigen::Matrix2d::Identity();
            const bool stable = unstable_roots(sys) == 0;
            if (!stable) {
                out.ugas = out.lp = out.gamma_d = kInf;
                continue;
            }
            const M2 Cd = model ? mat(0, 0, 0, 1) : B2;
            const M2 C2d = model ? M2::Zero() : B3;

            // e -> H
            sys.B = {Be};
            sys.C = {B1, Cd, C2d};
            sys.D = {};
            out.ugas = std::max(out.ugas, peak_gain(sys, {}, false));
            // (e, w) -> H
            Eigen::MatrixXd D0 = Eigen::MatrixXd::Zero(2, 4), D1 = Eigen::MatrixXd::Zero(2, 4);
            D0.rightCols(2) = C1;
            D1.rightCols(2) = C2;
            sys.B = {Bew};
            sys.D = {D0, D1};
            out.lp = std::max(out.lp, peak_gain(sys, {}, false));
            // (e, w) -> x
            sys.C = {Eigen::MatrixXd::Identity(2, 2)};
            sys.D = {};
            out.gamma_d = std::max(out.gamma_d, peak_gain(sys, {}, false));
        }
    }
    const double rate = 1.0 + d_rate_max;
    out.ugas *= rate;
    out.lp *= rate;
    std::lock_guard lock(mu);
    cache.emplace(key, out);
    return out;
}

Scenario build_example2(double d_max, double d_rate_max, ProtocolKind protocol,
                        EstimatorKind estimator, const ExampleOptions& opt) {
    using namespace ex2;
    if (!(d_max >= 0.0) || !(d_rate_max >= 0.0))
        throw std::invalid_argument("example2: delay bounds must be non-negative");
    Scenario sc;
    sc.name = "example2";
    common_setup(sc, protocol, estimator);
    const DelayProfile dp = sinusoidal_delay(d_max, d_rate_max);
    sc.link_delays = {constant_delay(0.0), dp};
    sc.growth_delay = dp;
    sc.lookback = 2.0 * d_max;
    sc.k_nu = opt.k_nu;
    const bool model = estimator == EstimatorKind::Model;
    const double s = scale_for(protocol);

    sc.f = [dp](double t, const History& h) {
        V2 x = h.x(t), xd = h.x(t - dp.value_at(t)), e = h.e(t), w = h.omega(t);
        V2 nv(0.0, n(x(0), e(0)));
        return vec(A1 * x + A2 * xd + nv + B * e + w);
    };
    sc.g = [dp, model](double t, const History& h) {
        const double sd = t - dp.value_at(t), rate = 1.0 - dp.derivative_at(t);
        V2 x = h.x(t), xd = h.x(sd), xsd = h.x(sd - dp.value_at(sd));
        V2 ed = h.e(sd), w = h.omega(t), wd = h.omega(sd);
        V2 nd(0.0, n(xd(0), ed(0)));
        V2 inner = -B * ed + B2 * xd - nd + C2 * wd + B3 * xsd;
        if (model) inner += B * (ed + P1 * xd + P2 * xsd);
        return vec(B1 * x + C1 * w + rate * inner);
    };
    sc.h_norm = [dp, model, s](double t, const History& h) {
        const double sd = t - dp.value_at(t), rate = 1.0 - dp.derivative_at(t);
        V2 x = h.x(t), xd = h.x(sd), w = h.omega(t), wd = h.omega(sd);
        V2 inner = C2 * wd;
        if (model) {
            inner += V2(0.0, xd(1));
        } else {
            inner += B2 * xd + B3 * h.x(sd - dp.value_at(sd));
        }
        return s * (B1 * x + C1 * w + rate * inner).norm();
    };
    const double base = model ? g / len : spectral_norm(B) + g / len;
    sc.growth_l = s * (1.0 + d_rate_max) * base;

    const bool need_default = !opt.gamma_ugas || !opt.gamma_lp || !opt.gamma_d;
    PendulumGains pg;
    if (need_default) pg = pendulum_gains(d_max, d_rate_max, estimator);
    sc.gains.ugas = opt.gamma_ugas.value_or(s * pg.ugas);
    sc.gains.lp = opt.gamma_lp.value_or(s * pg.lp);
    sc.gains.gamma_d = opt.gamma_d.value_or(pg.gamma_d);
    sc.gains.gamma_des = opt.gamma_des.value_or(15.0);
    sc.validate();
    return sc;
}

Scenario build_comparison(double a, double c, const DelayProfile& delay, double k_nu,
                          Disturbance input) {
    Scenario sc;
    sc.name = "comparison";
    sc.state_dim = 0;
    sc.error_dim = 1;
    sc.disturbance_dim = 1;
    sc.links = default_partition(1);
    sc.protocol = make_tod(1);
    sc.protocol.rho = std::abs(c);
    sc.link_delays = {delay};
    sc.growth_delay = delay;
    sc.lookback = delay.d_max();
    sc.k_nu = k_nu;
    sc.omega = std::move(input);
    sc.f = [](double, const History&) { return Vec(); };
    sc.g = [a, delay](double t, const History& h) {
        Vec out = a * h.e(t - delay.value_at(t));
        out += h.omega(t);
        return out;
    };
    sc.h_norm = [](double t, const History& h) { return h.omega(t).norm(); };
    sc.jump = [c](const Vec& e, const Vec& noise) { return Vec(c * e + noise); };
    sc.growth_l = std::abs(a);
    sc.validate();
    return sc;
}

Scenario build_scenario(const std::string& name, double d, double d_rate, ProtocolKind protocol,
                        EstimatorKind estimator, const ExampleOptions& opt) {
    if (name == "example1") {
        if (d_rate != 0.0) throw std::invalid_argument("example1 supports constant delays only");
        return build_example1(d, protocol, estimator, opt);
    }
    if (name == "example2") return build_example2(d, d_rate, protocol, estimator, opt);
    throw std::invalid_argument("unknown scenario: " + name);
}

SweepTemplate scenario_sweep(const std::string& name, double d_rate, ProtocolKind protocol,
                             EstimatorKind estimator, CertMode mode, const ExampleOptions& opt) {
    return [=](double d) {
        Scenario sc = build_scenario(name, d, d_rate, protocol, estimator, opt);
        SweepPoint pt;
        pt.params = sc.error_params();
        const double gh = sc.gamma_h(mode);
        if (std::isfinite(gh)) pt.gamma_h = gh;
        if (sc.gains.gamma_d && std::isfinite(*sc.gains.gamma_d)) pt.gamma_d = sc.gains.gamma_d;
        pt.gamma_des = sc.gains.gamma_des;
        return pt;
    };
}

}  // namespace mati
