#include "doctest.h"

#include <mati/core/errors.hpp>
#include <mati/razumikhin/conditions.hpp>
#include <mati/smallgain/certify.hpp>
#include <mati/smallgain/sweep.hpp>

#include <cmath>
#include <sstream>

using namespace mati;

namespace {
const double kA = 2.0 * std::sqrt(2.0);
const double kC = std::sqrt(0.5);
const double kGammaH = 18.7051;

ErrorSystemParams ref_params(double d = 0.0) { return {.a = kA, .c = kC, .d_max = d}; }

void check_sound(const MatiCertificate& cert) {
    auto rep = check_conditions(cert.witness, cert.tau, cert.params.a, cert.params.d_max);
    CHECK(rep.feasible);
    CHECK(cert.gamma_w * cert.gamma_h < cert.small_gain_bound);
}
}  // namespace

TEST_CASE("small-gain bound per mode") {
    CHECK(small_gain_bound(CertMode::Ugas, {}, {}) == 1.0);
    CHECK(small_gain_bound(CertMode::LpStable, {}, {}) == 1.0);
    CHECK(small_gain_bound(CertMode::LpWithTarget, 3.5884, 50.0) ==
          doctest::Approx(0.928232).epsilon(1e-6));
    CHECK_THROWS_AS(small_gain_bound(CertMode::LpWithTarget, 60.0, 50.0), InfeasibleTarget);
    CHECK_THROWS(small_gain_bound(CertMode::LpWithTarget, {}, 50.0));
}

TEST_CASE("undelayed reference instance matches the frozen oracle") {
    // brute-force grid oracle, gamma_H = 18.7051, kappa = 1
    const double oracle_tau = 0.0114878502;
    auto cert = certify(ref_params(), kGammaH, CertMode::LpStable);
    CHECK(cert.tau == doctest::Approx(oracle_tau).epsilon(0.01));
    CHECK(cert.tau > 0.0);
    check_sound(cert);
}

TEST_CASE("coupling shrinks the interval") {
    auto free = certify(ref_params(), 0.0, CertMode::Ugas);
    auto coupled = certify(ref_params(), kGammaH, CertMode::Ugas);
    CHECK(free.tau > coupled.tau);
    double prev = free.tau;
    for (double g : {1.0, 5.0, 20.0, 100.0}) {
        double t = certify(ref_params(0.01), g, CertMode::LpStable).tau;
        CHECK(t > 0.0);
        CHECK(t <= prev * (1 + 1e-3));
        prev = t;
    }
}

TEST_CASE("target mode respects the tightened bound") {
    auto cert = certify(ref_params(), kGammaH, CertMode::LpWithTarget, 3.5884, 50.0);
    CHECK(cert.small_gain_bound == doctest::Approx(0.928232).epsilon(1e-6));
    CHECK(cert.gamma_w * cert.gamma_h < 0.928233);
    check_sound(cert);
    auto plain = certify(ref_params(), kGammaH, CertMode::LpStable);
    CHECK(cert.tau <= plain.tau);
    REQUIRE(cert.composite.has_value());
    CHECK(cert.composite->has_detectability);
    CHECK_THROWS_AS(certify(ref_params(), kGammaH, CertMode::LpWithTarget, 60.0, 50.0),
                    InfeasibleTarget);
}

TEST_CASE("epsilon defaults to a tenth of tau and bias follows") {
    auto p = ref_params(0.01);
    p.k_nu = 0.1;
    auto cert = certify(p, kGammaH, CertMode::LpStable);
    CHECK(cert.epsilon == doctest::Approx(cert.tau / 10));
    CHECK(cert.bias == doctest::Approx(cert.params.a_upper * 0.1 * std::sqrt(cert.witness.big_m) /
                                       (std::exp(cert.witness.lambda * cert.epsilon / 2) - 1)));
    CHECK(certify(ref_params(0.01), kGammaH, CertMode::Ugas).bias == 0.0);
}

TEST_CASE("c = 0 searches lambda2") {
    ErrorSystemParams p{.a = 1.0, .c = 0.0, .d_max = 0.02};
    auto cert = certify(p, 1.0, CertMode::LpStable);
    CHECK(cert.witness.lambda2 > 0.0);
    CHECK(cert.witness.lambda2 < 1.0);
    check_sound(cert);
}

TEST_CASE("composite gains") {
    auto g = compose_small_gain(0.02, kGammaH, 1.0, 0.0, 0.0, 1.0, 1.0);
    CHECK(g.gain == doctest::Approx(kGammaH * 1.02 / (1 - 0.02 * kGammaH)).epsilon(1e-12));
    CHECK(g.gain == doctest::Approx(30.48293).epsilon(1e-6));

    auto z = compose_small_gain(0.0, 7.0, 1.0, 0.0, 2.0, 1.0, 1.0);
    CHECK(z.gain == doctest::Approx(7.0));
    CHECK(z.bias == doctest::Approx((7.0 + 1.0) * 2.0));

    double g90 = compose_small_gain(0.9 / kGammaH, kGammaH, 1, 0, 0, 1, 1).gain;
    double g99 = compose_small_gain(0.99 / kGammaH, kGammaH, 1, 0, 0, 1, 1).gain;
    CHECK(g99 > g90);
    CHECK_THROWS(compose_small_gain(1.0 / kGammaH, kGammaH, 1, 0, 0, 1, 1));
    CHECK_THROWS(compose_small_gain(0.1, kGammaH, 1, 0, 0, 1, 1));
}

TEST_CASE("detectability composition") {
    auto base = compose_small_gain(0.02, kGammaH, 1.0, 0.5, 0.1, 1.0, 1.0);
    auto zero = compose_detectability(base, 0.0, 0.0, 1.0);
    CHECK(zero.x_omega == 0.0);
    CHECK(zero.xe_gain == doctest::Approx(base.e_omega));
    auto small = compose_detectability(base, 3.5884, 0.0, 1.0);
    auto large = compose_detectability(base, 7.9597, 0.0, 1.0);
    CHECK(std::isfinite(small.xe_gain));
    CHECK(large.xe_gain > small.xe_gain);
    CHECK(large.x_omega > small.x_omega);
}

TEST_CASE("practical adjustments") {
    CHECK(adjust_for_dropouts(0.01, 1) == 0.01);
    CHECK(adjust_for_dropouts(0.01, 4) == doctest::Approx(0.0025));
    CHECK_THROWS(adjust_for_dropouts(0.01, 0));
    CHECK(async_link_interval(0.007) == 0.007);
}

TEST_CASE("sweep rows and csv") {
    SweepTemplate tmpl = [](double d) {
        SweepPoint pt;
        pt.params = ref_params(d);
        if (d < 0.025) pt.gamma_h = kGammaH;  // later points have no gain
        return pt;
    };
    std::vector<double> grid{0.03, 0.0, 0.01, 0.02};
    auto rows = sweep(tmpl, grid, ProtocolKind::TryOnceDiscard, EstimatorKind::Zoh,
                      CertMode::LpStable, {}, 1);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].d == 0.0);
    CHECK(rows[3].d == 0.03);
    CHECK_FALSE(rows[3].cert.has_value());
    CHECK_FALSE(rows[3].error.empty());
    for (int i = 0; i < 3; ++i) REQUIRE(rows[i].cert.has_value());
    CHECK(rows[1].cert->tau <= rows[0].cert->tau);
    CHECK(rows[2].cert->tau <= rows[1].cert->tau);
    // the ODE point matches a direct certification
    CHECK(rows[0].cert->tau == certify(ref_params(), kGammaH, CertMode::LpStable).tau);

    auto csv = sweep_csv(rows);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "delay_ms,protocol,estimator,mode,gamma_H,tau_ms,lambda,M,r,lambda2,margin_I,margin_II");
    int n = 0;
    std::string last;
    while (std::getline(is, line)) {
        ++n;
        last = line;
    }
    CHECK(n == 4);
    CHECK(last.rfind("30,tod,zoh,lp,,", 0) == 0);

    // rows are independent of the worker count
    auto par = sweep(tmpl, grid, ProtocolKind::TryOnceDiscard, EstimatorKind::Zoh,
                     CertMode::LpStable, {}, 3);
    CHECK(sweep_csv(par) == csv);
}
