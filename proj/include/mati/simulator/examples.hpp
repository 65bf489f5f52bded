#pragma once

#include <optional>
#include <string>

#include "mati/simulator/scenario.hpp"
#include "mati/smallgain/sweep.hpp"

namespace mati {

// Which published gamma_H values drive the first example: the single LMI gain that holds for
// every delay, or the per-mode/per-estimator table used for the MATI plots.
enum class GainSet { Lmi, Figure };

struct ExampleOptions {
    GainSet gain_set = GainSet::Lmi;
    std::optional<double> gamma_ugas, gamma_lp, gamma_d, gamma_des;
    double k_nu = 0.0;
};

// Nonlinear delayed loop with two links, the second one delayed by d.
Scenario build_example1(double d, ProtocolKind protocol, EstimatorKind estimator,
                        const ExampleOptions& opt = {});

// Inverted pendulum; the second link has a delay bounded by d_max with rate bound d_rate_max.
Scenario build_example2(double d_max, double d_rate_max, ProtocolKind protocol,
                        EstimatorKind estimator, const ExampleOptions& opt = {});

// xi' = a xi(t - d(t)) + u(t),  xi(t+) = c xi(t) + nu.
Scenario build_comparison(double a, double c, const DelayProfile& delay, double k_nu = 0.0,
                          Disturbance input = {});

// Default pendulum gains (e->H, (e,w)->H, (e,w)->x) from a frequency sweep of the
// sector-bounded linearisation, maximised over constant delays in [0, d_max].
struct PendulumGains {
    double ugas = 0.0, lp = 0.0, gamma_d = 0.0;
};
PendulumGains pendulum_gains(double d_max, double d_rate_max, EstimatorKind estimator);

// Catalog lookup: "example1" or "example2".
Scenario build_scenario(const std::string& name, double d, double d_rate, ProtocolKind protocol,
                        EstimatorKind estimator, const ExampleOptions& opt = {});

// Sweep template over the delay bound of a catalog scenario; rows whose gamma_H is not finite
// (the linearisation is unstable at that delay) come out not certified.
SweepTemplate scenario_sweep(const std::string& name, double d_rate, ProtocolKind protocol,
                             EstimatorKind estimator, CertMode mode, const ExampleOptions& opt = {});

}  // namespace mati
