#pragma once

#include <cstdint>

#include "mati/simulator/integrate.hpp"

namespace mati {

// Worst signed value of dW/dt - (L W(e(t - d(t))) + H) between jumps, per integration step:
// the difference quotient of W against the step mean of the right side (Gauss points, split
// where the delayed error jumps). Needs a recorded trace.
double verify_growth_inequality(const SimTrace& trace, const Scenario& sc);

struct UgasReport {
    int trials = 0;
    int converged = 0;
    int diverged = 0;
    double worst_ratio = 0.0;  // max ||(x,e)(T)|| / ||initial||
    double max_growth_violation = 0.0;
};

struct UgasConfig {
    int trials = 50;
    double horizon = 10.0;
    double threshold = 1e-3;
    std::uint64_t seed = 1;
    bool splines = false;       // random splines instead of constant histories
    bool check_growth = false;  // also run the growth checker on every trace
    int workers = 0;            // 0 = hardware concurrency
};

// Random initial histories, omega = 0, K_nu = 0.
UgasReport verify_ugas(const Scenario& sc, double tau, const UgasConfig& cfg = {});

}  // namespace mati
