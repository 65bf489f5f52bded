#pragma once

#include <cstdint>
#include <vector>

#include "mati/simulator/scenario.hpp"

namespace mati {

enum class GainOutput { E, X, HE, XE };  // which L2 norm is divided by ||omega||

struct EmpiricalGain {
    double gain = 0.0;          // max ratio over the usable inputs (a lower bound on the true gain)
    bool degenerate = false;    // no input had positive energy
    std::vector<double> ratios; // per input; NaN for degenerate or diverged inputs
    std::vector<bool> diverged;
};

// Simulates from a zero history with K_nu = 0 under every input of the bank.
EmpiricalGain estimate_empirical_gain(const Scenario& sc, double tau,
                                      const std::vector<Disturbance>& bank, double horizon,
                                      GainOutput output = GainOutput::X, std::uint64_t seed = 1);

// Random sinusoids, chirps and pulses of the given dimension, all supported on [0, horizon].
std::vector<Disturbance> make_input_bank(int dim, int count, double horizon, std::uint64_t seed);

}  // namespace mati
