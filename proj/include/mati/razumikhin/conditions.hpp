#pragma once

#include "mati/core/types.hpp"

namespace mati {

struct FeasibilityReport {
    bool feasible = false;
    double margin_I = 0.0;
    double margin_II = 0.0;
};

// margin_I  = ln M - tau (lambda + r + lambda1 M e^{-lambda tau})
// margin_II = -ln lambda2 - tau (lambda + r + (lambda1/lambda2) e^{lambda d_max})
FeasibilityReport check_conditions(const RazumikhinWitness& w, double tau, double a, double d_max);

// (2/lambda) sqrt(M)
double error_gain(const RazumikhinWitness& w);

// k_nu_tilde sqrt(M) / (e^{lambda eps / 2} - 1)
double error_bias(const RazumikhinWitness& w, double k_nu_tilde, double epsilon);

// sqrt(M) |xi_0| e^{-lambda t / 2}
double decay_envelope(const RazumikhinWitness& w, double xi0_norm, double t_elapsed);

// Initial-condition coefficient 2 sqrt(M) (1 + |a| (2/lambda)(e^{d lambda/2} - 1)) (1/(p lambda))^{1/p};
// the last factor tends to 1 as p -> inf.
double initial_gain(const RazumikhinWitness& w, double a, double d_max, double p);

}  // namespace mati
