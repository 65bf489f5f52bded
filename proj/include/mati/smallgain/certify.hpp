#pragma once

#include <optional>

#include "mati/core/types.hpp"

namespace mati {

struct SearchConfig {
    // lambda grid spans [max(lambda_min, 2 gamma_h / kappa), max(lambda_max, 100x that)]
    int lambda_points = 60;
    double lambda_min = 1e-2;
    double lambda_max = 1e3;
    // r grid is centred per lambda on a e^{lambda d/2} / sqrt(lambda2) and spans r_span decades each way
    int r_points = 60;
    double r_span = 2.0;
    double r_floor = 1e-2;  // used when a = 0
    double lambda2_floor = 1e-12;
    double scan_ratio = 1.02;
    int bisection_steps = 60;
    bool refine = true;
    int refine_iterations = 400;
    double p_order = 2.0;
    double k_h = 0.0;  // nominal-system offset constant, only used for composite gains
    double k_d = 0.0;
};

// Largest transmission interval certified for fixed (lambda, r, lambda2), with the M attaining it.
struct IntervalSearch {
    double tau = 0.0;
    double big_m = 1.0;
    bool found = false;
};

double small_gain_bound(CertMode mode, std::optional<double> gamma_d, std::optional<double> gamma_des);

// M cap from (2/lambda) sqrt(M) gamma_h < kappa; +inf when gamma_h = 0.
double m_cap(double lambda, double gamma_h, double kappa);

IntervalSearch max_interval(double a, double d_max, double lambda, double r, double lambda2,
                            double cap, const SearchConfig& cfg = {});

// Optimal lambda2 in (0,1) for condition (II) when c = 0.
double best_free_lambda2(double lambda, double r, double a, double d_max, double floor = 1e-12);

MatiCertificate certify(const ErrorSystemParams& params, double gamma_h, CertMode mode,
                        std::optional<double> gamma_d = std::nullopt,
                        std::optional<double> gamma_des = std::nullopt,
                        const SearchConfig& search = {});

CompositeGains compose_small_gain(double gamma_w, double gamma_h, double k_w, double k_h,
                                  double bias, double a_lower, double a_upper);

CompositeGains compose_detectability(const CompositeGains& composite, double gamma_d, double k_d,
                                     double a_upper);

double adjust_for_dropouts(double tau, int n_d);

// Each link of an asynchronous round-robin network transmits at most every tau_rr.
double async_link_interval(double tau_rr);

}  // namespace mati
