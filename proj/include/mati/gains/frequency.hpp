#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mati {

// x' = sum_k A[k] x(t - k d) + sum_k B[k] u(t - k d)
// y  = sum_k C[k] x(t - k d) + sum_k D[k] u(t - k d)
// Entry k of each list is the coefficient of the k-fold delayed signal; lists may be short.
struct DelayedLti {
    double delay = 0.0;
    std::vector<Eigen::MatrixXd> A, B, C, D;
};

struct FrequencyGrid {
    double w_min = 1e-3;
    double w_max = 1e4;
    int points = 2000;
};

// Number of characteristic roots in the open right half plane (argument principle on the
// imaginary axis); exact for the retarded systems above when no root sits on the axis.
int unstable_roots(const DelayedLti& sys, const FrequencyGrid& grid = {});

// sup_w sigma_max(T(jw)) on the grid, refined around the peak. +inf when unstable; pass
// check_stability = false when unstable_roots was already evaluated for the same A.
double peak_gain(const DelayedLti& sys, const FrequencyGrid& grid = {}, bool check_stability = true);

}  // namespace mati
