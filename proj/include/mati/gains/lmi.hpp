#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mati {

// Dissipation LMI for
//   x' = A1 x + A2 x(t-d) + N B1 x + B e + Bw w,   N in [n_min, n_max]
//   H  = Cx x + Cxd x(t-d) + Dw w
// with V = x'Cx + int_{t-d}^t x'Ex. Block order [x, x(t-d), e, w].
// The undelayed variant (d = 0) uses A = A1 + A2, C = Cx + Cxd and drops E.
struct LmiProblem {
    Eigen::Matrix2d A1 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d A2 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d B1 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d Bw = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d Cx = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d Cxd = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d Dw = Eigen::Matrix2d::Zero();
    double n_min = -1.0;
    double n_max = 1.0;
    bool delayed = true;
    bool error_input = true;
    bool disturbance_input = true;
    // H is multiplied by this factor (sqrt(l) turns a TOD output into the RR one).
    double output_scale = 1.0;

    int block_dim() const;
    void validate() const;
    LmiProblem scaled_output(double s) const;
};

// Largest eigenvalue of the LMI matrix, maximised over the two endpoints of N.
// <= 0 means (gamma, C, E) certifies the gain. C (and E when delayed) must be positive definite.
double lmi_margin(const LmiProblem& p, double gamma, const Eigen::Matrix2d& c_mat,
                  const Eigen::Matrix2d& e_mat = Eigen::Matrix2d::Identity());

struct EllipsoidConfig {
    int max_iterations = 20000;
    double initial_center = 0.5;  // C = E = center * gamma^2 * I
    double initial_radius = 20.0;
    double restart_radius = 2000.0;
    double strict_margin = 1e-12;  // relative to gamma^2
};

struct FeasibilityResult {
    bool feasible = false;
    Eigen::Matrix2d c_mat = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d e_mat = Eigen::Matrix2d::Zero();
    double margin = 0.0;  // lmi_margin of the witness (feasible) or best value seen
    int iterations = 0;
};

FeasibilityResult find_witness(const LmiProblem& p, double gamma, const EllipsoidConfig& cfg = {});

struct GainTracePoint {
    double gamma;
    bool feasible;
    double margin;
};

struct GainEstimate {
    double gamma_h = 0.0;
    Eigen::Matrix2d c_mat = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d e_mat = Eigen::Matrix2d::Zero();
    double margin = 0.0;
    std::vector<GainTracePoint> trace;
};

struct GainBudget {
    double ceiling = 1e6;
    int max_bisections = 200;
    EllipsoidConfig ellipsoid;
};

// Bisection on gamma: bracket [0, 1], doubling the top until feasible, then shrink to tol (relative).
GainEstimate estimate_l2_gain(const LmiProblem& p, double tol = 1e-3, const GainBudget& budget = {});

// Nominal part of the first example with the printed matrices. Tod: output C1 x + C2 x(t-d) + C6 w;
// Rr: the same scaled by sqrt(2); Detectability: output x.
enum class Example1Output { Tod, Rr, Detectability };
LmiProblem example1_lmi(Example1Output output, bool delayed);

// x' = -x + w with output x, embedded as two decoupled copies (H-infinity norm 1).
LmiProblem scalar_sanity_lmi();

}  // namespace mati
