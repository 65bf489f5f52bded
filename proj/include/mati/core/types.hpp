#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mati {

// States are small; a bounded dynamic vector avoids heap traffic in the integrator.
inline constexpr int kMaxDim = 8;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ProtocolKind { RoundRobin, TryOnceDiscard };

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::TryOnceDiscard;
    int link_count = 1;
    double a_lower = 1.0;
    double a_upper = 1.0;
    double rho = 0.0;
};

// Coefficients of the scalar comparison system
//   xi' = a xi(t - d(t)) + u,   xi(t+) = c xi(t) + nu
// together with the noise bound and the minimum spacing between transmissions.
struct ErrorSystemParams {
    double a = 0.0;
    double c = 0.0;
    double d_max = 0.0;
    double k_nu = 0.0;
    std::optional<double> epsilon;  // defaults to tau/10 once tau is known
    double a_lower = 1.0;           // protocol sandwich constants, used for gains and bias
    double a_upper = 1.0;

    void validate() const;
};

struct RazumikhinWitness {
    double lambda = 1.0;
    double big_m = 2.0;
    double r = 1.0;
    double lambda2 = 0.5;

    double lambda1(double a) const { return a * a / r; }
    void validate() const;
};

// lambda2 is pinned to c^2 unless c == 0.
RazumikhinWitness make_witness(double lambda, double big_m, double r, double c,
                               double lambda2_if_c_zero = 0.5);

enum class CertMode { Ugas, LpStable, LpWithTarget };
enum class EstimatorKind { Zoh, Model };

std::string to_string(CertMode m);
CertMode cert_mode_from_string(const std::string& s);
std::string to_string(ProtocolKind k);
ProtocolKind protocol_kind_from_string(const std::string& s);
std::string to_string(EstimatorKind k);
EstimatorKind estimator_from_string(const std::string& s);

// Closed-loop gains obtained by composing the error and nominal subsystems.
struct CompositeGains {
    double gamma_h = 0.0;  // inputs kept for later composition
    double k_h = 0.0;
    double error_bias = 0.0;  // b, the error-system bias
    // omega -> (H, e)
    double gain = 0.0;
    double bias = 0.0;
    // e-channel: ||e|| <= e_e0 ||e0|| + e_x0 ||x0|| + e_omega ||omega|| + e_bias ||b||
    double e_e0 = 0.0, e_x0 = 0.0, e_omega = 0.0, e_bias = 0.0;
    // H-channel
    double h_e0 = 0.0, h_x0 = 0.0, h_omega = 0.0, h_bias = 0.0;
    // omega -> x and omega -> (x, e), present once detectability is composed in
    bool has_detectability = false;
    double x_e0 = 0.0, x_x0 = 0.0, x_omega = 0.0, x_bias = 0.0;
    double xe_gain = 0.0, xe_bias = 0.0;
};

struct MatiCertificate {
    double tau = 0.0;
    double epsilon = 0.0;
    RazumikhinWitness witness;
    ErrorSystemParams params;
    double gamma_h = 0.0;
    double gamma_w = 0.0;
    double bias = 0.0;
    double k_w = 0.0;
    double p_order = 2.0;  // may be +inf
    CertMode mode = CertMode::LpStable;
    double small_gain_bound = 1.0;  // gamma_w * gamma_h must stay below this
    double margin_I = 0.0;
    double margin_II = 0.0;
    std::optional<CompositeGains> composite;

    std::string to_json() const;
    static MatiCertificate from_json(const std::string& text);
};

}  // namespace mati
