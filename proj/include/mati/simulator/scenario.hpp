#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mati/core/delay_profile.hpp"
#include "mati/core/types.hpp"
#include "mati/protocols/protocol.hpp"

namespace mati {

// Read access to a trajectory of the combined state (x, e) and the disturbance.
class History {
public:
    History(int nx, int ne) : nx_(nx), ne_(ne) {}
    virtual ~History() = default;

    virtual Vec state(double s) const = 0;
    virtual Vec omega(double s) const = 0;

    Vec x(double s) const { return state(s).head(nx_); }
    Vec e(double s) const { return state(s).segment(nx_, ne_); }
    int nx() const { return nx_; }
    int ne() const { return ne_; }

private:
    int nx_, ne_;
};

using FlowFn = std::function<Vec(double t, const History& h)>;
using NormFn = std::function<double(double t, const History& h)>;
using Disturbance = std::function<Vec(double t)>;
// Custom jump for comparison systems: e+ from e- and a noise draw of size error_dim.
using JumpFn = std::function<Vec(const Vec& e, const Vec& noise)>;

struct ScenarioGains {
    double ugas = 0.0;  // gamma_H for omega = 0 (e -> H)
    double lp = 0.0;    // gamma_H for (e, omega) -> H
    std::optional<double> gamma_d;
    std::optional<double> gamma_des;
};

// An executable networked loop: x' = f, e' = g between transmissions,
// protocol jumps on e at transmissions.
struct Scenario {
    std::string name;
    int state_dim = 0;
    int error_dim = 0;
    int disturbance_dim = 0;
    LinkPartition links;
    ProtocolSpec protocol;
    EstimatorKind estimator = EstimatorKind::Zoh;

    FlowFn f;
    FlowFn g;
    NormFn h_norm;
    Disturbance omega;  // empty means zero
    JumpFn jump;        // empty means the protocol jump

    std::vector<DelayProfile> link_delays;
    double plant_delay = 0.0;       // d_p
    double controller_delay = 0.0;  // d_c
    DelayProfile growth_delay;      // the delay in L W(e(t - d(t)))
    double lookback = 0.0;          // oldest history lag any evaluator reads

    double growth_l = 0.0;  // L for the selected protocol
    ScenarioGains gains;
    double k_h = 0.0, k_d = 0.0;
    double k_nu = 0.0;

    double gamma_h(CertMode mode) const { return mode == CertMode::Ugas ? gains.ugas : gains.lp; }
    // Smallest positive delay in the loop, or 0 when everything is undelayed.
    double min_positive_delay() const;
    bool undelayed() const { return min_positive_delay() == 0.0; }
    // Error-system coefficients (a, c, d) entering the interval certificate.
    ErrorSystemParams error_params() const;
    Vec zero_omega() const { return Vec::Zero(disturbance_dim); }
    void validate() const;
};

}  // namespace mati
