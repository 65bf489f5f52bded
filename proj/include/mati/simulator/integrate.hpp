#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "mati/simulator/history.hpp"
#include "mati/simulator/scenario.hpp"

namespace mati {

enum class Spacing { Fixed, Random };
enum class NoiseMode { Uniform, Boundary };  // inside the K_nu ball, or on its surface

struct SimConfig {
    double tau = 0.0;
    double epsilon = 0.0;  // 0 means tau/10
    double horizon = 1.0;
    double step = 0.0;     // 0 picks tau/n with n >= max(20, 20 tau / smallest delay)
    std::uint64_t seed = 1;
    Spacing spacing = Spacing::Random;
    NoiseMode noise = NoiseMode::Uniform;
    double blowup = 1e8;
    bool record = true;  // keep per-node samples and the whole history
    std::function<Vec(double)> initial;  // combined (x, e) history on t <= 0; empty means zero
    Disturbance omega;                   // overrides the scenario disturbance when set
};

struct TransmissionEvent {
    double t = 0.0;
    std::size_t node = 0;
    int link = 0;
    Vec noise;
    Vec e_before;
    Vec e_after;
};

struct RunningNorms {
    double x = 0.0, e = 0.0, omega = 0.0, h = 0.0;  // L2 norms over [0, horizon]
};

struct SimTrace {
    double step = 0.0;
    double tau = 0.0;
    double epsilon = 0.0;
    int nx = 0, ne = 0;
    std::vector<double> t;
    std::vector<Vec> x;  // right limits at each node
    std::vector<Vec> e;
    std::vector<TransmissionEvent> events;
    RunningNorms norms;
    Vec final_state;
    double initial_norm = 0.0;  // sup of the initial history on the lookback window
    std::shared_ptr<const HistoryBuffer> history;  // whole trajectory when recorded
};

// Integration step used for a scenario and interval (snapped so that tau is a multiple).
double default_step(const Scenario& sc, double tau, double requested = 0.0);

SimTrace integrate(const Scenario& sc, const SimConfig& cfg);

// Constant-in-time and smooth random histories on [-lookback, 0] for (x, e).
std::function<Vec(double)> constant_history(const Vec& value);
std::function<Vec(double)> spline_history(const Scenario& sc, std::uint64_t seed, double scale = 1.0);

// Trace rows as CSV: t_s, x1.., e1.., event, granted_link.
std::string trace_csv(const SimTrace& trace);

}  // namespace mati
