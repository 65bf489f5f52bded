#include "mati/gains/empirical.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mati/core/errors.hpp"
#include "mati/simulator/integrate.hpp"

namespace mati {

EmpiricalGain estimate_empirical_gain(const Scenario& base, double tau,
                                      const std::vector<Disturbance>& bank, double horizon,
                                      GainOutput output, std::uint64_t seed) {
    Scenario sc = base;
    sc.k_nu = 0.0;
    EmpiricalGain out;
    bool any = false;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        SimConfig cfg;
        cfg.tau = tau;
        cfg.horizon = horizon;
        cfg.seed = seed + i;
        cfg.record = false;
        cfg.omega = bank[i];
        double ratio = std::numeric_limits<double>::quiet_NaN();
        bool div = false;
        try {
            SimTrace tr = integrate(sc, cfg);
            const RunningNorms& n = tr.norms;
            if (n.omega > 0.0) {
                double y = 0.0;
                switch (output) {
                    case GainOutput::E: y = n.e; break;
                    case GainOutput::X: y = n.x; break;
                    case GainOutput::HE: y = std::hypot(n.h, n.e); break;
                    case GainOutput::XE: y = std::hypot(n.x, n.e); break;
                }
                ratio = y / n.omega;
                out.gain = any ? std::max(out.gain, ratio) : ratio;
                any = true;
            }
        } catch (const DivergenceError&) {
            div = true;
        }
        out.ratios.push_back(ratio);
        out.diverged.push_back(div);
    }
    out.degenerate = !any;
    return out;
}

std::vector<Disturbance> make_input_bank(int dim, int count, double horizon, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01;
    std::vector<Disturbance> bank;
    for (int k = 0; k < count; ++k) {
        const int kind = k % 3;
        Vec amp(dim), freq(dim), phase(dim);
        for (int i = 0; i < dim; ++i) {
            amp(i) = 2.0 * u01(rng) - 1.0;
            freq(i) = std::exp(std::log(0.1) + u01(rng) * std::log(1e3));  // 0.1..100 rad/s
            phase(i) = 2.0 * std::numbers::pi * u01(rng);
        }
        const double width = horizon * (0.05 + 0.2 * u01(rng));
        const double start = (horizon - width) * u01(rng);
        bank.push_back([=](double t) -> Vec {
            Vec w = Vec::Zero(dim);
            if (t < 0.0 || t > horizon) return w;
            for (int i = 0; i < dim; ++i) {
                switch (kind) {
                    case 0: w(i) = amp(i) * std::sin(freq(i) * t + phase(i)); break;
                    case 1: {  // chirp sweeping up to freq
                        double f = freq(i) * t / horizon;
                        w(i) = amp(i) * std::sin(f * t + phase(i));
                        break;
                    }
                    default: w(i) = (t >= start && t <= start + width) ? amp(i) : 0.0;
                }
            }
            return w;
        });
    }
    return bank;
}

}  // namespace mati
