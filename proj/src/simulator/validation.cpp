#include "mati/simulator/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mati/core/errors.hpp"

namespace mati {

namespace {

class TraceView final : public History {
public:
    TraceView(const HistoryBuffer& buf, int nx, int ne, int dw, const Disturbance& w)
        : History(nx, ne), buf_(buf), dw_(dw), w_(w) {}
    Vec state(double s) const override { return buf_.at(std::min(s, buf_.back_time())); }
    Vec omega(double s) const override {
        if (s < 0.0 || !w_) return Vec::Zero(dw_);
        return w_(s);
    }

private:
    const HistoryBuffer& buf_;
    int dw_;
    const Disturbance& w_;
};

}  // namespace

double verify_growth_inequality(const SimTrace& tr, const Scenario& sc) {
    if (!tr.history) throw std::invalid_argument("growth check: trace was not recorded");
    const HistoryBuffer& buf = *tr.history;
    const int nx = sc.state_dim, ne = sc.error_dim;
    const LinkPartition links = sc.links.empty() ? default_partition(ne) : sc.links;
    TraceView view(buf, nx, ne, sc.disturbance_dim, sc.omega);

    // The delayed error jumps whenever t - d(t) passes a transmission (or t = 0). Inside a step
    // the right side is integrated piecewise between those crossings, so the comparison is
    // between the mean slope of W and the mean bound.
    std::vector<double> jumps{0.0};
    for (const auto& e : tr.events) jumps.push_back(e.t);
    const auto lag = [&](double s) { return s - sc.growth_delay.value_at(s); };
    const auto crossing = [&](double lo, double hi, double target) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (lag(mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    ProtocolState ps = initial_state(sc.protocol);
    std::size_t ev = 0;
    double worst = -kInf;
    const double h = buf.step();
    const double gauss = 0.5 / std::sqrt(3.0);
    std::vector<double> cuts;
    for (std::size_t k = 0; k + 1 < buf.size(); ++k) {
        const double t = buf.time(k), t1 = buf.time(k + 1);
        // Protocol state in force on (t_k, t_{k+1}) reflects every jump up to node k.
        while (ev < tr.events.size() && tr.events[ev].node <= k) {
            if (!sc.jump) ps = advance(sc.protocol, ps, tr.events[ev].link);
            ++ev;
        }
        const double w0 = w_value(sc.protocol, ps, buf.right(k).tail(ne), links);
        const double w1 = w_value(sc.protocol, ps, buf.left(k + 1).tail(ne), links);
        const double slope = (w1 - w0) / h;

        cuts.assign({t});
        const double s0 = lag(t), s1 = lag(t1);
        for (auto it = std::upper_bound(jumps.begin(), jumps.end(), s0);
             it != jumps.end() && *it < s1; ++it)
            cuts.push_back(crossing(t, t1, *it));
        cuts.push_back(t1);
        double mean = 0.0;
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const double a = cuts[j], b = cuts[j + 1], c = 0.5 * (a + b);
            if (!(b > a)) continue;
            for (double q : {c - gauss * (b - a), c + gauss * (b - a)}) {
                const Vec ed = view.e(lag(q));
                mean += 0.5 * (b - a) *
                        (sc.growth_l * w_value(sc.protocol, ps, ed, links) + sc.h_norm(q, view));
            }
        }
        worst = std::max(worst, slope - mean / h);
    }
    return std::isfinite(worst) ? worst : 0.0;
}

UgasReport verify_ugas(const Scenario& base, double tau, const UgasConfig& cfg) {
    Scenario sc = base;
    sc.omega = {};
    sc.k_nu = 0.0;
    const int nz = sc.state_dim + sc.error_dim;

    UgasReport rep;
    rep.trials = cfg.trials;
    rep.max_growth_violation = -kInf;
    std::mutex mu;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next++; i < cfg.trials; i = next++) {
            const std::uint64_t seed = cfg.seed + 7919ULL * static_cast<std::uint64_t>(i);
            SimConfig sim;
            sim.tau = tau;
            sim.horizon = cfg.horizon;
            sim.seed = seed;
            sim.record = cfg.check_growth;
            if (cfg.splines) {
                sim.initial = spline_history(sc, seed);
            } else {
                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                Vec z(nz);
                for (int j = 0; j < nz; ++j) z(j) = u(rng);
                sim.initial = constant_history(z);
            }
            double ratio = kInf, viol = -kInf;
            bool div = false;
            try {
                SimTrace tr = integrate(sc, sim);
                ratio = tr.initial_norm > 0.0 ? tr.final_state.norm() / tr.initial_norm : 0.0;
                if (cfg.check_growth) viol = verify_growth_inequality(tr, sc);
            } catch (const DivergenceError&) {
                div = true;
            }
            std::lock_guard lock(mu);
            if (div) {
                ++rep.diverged;
            } else if (ratio < cfg.threshold) {
                ++rep.converged;
            }
            rep.worst_ratio = std::max(rep.worst_ratio, ratio);
            rep.max_growth_violation = std::max(rep.max_growth_violation, viol);
        }
    };
    unsigned n = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers)
                                 : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max(cfg.trials, 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
        worker();
    }
    if (!cfg.check_growth || !std::isfinite(rep.max_growth_violation)) rep.max_growth_violation = 0.0;
    return rep;
}

}  // namespace mati
