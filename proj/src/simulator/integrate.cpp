#include "mati/simulator/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "mati/core/errors.hpp"

namespace mati {

namespace {

// Trajectory seen by the evaluators during one explicit stage: committed nodes come from
// the buffer, anything at or after the stage time is the stage value, and the short gap
// between the last committed node, the sub-step start and the stage is bridged linearly
// (only reached by delays below one step, in particular time-varying delays passing through zero).
class StageView final : public History {
public:
    StageView(const HistoryBuffer& buf, const Disturbance& w, int dw, int nx, int ne)
        : History(nx, ne), buf_(buf), w_(w), dw_(dw) {}

    // Last committed node; sub-steps that start inside a step bridge back to it.
    void set_base(double t_base, const Vec& z_base) {
        t_base_ = t_base;
        z_base_ = &z_base;
    }

    void set(double t_node, const Vec& z_node, double t_stage, const Vec& z_stage) {
        t_node_ = t_node;
        z_node_ = &z_node;
        t_stage_ = t_stage;
        z_stage_ = &z_stage;
    }

    Vec state(double s) const override {
        if (s >= t_stage_) return *z_stage_;
        if (s >= t_node_) {
            double th = (s - t_node_) / (t_stage_ - t_node_);
            return *z_node_ + th * (*z_stage_ - *z_node_);
        }
        if (z_base_ && s > t_base_) {
            double th = (s - t_base_) / (t_node_ - t_base_);
            return *z_base_ + th * (*z_node_ - *z_base_);
        }
        return buf_.at(s);
    }

    Vec omega(double s) const override {
        if (s < 0.0 || !w_) return Vec::Zero(dw_);
        return w_(s);
    }

private:
    const HistoryBuffer& buf_;
    const Disturbance& w_;
    int dw_;
    double t_base_ = 0.0, t_node_ = 0.0, t_stage_ = 0.0;
    const Vec* z_base_ = nullptr;
    const Vec* z_node_ = nullptr;
    const Vec* z_stage_ = nullptr;
};

Vec eval_flow(const Scenario& sc, double t, const History& h) {
    Vec dz(sc.state_dim + sc.error_dim);
    if (sc.state_dim > 0) {
        Vec fx = sc.f(t, h);
        if (fx.size() != sc.state_dim) throw std::logic_error("scenario " + sc.name + ": f has wrong size");
        dz.head(sc.state_dim) = fx;
    }
    Vec ge = sc.g(t, h);
    if (ge.size() != sc.error_dim) throw std::logic_error("scenario " + sc.name + ": g has wrong size");
    dz.tail(sc.error_dim) = ge;
    return dz;
}

Vec draw_noise(int dim, double k_nu, NoiseMode mode, std::mt19937_64& rng) {
    Vec v = Vec::Zero(dim);
    if (k_nu <= 0.0 || dim == 0) return v;
    std::normal_distribution<double> n01;
    for (int i = 0; i < dim; ++i) v(i) = n01(rng);
    double nv = v.norm();
    if (nv == 0.0) return Vec::Zero(dim);
    double radius = k_nu;
    if (mode == NoiseMode::Uniform) {
        std::uniform_real_distribution<double> u01;
        radius *= std::pow(u01(rng), 1.0 / dim);
    }
    return v * (radius * (1.0 - 1e-12) / nv);
}

double max_lag(const Scenario& sc) {
    double m = std::max({sc.lookback, sc.plant_delay, sc.controller_delay, sc.growth_delay.d_max()});
    for (const auto& p : sc.link_delays) m = std::max(m, p.d_max());
    return m;
}

}  // namespace

double default_step(const Scenario& sc, double tau, double requested) {
    if (!(tau > 0.0)) throw std::invalid_argument("integrate: tau must be positive");
    const double dmin = sc.min_positive_delay();
    const double bound = dmin > 0.0 ? std::min(dmin, tau) / 20.0 : tau / 20.0;
    if (requested > 0.0 && requested > bound * (1.0 + 1e-9))
        throw std::invalid_argument("integrate: step exceeds min(delay, tau)/20");
    double target = requested > 0.0 ? requested : bound;
    double n = std::ceil(tau / target - 1e-9);
    return tau / n;
}

SimTrace integrate(const Scenario& sc, const SimConfig& cfg) {
    sc.validate();
    if (!(cfg.horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    const double tau = cfg.tau;
    const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : tau / 10.0;
    if (!(eps <= tau * (1.0 + 1e-12))) throw std::invalid_argument("integrate: epsilon exceeds tau");
    const double h = default_step(sc, tau, cfg.step);
    const int nx = sc.state_dim, ne = sc.error_dim, nz = nx + ne;
    const auto n_tau = static_cast<long>(std::llround(tau / h));
    const long k_eps = std::clamp(static_cast<long>(std::ceil(eps / h - 1e-9)), 1L, n_tau);
    const auto nsteps = static_cast<std::size_t>(std::ceil(cfg.horizon / h - 1e-9));

    const LinkPartition links = sc.links.empty() ? default_partition(ne) : sc.links;
    const ProtocolSpec& proto = sc.protocol;
    const Disturbance& w = cfg.omega ? cfg.omega : sc.omega;

    std::function<Vec(double)> init = cfg.initial;
    if (!init) init = [nz](double) { return Vec(Vec::Zero(nz)); };

    std::size_t keep = 0;
    if (!cfg.record) keep = static_cast<std::size_t>(std::ceil(max_lag(sc) / h)) + 8;
    auto buf = std::make_shared<HistoryBuffer>(0.0, h, init, keep);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<long> spacing(k_eps, n_tau);
    auto draw_spacing = [&]() -> long { return cfg.spacing == Spacing::Fixed ? n_tau : spacing(rng); };

    SimTrace tr;
    tr.step = h;
    tr.tau = tau;
    tr.epsilon = eps;
    tr.nx = nx;
    tr.ne = ne;
    {
        const double lb = max_lag(sc);
        for (int i = 0; i <= 200; ++i) {
            double s = -lb * (1.0 - i / 200.0);
            tr.initial_norm = std::max(tr.initial_norm, init(s).norm());
        }
    }

    Vec z = init(0.0);
    if (z.size() != nz) throw std::invalid_argument("integrate: initial history has wrong size");
    buf->push(z, z);
    ProtocolState pstate = initial_state(proto);
    long next_event = draw_spacing();

    StageView view(*buf, w, sc.disturbance_dim, nx, ne);
    double acc_x = 0.0, acc_e = 0.0, acc_w = 0.0, acc_h = 0.0;

    auto record_node = [&](double t, const Vec& zr) {
        if (!cfg.record) return;
        tr.t.push_back(t);
        tr.x.push_back(zr.head(nx));
        tr.e.push_back(zr.tail(ne));
    };
    auto accumulate_node = [&](double t, const Vec& zr, double weight) {
        acc_x += weight * zr.head(nx).squaredNorm();
        acc_w += weight * view.omega(t).squaredNorm();
        double hn = sc.h_norm(t, view);
        acc_h += weight * hn * hn;
    };

    Vec stage, k1, k2, k3, k4, z_next, z_sub, ka;
    std::vector<double> jump_times{0.0};
    std::vector<std::pair<double, double>> cuts;  // (just before, at) each kink
    const bool track = sc.growth_delay.d_max() > 0.0;
    if (!track) jump_times.clear();
    const auto lag = [&](double s) { return s - sc.growth_delay.value_at(s); };
    bool jumped = false;  // whether the current node carries a jump (left derivative already set)
    for (std::size_t k = 0; k < nsteps; ++k) {
        const double t = buf->time(k);
        view.set_base(t, z);
        view.set(t, z, t, z);
        k1 = eval_flow(sc, t, view);
        buf->set_right_derivative(k, k1);
        if (!jumped) buf->set_left_derivative(k, k1);
        record_node(t, z);
        accumulate_node(t, z, k == 0 ? 0.5 * h : h);
        acc_e += 0.5 * h * z.tail(ne).squaredNorm();

        const double tn = t + h;
        auto rk4 = [&](double ta, const Vec& za, const Vec& ka, double dt) -> Vec {
            const double tm = ta + 0.5 * dt, tb = ta + dt;
            stage = za + (0.5 * dt) * ka;
            view.set(ta, za, tm, stage);
            k2 = eval_flow(sc, tm, view);
            stage = za + (0.5 * dt) * k2;
            view.set(ta, za, tm, stage);
            k3 = eval_flow(sc, tm, view);
            stage = za + dt * k3;
            view.set(ta, za, tb, stage);
            k4 = eval_flow(sc, tb, view);
            return za + (dt / 6.0) * (ka + 2.0 * k2 + 2.0 * k3 + k4);
        };
        // The delayed error jumps where t - d(t) passes an earlier transmission; the step is
        // split there so that no RK stage straddles the discontinuity.
        cuts.clear();
        if (!jump_times.empty()) {
            const double s0 = lag(t), s1 = lag(tn);
            for (auto it = std::upper_bound(jump_times.begin(), jump_times.end(), s0);
                 it != jump_times.end() && *it < s1; ++it) {
                double lo = t, hi = tn;
                for (int i = 0; i < 60; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (lag(mid) < *it ? lo : hi) = mid;
                }
                if (hi - t > 1e-9 * h && tn - hi > 1e-9 * h) cuts.push_back({lo, hi});
            }
        }
        if (cuts.empty()) {
            z_next = rk4(t, z, k1, h);
        } else {
            double ta = t;
            z_sub = z;
            ka = k1;
            for (std::size_t c = 0; c <= cuts.size(); ++c) {
                const double tb = c < cuts.size() ? cuts[c].second : tn;
                z_next = rk4(ta, z_sub, ka, tb - ta);
                z_sub = z_next;
                ta = tb;
                if (c < cuts.size()) {
                    // one-sided slopes at the kink, the delayed error read just before and after
                    view.set(cuts[c].first, z_sub, cuts[c].first, z_sub);
                    Vec before = eval_flow(sc, cuts[c].first, view);
                    view.set(ta, z_sub, ta, z_sub);
                    ka = eval_flow(sc, ta, view);
                    buf->add_breakpoint(k, ta, z_sub, before, ka);
                }
            }
        }

        if (!std::isfinite(z_next.norm()) || z_next.norm() > cfg.blowup)
            throw DivergenceError("integrate: state norm exceeded blow-up bound", tn);
        acc_e += 0.5 * h * z_next.tail(ne).squaredNorm();

        if (static_cast<long>(k + 1) == next_event) {
            view.set(t, z, tn, z_next);
            Vec dy_left = eval_flow(sc, tn, view);
            Vec e_before = z_next.tail(ne);
            TransmissionEvent ev;
            ev.t = tn;
            ev.node = k + 1;
            ev.e_before = e_before;
            if (sc.jump) {
                ev.noise = draw_noise(ne, sc.k_nu, cfg.noise, rng);
                ev.e_after = sc.jump(e_before, ev.noise);
                ev.link = 0;
                pstate.counter++;
            } else {
                int g = granted_link(proto, pstate, e_before, links);
                ev.noise = draw_noise(static_cast<int>(links[g].size()), sc.k_nu, cfg.noise, rng);
                JumpResult jr = apply_jump(proto, pstate, e_before, ev.noise, sc.k_nu, links);
                ev.e_after = jr.e;
                ev.link = jr.granted;
                pstate = jr.state;
            }
            Vec z_plus = z_next;
            z_plus.tail(ne) = ev.e_after;
            buf->push(z_next, z_plus);
            buf->set_left_derivative(k + 1, dy_left);
            if (track) jump_times.push_back(tn);
            tr.events.push_back(std::move(ev));
            z = z_plus;
            jumped = true;
            next_event += draw_spacing();
        } else {
            buf->push(z_next, z_next);
            z = z_next;
            jumped = false;
        }
    }
    const double t_end = buf->time(nsteps);
    view.set_base(t_end, z);
    view.set(t_end, z, t_end, z);
    Vec k_end = eval_flow(sc, t_end, view);
    buf->set_right_derivative(nsteps, k_end);
    if (!jumped) buf->set_left_derivative(nsteps, k_end);
    record_node(t_end, z);
    accumulate_node(t_end, z, 0.5 * h);

    tr.norms = {std::sqrt(acc_x), std::sqrt(acc_e), std::sqrt(acc_w), std::sqrt(acc_h)};
    tr.final_state = z;
    if (cfg.record) tr.history = buf;
    return tr;
}

std::function<Vec(double)> constant_history(const Vec& value) {
    return [value](double) { return value; };
}

std::function<Vec(double)> spline_history(const Scenario& sc, std::uint64_t seed, double scale) {
    const int nz = sc.state_dim + sc.error_dim;
    const double lb = max_lag(sc);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    // Catmull-Rom through random knots spaced lookback/4 apart on [-lookback, 0].
    const int knots = lb > 0.0 ? 6 : 1;
    const double dt = lb > 0.0 ? lb / 4.0 : 1.0;
    std::vector<Vec> val(knots);
    for (auto& v : val) {
        v.resize(nz);
        for (int i = 0; i < nz; ++i) v(i) = u(rng);
    }
    if (knots == 1) return constant_history(val[0]);
    return [val, dt, knots](double s) -> Vec {
        // knot j sits at time -(knots - 2 - j) dt, so the last knot is one spacing past 0
        double pos = s / dt + (knots - 2);
        pos = std::clamp(pos, 0.0, double(knots - 1) - 1e-12);
        int j = static_cast<int>(std::floor(pos));
        double th = pos - j;
        const Vec& p0 = val[std::max(j - 1, 0)];
        const Vec& p1 = val[j];
        const Vec& p2 = val[j + 1];
        const Vec& p3 = val[std::min(j + 2, knots - 1)];
        Vec m1 = 0.5 * (p2 - p0), m2 = 0.5 * (p3 - p1);
        double t2 = th * th, t3 = t2 * th;
        return (2 * t3 - 3 * t2 + 1) * p1 + (t3 - 2 * t2 + th) * m1 + (-2 * t3 + 3 * t2) * p2 +
               (t3 - t2) * m2;
    };
}

std::string trace_csv(const SimTrace& tr) {
    std::string out = "t_s";
    for (int i = 0; i < tr.nx; ++i) out += ",x" + std::to_string(i + 1);
    for (int i = 0; i < tr.ne; ++i) out += ",e" + std::to_string(i + 1);
    out += ",event,granted_link\n";
    std::size_t ev = 0;
    char buf[64];
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g", tr.t[k]);
        out += buf;
        for (int i = 0; i < tr.nx; ++i) {
            std::snprintf(buf, sizeof buf, ",%.10g", tr.x[k](i));
            out += buf;
        }
        for (int i = 0; i < tr.ne; ++i) {
            std::snprintf(buf, sizeof buf, ",%.10g", tr.e[k](i));
            out += buf;
        }
        while (ev < tr.events.size() && tr.events[ev].node < k) ++ev;
        if (ev < tr.events.size() && tr.events[ev].node == k) {
            std::snprintf(buf, sizeof buf, ",1,%d\n", tr.events[ev].link + 1);
            out += buf;
        } else {
            out += ",0,\n";
        }
    }
    return out;
}

}  // namespace mati
