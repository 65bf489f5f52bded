#include "mati/core/delay_profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mati/core/errors.hpp"

namespace mati {

namespace {

constexpr double kSlack = 1e-12;

[[noreturn]] void violation(const char* what, double t, double got, double bound) {
    std::ostringstream os;
    os.precision(17);
    os << "delay profile: " << what << " violated at t=" << t << " (" << got << " vs bound "
       << bound << ")";
    throw DelayProfileError(os.str(), t);
}

}  // namespace

double DelayProfile::value_at(double t) const {
    switch (kind_) {
    case DelayKind::Constant:
        return d_max_;
    case DelayKind::Sinusoidal:
        return 0.5 * d_max_ * (1.0 + std::sin(p_.omega * t + p_.phase));
    case DelayKind::Table: {
        const auto& ts = p_.times;
        const auto& vs = p_.values;
        if (t <= ts.front()) return vs.front();
        if (t >= ts.back()) return vs.back();
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
        double s = (t - ts[k]) / (ts[k + 1] - ts[k]);
        return vs[k] + s * (vs[k + 1] - vs[k]);
    }
    }
    return 0.0;
}

double DelayProfile::derivative_at(double t) const {
    switch (kind_) {
    case DelayKind::Constant:
        return 0.0;
    case DelayKind::Sinusoidal:
        return 0.5 * d_max_ * p_.omega * std::cos(p_.omega * t + p_.phase);
    case DelayKind::Table: {
        const auto& ts = p_.times;
        const auto& vs = p_.values;
        if (t < ts.front() || t >= ts.back()) return 0.0;
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
        return (vs[k + 1] - vs[k]) / (ts[k + 1] - ts[k]);
    }
    }
    return 0.0;
}

DelayProfile make_delay_profile(DelayKind kind, double d_max, double d_rate_max,
                                const DelayParams& params) {
    if (!(d_max >= 0.0) || !std::isfinite(d_max))
        throw std::invalid_argument("delay profile: d_max must be finite and >= 0");
    if (!(d_rate_max >= 0.0) || !std::isfinite(d_rate_max))
        throw std::invalid_argument("delay profile: d_rate_max must be finite and >= 0");

    DelayProfile prof;
    prof.kind_ = kind;
    prof.d_max_ = d_max;
    prof.d_rate_max_ = d_rate_max;
    prof.p_ = params;

    switch (kind) {
    case DelayKind::Constant:
        break;
    case DelayKind::Sinusoidal: {
        if (!(params.omega >= 0.0) || !std::isfinite(params.omega))
            throw std::invalid_argument("delay profile: sinusoid frequency must be finite and >= 0");
        if (params.omega == 0.0 || d_max == 0.0) break;
        // One period sampled densely; the slope peaks where the cosine does.
        const int n = 4096;
        const double period = 2.0 * std::numbers::pi / params.omega;
        for (int k = 0; k <= n; ++k) {
            double t = period * k / n;
            double slope = std::abs(prof.derivative_at(t));
            if (slope > d_rate_max + kSlack) violation("derivative bound", t, slope, d_rate_max);
        }
        break;
    }
    case DelayKind::Table: {
        const auto& ts = params.times;
        const auto& vs = params.values;
        if (ts.size() < 2 || ts.size() != vs.size())
            throw std::invalid_argument("delay profile: table needs >= 2 matching (t, d) samples");
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (!std::isfinite(ts[k]) || !std::isfinite(vs[k]))
                throw std::invalid_argument("delay profile: non-finite table entry");
            if (k > 0 && !(ts[k] > ts[k - 1]))
                throw std::invalid_argument("delay profile: table times must increase strictly");
            if (vs[k] < 0.0 || vs[k] > d_max) violation("range [0, d_max]", ts[k], vs[k], d_max);
            if (k > 0) {
                double slope = std::abs(vs[k] - vs[k - 1]) / (ts[k] - ts[k - 1]);
                if (slope > d_rate_max + kSlack)
                    violation("derivative bound", ts[k - 1], slope, d_rate_max);
            }
        }
        break;
    }
    }
    return prof;
}

DelayProfile sinusoidal_delay(double d_max, double d_rate_max) {
    if (d_max == 0.0 || d_rate_max == 0.0) return constant_delay(d_max);
    DelayParams p;
    p.omega = 2.0 * d_rate_max / d_max;
    return make_delay_profile(DelayKind::Sinusoidal, d_max, d_rate_max, p);
}

}  // namespace mati
