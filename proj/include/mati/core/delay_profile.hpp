#pragma once

#include <vector>

namespace mati {

enum class DelayKind { Constant, Sinusoidal, Table };

// Parameters beyond (d_max, d_rate_max). Sinusoidal: d(t) = d_max/2 (1 + sin(omega t + phase)).
// Table: piecewise-linear through (times, values), held constant outside the table.
struct DelayParams {
    double omega = 0.0;
    double phase = 0.0;
    std::vector<double> times;
    std::vector<double> values;
};

class DelayProfile {
public:
    DelayProfile() = default;

    DelayKind kind() const { return kind_; }
    double d_max() const { return d_max_; }
    double d_rate_max() const { return d_rate_max_; }
    bool is_zero() const { return kind_ == DelayKind::Constant && d_max_ == 0.0; }

    double value_at(double t) const;
    double derivative_at(double t) const;

    friend DelayProfile make_delay_profile(DelayKind, double, double, const DelayParams&);

private:
    DelayKind kind_ = DelayKind::Constant;
    double d_max_ = 0.0;
    double d_rate_max_ = 0.0;
    DelayParams p_;
};

// Throws DelayProfileError (carrying the first violating t) when a sampled
// value leaves [0, d_max] or a sampled slope exceeds d_rate_max.
DelayProfile make_delay_profile(DelayKind kind, double d_max, double d_rate_max,
                                const DelayParams& params = {});

inline DelayProfile constant_delay(double d) {
    return make_delay_profile(DelayKind::Constant, d, 0.0);
}

// Sinusoid whose slope bound is exactly d_rate_max (omega = 2 d_rate_max / d_max).
DelayProfile sinusoidal_delay(double d_max, double d_rate_max);

}  // namespace mati
