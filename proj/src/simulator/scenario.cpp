#include "mati/simulator/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mati {

double Scenario::min_positive_delay() const {
    double m = kInf;
    auto take = [&](double d) {
        if (d > 0.0) m = std::min(m, d);
    };
    for (const auto& p : link_delays) take(p.d_max());
    take(plant_delay);
    take(controller_delay);
    take(growth_delay.d_max());
    return std::isfinite(m) ? m : 0.0;
}

ErrorSystemParams Scenario::error_params() const {
    ErrorSystemParams p;
    p.a = undelayed() ? growth_l : growth_l * protocol.a_upper / protocol.a_lower;
    p.c = protocol.rho;
    p.d_max = growth_delay.d_max();
    p.k_nu = k_nu;
    p.a_lower = protocol.a_lower;
    p.a_upper = protocol.a_upper;
    return p;
}

void Scenario::validate() const {
    if (state_dim < 0 || error_dim < 1 || state_dim + error_dim > kMaxDim)
        throw std::invalid_argument("scenario " + name + ": bad dimensions");
    if (disturbance_dim < 0 || disturbance_dim > kMaxDim)
        throw std::invalid_argument("scenario " + name + ": bad disturbance dimension");
    if (!f || !g || !h_norm) throw std::invalid_argument("scenario " + name + ": missing evaluator");
    validate_partition(links.empty() ? default_partition(error_dim) : links, error_dim);
    const int l = links.empty() ? error_dim : static_cast<int>(links.size());
    if (protocol.link_count != l)
        throw std::invalid_argument("scenario " + name + ": protocol link count mismatch");
    if (!(growth_l >= 0.0)) throw std::invalid_argument("scenario " + name + ": L < 0");
    if (!(gains.ugas >= 0.0) || !(gains.lp >= 0.0))
        throw std::invalid_argument("scenario " + name + ": gamma_H < 0");
    if (!(k_nu >= 0.0)) throw std::invalid_argument("scenario " + name + ": K_nu < 0");
    if (!(lookback >= 0.0)) throw std::invalid_argument("scenario " + name + ": lookback < 0");
}

}  // namespace mati
