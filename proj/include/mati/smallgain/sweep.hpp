#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mati/smallgain/certify.hpp"

namespace mati {

// Everything certify needs at one delay value; a missing gamma_h marks the row not certified.
struct SweepPoint {
    ErrorSystemParams params;
    std::optional<double> gamma_h;
    std::optional<double> gamma_d;
    std::optional<double> gamma_des;
};

using SweepTemplate = std::function<SweepPoint(double d)>;

struct SweepRow {
    double d = 0.0;
    ProtocolKind protocol = ProtocolKind::TryOnceDiscard;
    EstimatorKind estimator = EstimatorKind::Zoh;
    CertMode mode = CertMode::LpStable;
    std::optional<double> gamma_h;
    std::optional<MatiCertificate> cert;
    std::string error;  // empty when certified
};

// One row per grid point, sorted by d; errors are recorded per row, never thrown.
std::vector<SweepRow> sweep(const SweepTemplate& tmpl, const std::vector<double>& grid,
                            ProtocolKind protocol, EstimatorKind estimator, CertMode mode,
                            const SearchConfig& search = {}, int workers = 0);

// delay_ms,protocol,estimator,mode,gamma_H,tau_ms,lambda,M,r,lambda2,margin_I,margin_II
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace mati
