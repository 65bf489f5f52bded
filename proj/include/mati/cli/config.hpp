#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mati/core/types.hpp"
#include "mati/simulator/examples.hpp"

namespace mati::cli {

// Invalid flags, values or combinations; maps to exit status 1.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;  // certify | sweep | simulate | gain | verify
    std::string scenario = "example1";
    ProtocolKind protocol = ProtocolKind::TryOnceDiscard;
    EstimatorKind estimator = EstimatorKind::Zoh;
    CertMode mode = CertMode::LpStable;
    double d = 0.0;       // seconds
    double d_rate = 0.0;  // dimensionless
    std::vector<double> d_grid;
    double k_nu = 0.0;
    std::optional<double> epsilon;
    double p_order = 2.0;
    ExampleOptions gains;

    // tau override: seconds, or a multiple of the certified tau* when tau_relative
    std::optional<double> tau;
    bool tau_relative = false;
    double horizon = 0.0;  // 0 picks the scenario default
    std::uint64_t seed = 1;
    std::string spacing = "random";
    int trials = 50;
    int workers = 0;

    // gain command
    std::string problem = "tod";  // tod | rr | detect | scalar
    double tolerance = 1e-3;

    std::string output;  // file or directory; empty falls back to MATI_OUTPUT_DIR
    bool svg = false;

    void validate() const;
};

// "10ms", "0.5s", "2.5e-3s"; a bare number counts as seconds unless require_unit is set
// (a bare 0 is always accepted).
double parse_duration(const std::string& text, bool require_unit = false);

// "start:step:stop" with a shared unit suffix, e.g. "0:5:50ms", or a comma list "0ms,10ms".
std::vector<double> parse_delay_grid(const std::string& text, bool require_unit = false);

// "0.9x" (relative to tau*) or a duration.
void parse_tau(const std::string& text, RunConfig& cfg, bool require_unit = false);

// Applies an INI file with sections [scenario], [certify], [sweep], [simulate], [output].
void apply_config_file(const std::string& path, RunConfig& cfg);

}  // namespace mati::cli
