#pragma once

#include <cstdint>
#include <vector>

#include "mati/core/types.hpp"

namespace mati {

// Error indices carried by each link. Empty means one component per link.
using LinkPartition = std::vector<std::vector<int>>;

LinkPartition default_partition(int links);
void validate_partition(const LinkPartition& links, int error_dim);

struct ProtocolState {
    std::uint64_t counter = 0;
    // RR only: steps until each link is granted next (a permutation of 0..l-1).
    std::vector<int> steps_until_grant;
};

ProtocolSpec make_round_robin(int l);
ProtocolSpec make_tod(int l);
ProtocolSpec make_protocol(ProtocolKind kind, int l);

ProtocolState initial_state(const ProtocolSpec& proto);

// Link that the next jump grants; for TOD this depends on e (largest norm, lowest index on ties).
int granted_link(const ProtocolSpec& proto, const ProtocolState& state, const Vec& e,
                 const LinkPartition& links = {});

ProtocolState advance(const ProtocolSpec& proto, const ProtocolState& state, int granted);

double w_value(const ProtocolSpec& proto, const ProtocolState& state, const Vec& e,
               const LinkPartition& links = {});

struct JumpResult {
    Vec e;
    ProtocolState state;
    int granted = 0;
};

// Replaces the granted link's components with `noise` (its sub-vector, may be empty for zero).
// Throws when ||noise|| > k_nu.
JumpResult apply_jump(const ProtocolSpec& proto, const ProtocolState& state, const Vec& e,
                      const Vec& noise = Vec(), double k_nu = 0.0,
                      const LinkPartition& links = {});

}  // namespace mati
