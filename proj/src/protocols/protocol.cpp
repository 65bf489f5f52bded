#include "mati/protocols/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mati {

namespace {

const LinkPartition& resolve(const LinkPartition& links, const ProtocolSpec& proto,
                             LinkPartition& scratch, long n_e) {
    if (!links.empty()) {
        if (static_cast<int>(links.size()) != proto.link_count)
            throw std::invalid_argument("protocol: partition has " + std::to_string(links.size()) +
                                        " links, protocol expects " +
                                        std::to_string(proto.link_count));
        return links;
    }
    if (n_e != proto.link_count)
        throw std::invalid_argument("protocol: error dimension " + std::to_string(n_e) +
                                    " does not match " + std::to_string(proto.link_count) +
                                    " single-component links");
    scratch = default_partition(proto.link_count);
    return scratch;
}

double link_norm_sq(const Vec& e, const std::vector<int>& idx) {
    double s = 0.0;
    for (int i : idx) s += e[i] * e[i];
    return s;
}

}  // namespace

LinkPartition default_partition(int links) {
    LinkPartition p(static_cast<std::size_t>(links));
    for (int j = 0; j < links; ++j) p[static_cast<std::size_t>(j)] = {j};
    return p;
}

void validate_partition(const LinkPartition& links, int error_dim) {
    std::vector<int> seen(static_cast<std::size_t>(error_dim), 0);
    for (const auto& link : links) {
        if (link.empty()) throw std::invalid_argument("partition: empty link");
        for (int i : link) {
            if (i < 0 || i >= error_dim)
                throw std::invalid_argument("partition: index " + std::to_string(i) + " out of range");
            if (seen[static_cast<std::size_t>(i)]++)
                throw std::invalid_argument("partition: index " + std::to_string(i) + " used twice");
        }
    }
    for (int i = 0; i < error_dim; ++i)
        if (!seen[static_cast<std::size_t>(i)])
            throw std::invalid_argument("partition: index " + std::to_string(i) + " not covered");
}

ProtocolSpec make_round_robin(int l) {
    if (l < 1) throw std::invalid_argument("protocol: need at least one link");
    return {ProtocolKind::RoundRobin, l, 1.0, std::sqrt(double(l)), std::sqrt(double(l - 1) / l)};
}

ProtocolSpec make_tod(int l) {
    if (l < 1) throw std::invalid_argument("protocol: need at least one link");
    return {ProtocolKind::TryOnceDiscard, l, 1.0, 1.0, std::sqrt(double(l - 1) / l)};
}

ProtocolSpec make_protocol(ProtocolKind kind, int l) {
    return kind == ProtocolKind::RoundRobin ? make_round_robin(l) : make_tod(l);
}

ProtocolState initial_state(const ProtocolSpec& proto) {
    ProtocolState s;
    if (proto.kind == ProtocolKind::RoundRobin) {
        s.steps_until_grant.resize(static_cast<std::size_t>(proto.link_count));
        for (int j = 0; j < proto.link_count; ++j) s.steps_until_grant[static_cast<std::size_t>(j)] = j;
    }
    return s;
}

int granted_link(const ProtocolSpec& proto, const ProtocolState& state, const Vec& e,
                 const LinkPartition& links) {
    if (proto.kind == ProtocolKind::RoundRobin) {
        for (int j = 0; j < proto.link_count; ++j)
            if (state.steps_until_grant.at(static_cast<std::size_t>(j)) == 0) return j;
        throw std::logic_error("protocol: round-robin state has no link due");
    }
    LinkPartition scratch;
    const auto& part = resolve(links, proto, scratch, e.size());
    int best = 0;
    double best_sq = -1.0;
    for (int j = 0; j < proto.link_count; ++j) {
        double s = link_norm_sq(e, part[static_cast<std::size_t>(j)]);
        if (s > best_sq) {
            best_sq = s;
            best = j;
        }
    }
    return best;
}

ProtocolState advance(const ProtocolSpec& proto, const ProtocolState& state, int granted) {
    ProtocolState next = state;
    ++next.counter;
    if (proto.kind == ProtocolKind::RoundRobin) {
        for (int j = 0; j < proto.link_count; ++j) {
            auto& s = next.steps_until_grant[static_cast<std::size_t>(j)];
            s = (j == granted) ? proto.link_count - 1 : s - 1;
        }
    }
    return next;
}

double w_value(const ProtocolSpec& proto, const ProtocolState& state, const Vec& e,
               const LinkPartition& links) {
    LinkPartition scratch;
    const auto& part = resolve(links, proto, scratch, e.size());
    if (proto.kind == ProtocolKind::TryOnceDiscard) return e.norm();
    double acc = 0.0;
    for (int j = 0; j < proto.link_count; ++j) {
        double w = state.steps_until_grant.at(static_cast<std::size_t>(j)) + 1.0;
        acc += w * link_norm_sq(e, part[static_cast<std::size_t>(j)]);
    }
    return std::sqrt(acc);
}

JumpResult apply_jump(const ProtocolSpec& proto, const ProtocolState& state, const Vec& e,
                      const Vec& noise, double k_nu, const LinkPartition& links) {
    LinkPartition scratch;
    const auto& part = resolve(links, proto, scratch, e.size());
    int g = granted_link(proto, state, e, part);
    const auto& idx = part[static_cast<std::size_t>(g)];
    if (noise.size() != 0 && noise.size() != static_cast<long>(idx.size()))
        throw std::invalid_argument("protocol: noise dimension does not match granted link");
    if (noise.size() != 0 && noise.norm() > k_nu)
        throw std::invalid_argument("protocol: injected noise exceeds declared bound K_nu");

    JumpResult out;
    out.e = e;
    for (std::size_t k = 0; k < idx.size(); ++k)
        out.e[idx[k]] = noise.size() ? noise[static_cast<long>(k)] : 0.0;
    out.state = advance(proto, state, g);
    out.granted = g;
    return out;
}

}  // namespace mati
