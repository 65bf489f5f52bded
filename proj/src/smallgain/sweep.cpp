#include "mati/smallgain/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

namespace mati {

std::vector<SweepRow> sweep(const SweepTemplate& tmpl, const std::vector<double>& grid,
                            ProtocolKind protocol, EstimatorKind estimator, CertMode mode,
                            const SearchConfig& search, int workers) {
    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            SweepRow& row = rows[i];
            row.d = grid[i];
            row.protocol = protocol;
            row.estimator = estimator;
            row.mode = mode;
            try {
                SweepPoint pt = tmpl(grid[i]);
                row.gamma_h = pt.gamma_h;
                if (!pt.gamma_h) {
                    row.error = "no gamma_H for this delay";
                    continue;
                }
                row.cert = certify(pt.params, *pt.gamma_h, mode, pt.gamma_d, pt.gamma_des, search);
            } catch (const std::exception& ex) {
                row.error = ex.what();
            }
        }
    };
    unsigned n = workers > 0 ? static_cast<unsigned>(workers)
                             : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(grid.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
        work();
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.d < b.d; });
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "delay_ms,protocol,estimator,mode,gamma_H,tau_ms,lambda,M,r,lambda2,margin_I,margin_II\n";
    char buf[512];
    auto num = [](double v) {
        char b[64];
        std::snprintf(b, sizeof b, "%.10g", v);
        return std::string(b);
    };
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,", num(r.d * 1e3).c_str(), to_string(r.protocol).c_str(),
                      to_string(r.estimator).c_str(), to_string(r.mode).c_str());
        out += buf;
        out += r.gamma_h ? num(*r.gamma_h) : "";
        if (r.cert) {
            const auto& c = *r.cert;
            out += "," + num(c.tau * 1e3) + "," + num(c.witness.lambda) + "," + num(c.witness.big_m) + "," +
                   num(c.witness.r) + "," + num(c.witness.lambda2) + "," + num(c.margin_I) + "," +
                   num(c.margin_II);
        } else {
            out += ",,,,,,,";
        }
        out += "\n";
    }
    return out;
}

}  // namespace mati
