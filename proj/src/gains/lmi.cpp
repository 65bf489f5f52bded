#include "mati/gains/lmi.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mati {

namespace {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kHuge = std::numeric_limits<double>::infinity();

Matrix2d sym(double a, double b, double c) {
    Matrix2d m;
    m << a, b, b, c;
    return m;
}

// Row blocks of the output map [Cx, Cxd, 0, Dw] restricted to the active blocks.
MatrixXd assemble(const LmiProblem& p, double n, double gamma, const Matrix2d& C, const Matrix2d& E) {
    const int dim = p.block_dim();
    MatrixXd M = MatrixXd::Zero(dim, dim);
    const double s = p.output_scale;
    const Matrix2d A = p.delayed ? p.A1 : Matrix2d(p.A1 + p.A2);
    const Matrix2d Cx = s * (p.delayed ? p.Cx : Matrix2d(p.Cx + p.Cxd));
    const Matrix2d Cxd = s * p.Cxd;
    const Matrix2d Dw = s * p.Dw;

    MatrixXd out = MatrixXd::Zero(2, dim);
    int k = 0;
    const int ix = k;
    out.block(0, k, 2, 2) = Cx;
    k += 2;
    int ixd = -1;
    if (p.delayed) {
        ixd = k;
        out.block(0, k, 2, 2) = Cxd;
        k += 2;
    }
    int ie = -1;
    if (p.error_input) {
        ie = k;
        k += 2;
    }
    int iw = -1;
    if (p.disturbance_input) {
        iw = k;
        out.block(0, k, 2, 2) = Dw;
        k += 2;
    }

    const Matrix2d AN = A + n * p.B1;
    M.block(ix, ix, 2, 2) = AN.transpose() * C + C * AN;
    if (p.delayed) {
        M.block(ix, ix, 2, 2) += E;
        M.block(ix, ixd, 2, 2) = C * p.A2;
        M.block(ixd, ix, 2, 2) = p.A2.transpose() * C;
        M.block(ixd, ixd, 2, 2) = -E;
    }
    if (ie >= 0) {
        M.block(ix, ie, 2, 2) = C * p.B;
        M.block(ie, ix, 2, 2) = p.B.transpose() * C;
        M.block(ie, ie, 2, 2) = -gamma * gamma * Matrix2d::Identity();
    }
    if (iw >= 0) {
        M.block(ix, iw, 2, 2) = C * p.Bw;
        M.block(iw, ix, 2, 2) = p.Bw.transpose() * C;
        M.block(iw, iw, 2, 2) = -gamma * gamma * Matrix2d::Identity();
    }
    M += out.transpose() * out;
    return M;
}

double max_eig(const MatrixXd& M, VectorXd* v = nullptr) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
    const int n = static_cast<int>(M.rows());
    if (v) *v = es.eigenvectors().col(n - 1);
    return es.eigenvalues()(n - 1);
}

bool positive_definite(const Matrix2d& m) {
    Eigen::LLT<Matrix2d> llt(m);
    return llt.info() == Eigen::Success && m(0, 0) > 0.0 && m.determinant() > 0.0;
}

// Affine structure: LMI(p) = F0 + sum_i p_i F_i for each N endpoint,
// p = (C11, C12, C22[, E11, E12, E22]).
struct AffineLmi {
    int nvar;
    std::array<MatrixXd, 2> F0;
    std::array<std::vector<MatrixXd>, 2> Fi;

    AffineLmi(const LmiProblem& p, double gamma) {
        nvar = p.delayed ? 6 : 3;
        const std::array<double, 2> ns{p.n_min, p.n_max};
        for (int k = 0; k < 2; ++k) {
            F0[k] = assemble(p, ns[k], gamma, Matrix2d::Zero(), Matrix2d::Zero());
            for (int i = 0; i < nvar; ++i) {
                VectorXd e = VectorXd::Zero(6);
                e(i) = 1.0;
                Fi[k].push_back(assemble(p, ns[k], gamma, sym(e(0), e(1), e(2)), sym(e(3), e(4), e(5))) -
                                F0[k]);
            }
        }
    }

    MatrixXd at(int k, const VectorXd& x) const {
        MatrixXd M = F0[k];
        for (int i = 0; i < nvar; ++i) M += x(i) * Fi[k][static_cast<std::size_t>(i)];
        return M;
    }
};

// Convex objective max{lmax LMI(n_min), lmax LMI(n_max), -lmin C, -lmin E} and a subgradient.
double objective(const AffineLmi& lmi, const VectorXd& x, VectorXd& g) {
    double best = -kHuge;
    g = VectorXd::Zero(lmi.nvar);
    VectorXd v;
    for (int k = 0; k < 2; ++k) {
        double val = max_eig(lmi.at(k, x), &v);
        if (val > best) {
            best = val;
            for (int i = 0; i < lmi.nvar; ++i) g(i) = v.dot(lmi.Fi[k][static_cast<std::size_t>(i)] * v);
        }
    }
    const int blocks = lmi.nvar / 3;
    for (int b = 0; b < blocks; ++b) {
        Matrix2d m = sym(x(3 * b), x(3 * b + 1), x(3 * b + 2));
        Eigen::SelfAdjointEigenSolver<Matrix2d> es(m);
        double val = -es.eigenvalues()(0);
        if (val > best) {
            best = val;
            Eigen::Vector2d u = es.eigenvectors().col(0);
            g.setZero();
            g(3 * b) = -u(0) * u(0);
            g(3 * b + 1) = -2.0 * u(0) * u(1);
            g(3 * b + 2) = -u(1) * u(1);
        }
    }
    return best;
}

struct EllipsoidOutcome {
    bool feasible = false;
    VectorXd x;
    double best = 0.0;
    int iterations = 0;
};

// Central-cut ellipsoid method; stops on a strictly feasible point or once the
// lower bound f(x) - sqrt(g'Pg) proves the ball holds none.
EllipsoidOutcome run_ellipsoid(const AffineLmi& lmi, VectorXd x, double radius, double strict,
                               int max_iter) {
    const int n = lmi.nvar;
    MatrixXd P = radius * radius * MatrixXd::Identity(n, n);
    EllipsoidOutcome out;
    out.best = kHuge;
    VectorXd g;
    const double nn = n;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        double f = objective(lmi, x, g);
        if (f < out.best) {
            out.best = f;
            out.x = x;
        }
        if (f < -strict) {
            out.feasible = true;
            out.x = x;
            return out;
        }
        VectorXd Pg = P * g;
        double q = g.dot(Pg);
        if (!(q > 0.0) || !std::isfinite(q)) return out;
        double sq = std::sqrt(q);
        if (f - sq > 0.0) return out;  // certified empty inside the current ellipsoid
        if (sq < 1e-14 * (1.0 + std::abs(f))) return out;
        VectorXd gt = Pg / sq;
        x -= gt / (nn + 1.0);
        P = (nn * nn / (nn * nn - 1.0)) * (P - (2.0 / (nn + 1.0)) * gt * gt.transpose());
        P = 0.5 * (P + P.transpose());
    }
    return out;
}

}  // namespace

int LmiProblem::block_dim() const {
    return 2 + (delayed ? 2 : 0) + (error_input ? 2 : 0) + (disturbance_input ? 2 : 0);
}

void LmiProblem::validate() const {
    for (const Matrix2d* m : {&A1, &A2, &B1, &B, &Bw, &Cx, &Cxd, &Dw})
        if (!m->allFinite()) throw std::invalid_argument("lmi: non-finite system matrix");
    if (!(n_min <= n_max)) throw std::invalid_argument("lmi: need n_min <= n_max");
    if (!(output_scale > 0.0) || !std::isfinite(output_scale))
        throw std::invalid_argument("lmi: output scale must be > 0");
    if (!error_input && !disturbance_input) throw std::invalid_argument("lmi: no input channel");
}

LmiProblem LmiProblem::scaled_output(double s) const {
    LmiProblem q = *this;
    q.output_scale *= s;
    return q;
}

double lmi_margin(const LmiProblem& p, double gamma, const Matrix2d& c_mat, const Matrix2d& e_mat) {
    p.validate();
    if (!(gamma > 0.0)) throw std::invalid_argument("lmi_margin: gamma must be > 0");
    if (!positive_definite(c_mat)) throw std::invalid_argument("lmi_margin: C is not positive definite");
    if (p.delayed && !positive_definite(e_mat))
        throw std::invalid_argument("lmi_margin: E is not positive definite");
    return std::max(max_eig(assemble(p, p.n_min, gamma, c_mat, e_mat)),
                    max_eig(assemble(p, p.n_max, gamma, c_mat, e_mat)));
}

FeasibilityResult find_witness(const LmiProblem& p, double gamma, const EllipsoidConfig& cfg) {
    p.validate();
    if (!(gamma > 0.0)) throw std::invalid_argument("find_witness: gamma must be > 0");
    // Work on the unscaled output and on LMI / gamma^2, so the search box is O(1).
    LmiProblem base = p;
    base.output_scale = 1.0;
    const double s = p.output_scale;
    const double g0 = gamma / s;
    const double g2 = g0 * g0;
    // With C = g^2 C', E = g^2 E' the LMI divided by g^2 is F0/g^2 + sum_i p'_i F_i.
    AffineLmi lmi(base, g0);
    for (auto& k : lmi.F0) k /= g2;

    FeasibilityResult res;
    const int n = lmi.nvar;
    VectorXd x0 = VectorXd::Zero(n);
    for (int b = 0; b < n / 3; ++b) {
        x0(3 * b) = cfg.initial_center;
        x0(3 * b + 2) = cfg.initial_center;
    }
    auto attempt = run_ellipsoid(lmi, x0, cfg.initial_radius, cfg.strict_margin, cfg.max_iterations);
    res.iterations = attempt.iterations;
    if (!attempt.feasible) {
        auto wide = run_ellipsoid(lmi, VectorXd::Zero(n), cfg.restart_radius, cfg.strict_margin,
                                  cfg.max_iterations);
        res.iterations += wide.iterations;
        if (wide.feasible || wide.best < attempt.best) attempt = wide;
    }
    res.margin = attempt.best * g2 * s * s;
    if (!attempt.feasible) return res;

    const VectorXd& x = attempt.x;
    Matrix2d C = g2 * sym(x(0), x(1), x(2));
    Matrix2d E = p.delayed ? Matrix2d(g2 * sym(x(3), x(4), x(5))) : Matrix2d::Identity();
    // Map the witness back to the scaled output: V -> s^2 V.
    C *= s * s;
    if (p.delayed) E *= s * s;
    if (!positive_definite(C) || (p.delayed && !positive_definite(E))) return res;
    double m = lmi_margin(p, gamma, C, E);
    res.margin = m;
    if (!(m < 0.0)) return res;
    res.feasible = true;
    res.c_mat = C;
    res.e_mat = E;
    return res;
}

GainEstimate estimate_l2_gain(const LmiProblem& p, double tol, const GainBudget& budget) {
    p.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("estimate_l2_gain: tol must be > 0");
    if (p.output_scale != 1.0) {
        // Scaling H by s scales the minimal gamma by s exactly (witness V -> s^2 V).
        const double s = p.output_scale;
        LmiProblem base = p;
        base.output_scale = 1.0;
        GainBudget b = budget;
        b.ceiling = budget.ceiling / s;
        GainEstimate est = estimate_l2_gain(base, tol, b);
        est.gamma_h *= s;
        est.c_mat *= s * s;
        est.e_mat *= s * s;
        est.margin *= s * s;
        for (auto& t : est.trace) {
            t.gamma *= s;
            t.margin *= s * s;
        }
        return est;
    }
    GainEstimate est;
    double lo = 0.0, hi = 1.0;
    FeasibilityResult best;
    int steps = 0;
    auto probe = [&](double g) {
        auto r = find_witness(p, g, budget.ellipsoid);
        est.trace.push_back({g, r.feasible, r.margin});
        ++steps;
        return r;
    };
    for (;;) {
        auto r = probe(hi);
        if (r.feasible) {
            best = r;
            break;
        }
        lo = hi;
        hi *= 2.0;
        if (hi > budget.ceiling || steps >= budget.max_bisections)
            throw std::runtime_error("estimate_l2_gain: no feasible gamma below the ceiling");
    }
    while (hi - lo > tol * hi && steps < budget.max_bisections) {
        double mid = 0.5 * (lo + hi);
        auto r = probe(mid);
        if (r.feasible) {
            hi = mid;
            best = r;
        } else {
            lo = mid;
        }
    }
    est.gamma_h = hi;
    est.c_mat = best.c_mat;
    est.e_mat = best.e_mat;
    est.margin = best.margin;
    return est;
}

LmiProblem example1_lmi(Example1Output output, bool delayed) {
    LmiProblem p;
    p.A1 << -0.5, 1, -2, -1;
    p.A2 << 0, 0, 0, -0.3;
    p.B1 << -0.25, 0, 1, 0;
    p.B << 0, 0, -2, -2;
    p.delayed = delayed;
    if (output == Example1Output::Detectability) {
        p.Cx = Eigen::Matrix2d::Identity();
        return p;
    }
    p.Cx << 0.5, -1, 0, 0;
    p.Cxd << 0, 0, 2, 2;
    p.Dw << -1, 0, 0, 0;
    if (output == Example1Output::Rr) p.output_scale = std::sqrt(2.0);
    return p;
}

LmiProblem scalar_sanity_lmi() {
    LmiProblem p;
    p.A1 = -Eigen::Matrix2d::Identity();
    p.Cx = Eigen::Matrix2d::Identity();
    return p;
}

}  // namespace mati
