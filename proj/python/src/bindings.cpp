#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mati/core/errors.hpp"
#include "mati/gains/lmi.hpp"
#include "mati/razumikhin/conditions.hpp"
#include "mati/simulator/examples.hpp"
#include "mati/simulator/validation.hpp"
#include "mati/smallgain/sweep.hpp"

namespace py = pybind11;
using namespace mati;

namespace {

py::dict trace_dict(const SimTrace& tr) {
    py::dict d;
    d["step"] = tr.step;
    d["t"] = tr.t;
    std::vector<std::vector<double>> x, e;
    for (const auto& v : tr.x) x.emplace_back(v.data(), v.data() + v.size());
    for (const auto& v : tr.e) e.emplace_back(v.data(), v.data() + v.size());
    d["x"] = x;
    d["e"] = e;
    std::vector<double> et;
    std::vector<int> links;
    for (const auto& ev : tr.events) {
        et.push_back(ev.t);
        links.push_back(ev.link);
    }
    d["event_times"] = et;
    d["granted"] = links;
    d["final_norm"] = tr.final_state.norm();
    d["initial_norm"] = tr.initial_norm;
    d["l2"] = py::dict(py::arg("x") = tr.norms.x, py::arg("e") = tr.norms.e,
                       py::arg("omega") = tr.norms.omega, py::arg("h") = tr.norms.h);
    return d;
}

}  // namespace

PYBIND11_MODULE(_mati, m) {
    m.doc() = "MATI certification for delayed networked control loops";

    py::register_exception<InfeasibleTarget>(m, "InfeasibleTarget", PyExc_ValueError);
    py::register_exception<SearchFailure>(m, "SearchFailure", PyExc_RuntimeError);

    py::enum_<ProtocolKind>(m, "ProtocolKind")
        .value("RoundRobin", ProtocolKind::RoundRobin)
        .value("TryOnceDiscard", ProtocolKind::TryOnceDiscard);
    py::enum_<EstimatorKind>(m, "EstimatorKind").value("Zoh", EstimatorKind::Zoh).value("Model", EstimatorKind::Model);
    py::enum_<CertMode>(m, "CertMode")
        .value("Ugas", CertMode::Ugas)
        .value("LpStable", CertMode::LpStable)
        .value("LpWithTarget", CertMode::LpWithTarget);

    py::class_<ProtocolSpec>(m, "ProtocolSpec")
        .def_readonly("kind", &ProtocolSpec::kind)
        .def_readonly("link_count", &ProtocolSpec::link_count)
        .def_readonly("a_lower", &ProtocolSpec::a_lower)
        .def_readonly("a_upper", &ProtocolSpec::a_upper)
        .def_readonly("rho", &ProtocolSpec::rho);
    m.def("make_protocol", &make_protocol, py::arg("kind"), py::arg("links"));

    py::class_<ErrorSystemParams>(m, "ErrorSystemParams")
        .def(py::init<>())
        .def(py::init([](double a, double c, double d_max, double k_nu, std::optional<double> eps) {
                 ErrorSystemParams p;
                 p.a = a;
                 p.c = c;
                 p.d_max = d_max;
                 p.k_nu = k_nu;
                 p.epsilon = eps;
                 return p;
             }),
             py::arg("a"), py::arg("c"), py::arg("d_max") = 0.0, py::arg("k_nu") = 0.0,
             py::arg("epsilon") = py::none())
        .def_readwrite("a", &ErrorSystemParams::a)
        .def_readwrite("c", &ErrorSystemParams::c)
        .def_readwrite("d_max", &ErrorSystemParams::d_max)
        .def_readwrite("k_nu", &ErrorSystemParams::k_nu)
        .def_readwrite("epsilon", &ErrorSystemParams::epsilon)
        .def_readwrite("a_lower", &ErrorSystemParams::a_lower)
        .def_readwrite("a_upper", &ErrorSystemParams::a_upper);

    py::class_<RazumikhinWitness>(m, "RazumikhinWitness")
        .def(py::init([](double lambda, double big_m, double r, double lambda2) {
                 return RazumikhinWitness{lambda, big_m, r, lambda2};
             }),
             py::arg("lam"), py::arg("M"), py::arg("r"), py::arg("lambda2"))
        .def_readonly("lam", &RazumikhinWitness::lambda)
        .def_readonly("M", &RazumikhinWitness::big_m)
        .def_readonly("r", &RazumikhinWitness::r)
        .def_readonly("lambda2", &RazumikhinWitness::lambda2);

    py::class_<FeasibilityReport>(m, "FeasibilityReport")
        .def_readonly("feasible", &FeasibilityReport::feasible)
        .def_readonly("margin_I", &FeasibilityReport::margin_I)
        .def_readonly("margin_II", &FeasibilityReport::margin_II);
    m.def("check_conditions", &check_conditions, py::arg("witness"), py::arg("tau"), py::arg("a"),
          py::arg("d_max"));

    py::class_<MatiCertificate>(m, "MatiCertificate")
        .def_readonly("tau", &MatiCertificate::tau)
        .def_readonly("epsilon", &MatiCertificate::epsilon)
        .def_readonly("witness", &MatiCertificate::witness)
        .def_readonly("gamma_h", &MatiCertificate::gamma_h)
        .def_readonly("gamma_w", &MatiCertificate::gamma_w)
        .def_readonly("bias", &MatiCertificate::bias)
        .def_readonly("k_w", &MatiCertificate::k_w)
        .def_readonly("small_gain_bound", &MatiCertificate::small_gain_bound)
        .def_readonly("margin_I", &MatiCertificate::margin_I)
        .def_readonly("margin_II", &MatiCertificate::margin_II)
        .def("to_json", &MatiCertificate::to_json)
        .def_static("from_json", &MatiCertificate::from_json);

    m.def(
        "certify",
        [](const ErrorSystemParams& p, double gamma_h, CertMode mode, std::optional<double> gamma_d,
           std::optional<double> gamma_des) { return certify(p, gamma_h, mode, gamma_d, gamma_des); },
        py::arg("params"), py::arg("gamma_h"), py::arg("mode") = CertMode::LpStable,
        py::arg("gamma_d") = py::none(), py::arg("gamma_des") = py::none());

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("growth_l", &Scenario::growth_l)
        .def_readonly("protocol", &Scenario::protocol)
        .def("gamma_h", &Scenario::gamma_h)
        .def("error_params", &Scenario::error_params);

    m.def(
        "build_scenario",
        [](const std::string& name, double d, double d_rate, ProtocolKind p, EstimatorKind e,
           const std::string& gain_set) {
            ExampleOptions opt;
            opt.gain_set = gain_set == "figure" ? GainSet::Figure : GainSet::Lmi;
            return build_scenario(name, d, d_rate, p, e, opt);
        },
        py::arg("name"), py::arg("d") = 0.0, py::arg("d_rate") = 0.0,
        py::arg("protocol") = ProtocolKind::TryOnceDiscard, py::arg("estimator") = EstimatorKind::Zoh,
        py::arg("gain_set") = "lmi");

    m.def(
        "sweep_csv",
        [](const std::string& name, const std::vector<double>& grid, ProtocolKind p, EstimatorKind e,
           CertMode mode, double d_rate, const std::string& gain_set) {
            ExampleOptions opt;
            opt.gain_set = gain_set == "figure" ? GainSet::Figure : GainSet::Lmi;
            py::gil_scoped_release release;
            return sweep_csv(sweep(scenario_sweep(name, d_rate, p, e, mode, opt), grid, p, e, mode));
        },
        py::arg("name"), py::arg("grid"), py::arg("protocol") = ProtocolKind::TryOnceDiscard,
        py::arg("estimator") = EstimatorKind::Zoh, py::arg("mode") = CertMode::LpStable,
        py::arg("d_rate") = 0.0, py::arg("gain_set") = "lmi");

    m.def(
        "simulate",
        [](const Scenario& sc, double tau, double horizon, std::uint64_t seed, std::vector<double> x0) {
            SimConfig cfg;
            cfg.tau = tau;
            cfg.horizon = horizon;
            cfg.seed = seed;
            if (!x0.empty()) {
                if (static_cast<int>(x0.size()) != sc.state_dim + sc.error_dim)
                    throw std::invalid_argument("initial state has wrong size");
                Vec z = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
                cfg.initial = constant_history(z);
            }
            SimTrace tr = integrate(sc, cfg);
            return trace_dict(tr);
        },
        py::arg("scenario"), py::arg("tau"), py::arg("horizon"), py::arg("seed") = 1,
        py::arg("initial") = std::vector<double>{});

    m.def(
        "verify_ugas",
        [](const Scenario& sc, double tau, int trials, double horizon, std::uint64_t seed) {
            UgasConfig uc;
            uc.trials = trials;
            uc.horizon = horizon;
            uc.seed = seed;
            uc.check_growth = true;
            UgasReport r;
            {
                py::gil_scoped_release release;
                r = verify_ugas(sc, tau, uc);
            }
            py::dict d;
            d["trials"] = r.trials;
            d["converged"] = r.converged;
            d["diverged"] = r.diverged;
            d["worst_ratio"] = r.worst_ratio;
            d["max_growth_violation"] = r.max_growth_violation;
            return d;
        },
        py::arg("scenario"), py::arg("tau"), py::arg("trials") = 10, py::arg("horizon") = 10.0,
        py::arg("seed") = 1);

    m.def(
        "estimate_l2_gain",
        [](const std::string& problem, bool delayed, double tol) {
            LmiProblem p;
            if (problem == "tod") p = example1_lmi(Example1Output::Tod, delayed);
            else if (problem == "rr") p = example1_lmi(Example1Output::Rr, delayed);
            else if (problem == "detect") p = example1_lmi(Example1Output::Detectability, delayed);
            else if (problem == "scalar") p = scalar_sanity_lmi();
            else throw std::invalid_argument("unknown problem: " + problem);
            GainEstimate g;
            {
                py::gil_scoped_release release;
                g = estimate_l2_gain(p, tol);
            }
            py::dict d;
            d["gamma_h"] = g.gamma_h;
            d["margin"] = g.margin;
            d["C"] = Eigen::Matrix2d(g.c_mat);
            d["E"] = Eigen::Matrix2d(g.e_mat);
            return d;
        },
        py::arg("problem"), py::arg("delayed") = true, py::arg("tol") = 1e-3);
}
