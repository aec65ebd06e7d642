#include <pybind11/eigen.h>
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "duet/correlators.hpp"
#include "duet/entanglement.hpp"
#include "duet/errors.hpp"
#include "duet/greens.hpp"
#include "duet/model.hpp"
#include "duet/oracle.hpp"
#include "duet/spectral.hpp"

namespace py = pybind11;
using namespace duet;

namespace {

py::dict as_dict(const StationaryValues& v) {
    py::dict d;
    d["qq_pp"] = v.qq_pp;
    d["qq_mm"] = v.qq_mm;
    d["qq_pm"] = v.qq_pm;
    if (v.has_momenta) {
        d["pp_pp"] = v.pp_pp;
        d["pp_mm"] = v.pp_mm;
        d["pp_pm"] = v.pp_pm;
    }
    return d;
}

// (q+, q-, p+, p-) covariance at each time, plus the recurrence flag
py::tuple oracle_covariances(const NormalModeBasis& basis, const BathSpec& b1, const BathSpec& b2,
                             const std::vector<double>& times, int n_modes, double omega_max) {
    const double W = basis.w_mean;
    const DiscretizedBath d1 = discretize(b1, n_modes, omega_max > 0.0 ? omega_max : default_omega_max(b1, W));
    const DiscretizedBath d2 = discretize(b2, n_modes, omega_max > 0.0 ? omega_max : default_omega_max(b2, W));
    const QuadraticForm H =
        build_hamiltonian(basis, discrete_counterterms(d1, d2, basis.psi_angle), d1, d2, basis.psi_angle);
    Propagator P(H, std::min(d1.recurrence_time(), d2.recurrence_time()));
    P.prepare(initial_state(basis, d1, d2, b1.temperature, b2.temperature));
    std::vector<Eigen::Matrix4d> out;
    bool recurrence = false;
    {
        py::gil_scoped_release nogil;
        for (double t : times) {
            out.push_back(P.system_covariance(t));
            recurrence = recurrence || P.beyond_recurrence(t);
        }
    }
    return py::make_tuple(out, recurrence);
}

}  // namespace

PYBIND11_MODULE(_duet, m) {
    m.doc() = "Two coupled oscillators between two thermal baths";

    py::register_exception<StabilityError>(m, "StabilityError", PyExc_ArithmeticError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::enum_<CutoffFamily>(m, "CutoffFamily")
        .value("SHARP", CutoffFamily::SharpCutoff)
        .value("DRUDE", CutoffFamily::Drude)
        .value("EXPONENTIAL", CutoffFamily::Exponential);

    py::class_<BathSpec>(m, "BathSpec")
        .def(py::init([](double gamma, double lambda_cut, double temperature, CutoffFamily family, bool strict) {
                 BathSpec b{gamma, lambda_cut, temperature, family, strict};
                 b.validate();
                 return b;
             }),
             py::arg("gamma"), py::arg("lambda_cut") = 100.0, py::arg("temperature") = 0.0,
             py::arg("family") = CutoffFamily::SharpCutoff, py::arg("strict_ohmic") = false)
        .def_static("strict", &BathSpec::strict, py::arg("gamma"), py::arg("temperature"),
                    py::arg("lambda_cut") = 1e4)
        .def_static("sharp", &BathSpec::sharp, py::arg("gamma"), py::arg("lambda_cut"), py::arg("temperature") = 0.0)
        .def_static("drude", &BathSpec::drude, py::arg("gamma"), py::arg("lambda_cut"), py::arg("temperature") = 0.0)
        .def_readwrite("gamma", &BathSpec::gamma)
        .def_readwrite("lambda_cut", &BathSpec::lambda_cut)
        .def_readwrite("temperature", &BathSpec::temperature)
        .def_readwrite("family", &BathSpec::family)
        .def_readwrite("strict_ohmic", &BathSpec::strict_ohmic)
        .def("__repr__", [](const BathSpec& b) {
            return "BathSpec(gamma=" + std::to_string(b.gamma) + ", lambda_cut=" + std::to_string(b.lambda_cut) +
                   ", temperature=" + std::to_string(b.temperature) + (b.strict_ohmic ? ", strict)" : ")");
        });

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double a, double b, double c, double theta) { return SystemParams{a, b, c, theta}; }),
             py::arg("omega_a") = 1.0, py::arg("omega_b") = 1.0, py::arg("omega_c") = 0.0, py::arg("theta") = 0.0)
        .def_readwrite("omega_a", &SystemParams::omega_a)
        .def_readwrite("omega_b", &SystemParams::omega_b)
        .def_readwrite("omega_c", &SystemParams::omega_c)
        .def_readwrite("theta", &SystemParams::theta);

    py::class_<NormalModeBasis>(m, "NormalModeBasis")
        .def_readonly("omega_plus", &NormalModeBasis::omega_plus)
        .def_readonly("omega_minus", &NormalModeBasis::omega_minus)
        .def_readonly("w_mean", &NormalModeBasis::w_mean)
        .def_readonly("detuning", &NormalModeBasis::detuning)
        .def_readonly("lambda_angle", &NormalModeBasis::lambda_angle)
        .def_readonly("psi_angle", &NormalModeBasis::psi_angle)
        .def_readonly("rotation", &NormalModeBasis::rotation);

    m.def("diagonalize", &diagonalize, py::arg("params"));
    m.def("renormalized_basis", &renormalized_basis, py::arg("w_mean"), py::arg("detuning"), py::arg("psi"));
    m.def("counterterm_shift", &counterterm_shift, py::arg("bath"));

    // spectral functions
    py::enum_<Branch>(m, "Branch").value("PLUS", Branch::Plus).value("MINUS", Branch::Minus);
    py::class_<WeakModes>(m, "WeakModes")
        .def_readonly("omega_plus", &WeakModes::omega_plus)
        .def_readonly("omega_minus", &WeakModes::omega_minus)
        .def_readonly("gamma_plus", &WeakModes::gamma_plus)
        .def_readonly("gamma_minus", &WeakModes::gamma_minus);
    m.def("weak_modes", &weak_modes, py::arg("W"), py::arg("delta"), py::arg("psi"), py::arg("gamma1"),
          py::arg("gamma2"));
    m.def("F", &F_function, py::arg("bath"), py::arg("W"), py::arg("tau"));
    m.def("H", &H_function, py::arg("bath"), py::arg("W"), py::arg("tau"));
    m.def("J", &J_function, py::arg("bath"), py::arg("a"), py::arg("b"), py::arg("modes"), py::arg("tau"),
          py::arg("m") = 0);
    m.def("H_zero_T_coincidence", &H_zero_T_coincidence, py::arg("gamma"), py::arg("W"), py::arg("lambda_cut"));

    // Green's functions
    py::enum_<GreensRegime>(m, "GreensRegime")
        .value("NUMERIC", GreensRegime::NumericBromwich)
        .value("STRONG_DELTA0", GreensRegime::StrongDelta0)
        .value("ONE_BATH", GreensRegime::OneBath)
        .value("WEAK", GreensRegime::WeakCoupling)
        .value("STRONG_DETUNED", GreensRegime::StrongDetunedPerturbative);
    py::class_<GreensKernel>(m, "GreensKernel")
        .def(py::init<GreensRegime, const NormalModeBasis&, const BathSpec&, const BathSpec&>(), py::arg("regime"),
             py::arg("basis"), py::arg("bath1"), py::arg("bath2"))
        .def("__call__",
             [](const GreensKernel& k, double t) {
                 const GreensPair g = k(t);
                 return py::make_tuple(g.g, g.gdot);
             },
             py::arg("t"))
        .def_property_readonly("regime", &GreensKernel::regime);

    // correlators
    m.def("stationary_strong",
          [](const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, double tau, bool momenta) {
              return as_dict(stationary_strong(nb, b1, b2, tau, momenta));
          },
          py::arg("basis"), py::arg("bath1"), py::arg("bath2"), py::arg("tau") = 0.0, py::arg("momenta") = false);
    m.def("stationary_weak",
          [](const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, double tau, bool momenta) {
              return as_dict(stationary_weak(nb, b1, b2, tau, momenta));
          },
          py::arg("basis"), py::arg("bath1"), py::arg("bath2"), py::arg("tau") = 0.0, py::arg("momenta") = false);
    m.def("stationary_numeric",
          [](const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, double tau, bool momenta) {
              const LaplaceMatrix mat(nb, b1, b2);
              py::gil_scoped_release nogil;
              const StationaryValues v = stationary_numeric(mat, tau, momenta);
              py::gil_scoped_acquire gil;
              return as_dict(v);
          },
          py::arg("basis"), py::arg("bath1"), py::arg("bath2"), py::arg("tau") = 0.0, py::arg("momenta") = false);
    m.def("effective_temperatures", &effective_temperatures, py::arg("psi"), py::arg("T1"), py::arg("T2"));
    m.def("high_t_strong",
          [](double W, double psi, double T1, double T2) {
              const Triple t = high_t_strong(W, psi, T1, T2);
              return py::make_tuple(t.pp, t.mm, t.pm);
          },
          py::arg("W"), py::arg("psi"), py::arg("T1"), py::arg("T2"));
    m.def("coherence_initial_strong",
          [](const GreensKernel& k, double t) { return coherence_initial_strong(k, t); }, py::arg("kernel"),
          py::arg("t"));
    m.def("coherence_initial_weak", &coherence_initial_weak, py::arg("W"), py::arg("delta"), py::arg("psi"),
          py::arg("gamma1"), py::arg("gamma2"), py::arg("t"));
    m.def("finite_band_total_coherence",
          [](double W, double psi, const BathSpec& b1, const BathSpec& b2, const std::vector<double>& times) {
              py::gil_scoped_release nogil;
              return finite_band_total_coherence(W, psi, b1, b2, times);
          },
          py::arg("W"), py::arg("psi"), py::arg("bath1"), py::arg("bath2"), py::arg("times"));

    // entanglement
    m.def("second_order_coherence",
          [](const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, double t, bool counterterm) {
              SecondOrderOptions opt;
              opt.include_counterterm = counterterm;
              return second_order_coherence(nb, b1, b2, t, opt);
          },
          py::arg("basis"), py::arg("bath1"), py::arg("bath2"), py::arg("t"), py::arg("include_counterterm") = false);
    m.def("second_order_series",
          [](const NormalModeBasis& nb, const BathSpec& b1, const BathSpec& b2, const std::vector<double>& times) {
              const PerturbativeCoherence p = second_order_series(nb, b1, b2, times);
              return py::make_tuple(p.values, p.growth_exponent, p.amplitude);
          },
          py::arg("basis"), py::arg("bath1"), py::arg("bath2"), py::arg("times"));
    m.def("log_negativity", py::overload_cast<const Eigen::Matrix4d&>(&log_negativity), py::arg("cov"));

    // finite-bath oracle
    py::class_<DiscretizedBath>(m, "DiscretizedBath")
        .def_readonly("frequencies", &DiscretizedBath::frequencies)
        .def_readonly("couplings", &DiscretizedBath::couplings)
        .def_readonly("spacing", &DiscretizedBath::spacing)
        .def("recurrence_time", &DiscretizedBath::recurrence_time)
        .def("static_susceptibility", &DiscretizedBath::static_susceptibility);
    m.def("discretize", &discretize, py::arg("bath"), py::arg("n_modes"), py::arg("omega_max"));
    m.def("default_omega_max", &default_omega_max, py::arg("bath"), py::arg("W"));
    m.def("oracle_covariances", &oracle_covariances, py::arg("basis"), py::arg("bath1"), py::arg("bath2"),
          py::arg("times"), py::arg("n_modes") = 400, py::arg("omega_max") = 0.0);
}
