#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spikesolve/certificate.hpp"
#include "spikesolve/error_analysis.hpp"
#include "spikesolve/errors.hpp"
#include "spikesolve/instances.hpp"
#include "spikesolve/io.hpp"
#include "spikesolve/noise.hpp"
#include "spikesolve/solvers.hpp"
#include "spikesolve/suites.hpp"

namespace py = pybind11;
using namespace spikesolve;

namespace {

DiscreteMeasure measure_from_arrays(py::array_t<double> pos, py::array_t<complex> amp) {
    auto p = pos.unchecked<1>();
    auto a = amp.unchecked<1>();
    if (p.shape(0) != a.shape(0)) throw ParameterError("positions and amplitudes differ in length");
    std::vector<Spike> s;
    for (py::ssize_t j = 0; j < p.shape(0); ++j) s.push_back({TorusPoint(p(j)), a(j)});
    return DiscreteMeasure(std::move(s));
}

py::array_t<double> positions(const DiscreteMeasure& mu) {
    py::array_t<double> out(static_cast<py::ssize_t>(mu.size()));
    auto o = out.mutable_unchecked<1>();
    for (std::size_t j = 0; j < mu.size(); ++j) o(static_cast<py::ssize_t>(j)) = mu.spikes()[j].position.value();
    return out;
}

py::array_t<complex> amplitudes(const DiscreteMeasure& mu) {
    py::array_t<complex> out(static_cast<py::ssize_t>(mu.size()));
    auto o = out.mutable_unchecked<1>();
    for (std::size_t j = 0; j < mu.size(); ++j) o(static_cast<py::ssize_t>(j)) = mu.spikes()[j].amplitude;
    return out;
}

std::vector<TorusPoint> points(py::array_t<double> pos) {
    auto p = pos.unchecked<1>();
    std::vector<TorusPoint> out;
    for (py::ssize_t j = 0; j < p.shape(0); ++j) out.emplace_back(p(j));
    return out;
}

TrigPoly poly_from_array(py::array_t<complex> c) {
    auto v = c.unchecked<1>();
    if (v.shape(0) % 2 == 0) throw ParameterError("coefficient array needs odd length 2M+1");
    std::vector<complex> coeffs(v.data(0), v.data(0) + v.shape(0));
    return TrigPoly(static_cast<int>((v.shape(0) - 1) / 2), std::move(coeffs));
}

py::array_t<complex> poly_to_array(const TrigPoly& p) {
    const auto c = p.coeffs();
    return py::array_t<complex>({static_cast<py::ssize_t>(c.size())},
                                {static_cast<py::ssize_t>(sizeof(complex))}, c.data());
}

Observation observation(py::array_t<complex> y) { return {poly_from_array(std::move(y))}; }

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sparse spike recovery on the torus from low-frequency Fourier data";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<DiscreteMeasure>(m, "Measure")
        .def(py::init(&measure_from_arrays), py::arg("positions"), py::arg("amplitudes"))
        .def(py::init<>())
        .def_property_readonly("positions", &positions)
        .def_property_readonly("amplitudes", &amplitudes)
        .def("canonical", [](const DiscreteMeasure& mu) { return mu.canonical(); })
        .def("total_variation", [](const DiscreteMeasure& mu) { return total_variation(mu); })
        .def("to_json", [](const DiscreteMeasure& mu) { return to_py(to_json(mu)); })
        .def("__len__", &DiscreteMeasure::size)
        .def("__sub__", [](const DiscreteMeasure& a, const DiscreteMeasure& b) { return difference(a, b); })
        .def("__repr__", [](const DiscreteMeasure& mu) {
            return "<Measure with " + std::to_string(mu.size()) + " spikes>";
        });

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("grid_factor", &SolverConfig::grid_factor)
        .def_readwrite("max_iterations", &SolverConfig::max_iterations)
        .def_readwrite("gap_tolerance", &SolverConfig::gap_tolerance)
        .def_readwrite("refine_positions", &SolverConfig::refine_positions)
        .def_readwrite("merge_tolerance", &SolverConfig::merge_tolerance)
        .def_readwrite("restrict_to_grid", &SolverConfig::restrict_to_grid);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("measure", &SolveResult::measure)
        .def_readonly("residual_l2", &SolveResult::residual_l2)
        .def_readonly("duality_gap", &SolveResult::duality_gap)
        .def_readonly("objective", &SolveResult::objective)
        .def_readonly("tau", &SolveResult::tau)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("objective_trace", &SolveResult::objective_trace)
        .def_readonly("converged", &SolveResult::converged)
        .def_readonly("status", &SolveResult::status)
        .def_readonly("path_solves", &SolveResult::path_solves);

    m.def("project", [](const DiscreteMeasure& mu, int M) { return poly_to_array(project(mu, M)); },
          py::arg("measure"), py::arg("M"), "Coefficients of P_M mu for m = -M..M.");
    m.def("evaluate", [](py::array_t<complex> c, double x) { return poly_from_array(std::move(c))(x); },
          py::arg("coeffs"), py::arg("x"));

    m.def("random_measure",
          [](int J, int M, double margin, std::uint64_t seed, const std::string& law) {
              return random_separated_measure(J, M, margin, seed, amplitude_law_from_string(law));
          },
          py::arg("J"), py::arg("M"), py::arg("margin") = 1.0, py::arg("seed") = 0,
          py::arg("law") = "unit-phase");

    m.def("observe",
          [](const DiscreteMeasure& mu0, int M, const std::string& kind, double sigma, double gamma,
             double epsilon, std::uint64_t seed) {
              NoiseSpec spec;
              spec.kind = noise_kind_from_string(kind);
              spec.sigma = sigma;
              spec.gamma = gamma;
              spec.epsilon = epsilon;
              spec.seed = seed;
              const auto b = make_observation(mu0, M, spec);
              return py::make_tuple(poly_to_array(b.observation.y), b.epsilon);
          },
          py::arg("measure"), py::arg("M"), py::arg("kind") = "gaussian", py::arg("sigma") = 0.0,
          py::arg("gamma") = 0.1, py::arg("epsilon") = 0.0, py::arg("seed") = 0,
          "Returns (coefficients of y, epsilon).");

    m.def("epsilon_from_gaussian", &epsilon_from_gaussian, py::arg("M"), py::arg("sigma"), py::arg("gamma"));

    m.def("solve_tikhonov",
          [](py::array_t<complex> y, double tau, const SolverConfig& cfg) {
              return solve_tikhonov(observation(std::move(y)), tau, cfg);
          },
          py::arg("y"), py::arg("tau"), py::arg("config") = SolverConfig{});
    m.def("solve_constrained",
          [](py::array_t<complex> y, double delta, const SolverConfig& cfg) {
              return solve_constrained(observation(std::move(y)), delta, cfg);
          },
          py::arg("y"), py::arg("delta"), py::arg("config") = SolverConfig{});
    m.def("solve_noiseless",
          [](py::array_t<complex> y, const SolverConfig& cfg) {
              return solve_noiseless(observation(std::move(y)), cfg);
          },
          py::arg("y"), py::arg("config") = SolverConfig{});
    m.def("duality_gap",
          [](py::array_t<complex> y, double tau, const DiscreteMeasure& mu) {
              return duality_gap(observation(std::move(y)), tau, mu);
          },
          py::arg("y"), py::arg("tau"), py::arg("measure"));
    m.def("is_approximation",
          [](const DiscreteMeasure& mu, const DiscreteMeasure& mu0, int M, double eps) {
              return to_py(to_json(is_approximation(mu, mu0, M, eps)));
          },
          py::arg("measure"), py::arg("truth"), py::arg("M"), py::arg("epsilon"));

    m.def("certificate",
          [](py::array_t<double> support, py::array_t<complex> a, py::array_t<complex> b, int M) {
              const auto mu = measure_from_arrays(support, a);
              const auto pts = mu.support();
              Eigen::VectorXcd av(static_cast<Eigen::Index>(pts.size()));
              Eigen::VectorXcd bv(av.size());
              auto bb = b.unchecked<1>();
              if (bb.shape(0) != av.size()) throw ParameterError("derivative data length mismatch");
              for (Eigen::Index j = 0; j < av.size(); ++j) {
                  av(j) = mu.spikes()[static_cast<std::size_t>(j)].amplitude;
                  bv(j) = bb(j);
              }
              CoefficientSolution diag;
              const Certificate f = make_certificate(pts, av, bv, M, &diag);
              return py::make_tuple(poly_to_array(f.spectral_form()), diag.residual);
          },
          py::arg("support"), py::arg("values"), py::arg("derivatives"), py::arg("M"),
          "Returns (coefficients of f, block residual).");

    m.def("far_mass",
          [](const DiscreteMeasure& nu, py::array_t<double> support, int M) {
              return far_mass(nu, neighborhoods(points(std::move(support)), M));
          },
          py::arg("nu"), py::arg("support"), py::arg("M"));
    m.def("near_second_moment",
          [](const DiscreteMeasure& nu, py::array_t<double> support, int M) {
              return near_second_moment(nu, neighborhoods(points(std::move(support)), M));
          },
          py::arg("nu"), py::arg("support"), py::arg("M"));
    m.def("smoothed_error",
          [](const DiscreteMeasure& mu, const DiscreteMeasure& mu0, int M, const std::string& family, int N,
             double L) {
              const Kernel K = make_kernel(kernel_family_from_string(family), N, L);
              return smoothed_error(K, mu, mu0, smoothed_error_grid(K, M)).estimate;
          },
          py::arg("measure"), py::arg("truth"), py::arg("M"), py::arg("kernel") = "fejer", py::arg("N"),
          py::arg("L") = 4.0);
    m.def("smoothed_error_bound",
          [](int M, double eps, const std::string& family, int N, double L, double C) {
              return smoothed_error_bound(make_kernel(kernel_family_from_string(family), N, L), M, eps, C);
          },
          py::arg("M"), py::arg("epsilon"), py::arg("kernel") = "fejer", py::arg("N"), py::arg("L") = 4.0,
          py::arg("C") = 1.0);

    m.def("suite_names", &suite_names);
    m.def("run_suite",
          [](const std::string& name, std::uint64_t seed, int trials) {
              SuiteOptions o;
              o.seed = seed;
              o.trials = trials;
              SuiteOutcome r;
              {
                  py::gil_scoped_release release;
                  r = run_suite(name, o);
              }
              return py::make_tuple(r.pass, r.summary);
          },
          py::arg("name"), py::arg("seed") = SuiteOptions{}.seed, py::arg("trials") = 0,
          "Returns (pass, one-line summary).");
}
