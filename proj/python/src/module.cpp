#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "regime_sde/builtin.hpp"
#include "regime_sde/errors.hpp"
#include "regime_sde/monte_carlo.hpp"
#include "regime_sde/normal.hpp"
#include "regime_sde/pathology.hpp"
#include "regime_sde/problem_io.hpp"
#include "regime_sde/regime_solver.hpp"
#include "regime_sde/transform.hpp"

namespace py = pybind11;
using namespace rsde;

namespace {

ProblemSpec explosion_demo(bool finite, std::size_t count) {
    const auto times = finite ? builtin::finite_times(count) : builtin::global_times(count);
    return builtin::explosion(LevelSet::scores(builtin::explosion_scores(times)));
}

py::array_t<double> batch_array(const PathBatch& b) {
    py::array_t<double> out({b.times.size(), b.count()});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < b.times.size(); ++i) {
        for (std::size_t p = 0; p < b.count(); ++p) v(i, p) = b.states[i][p];
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Regime-switching SDEs driven by their own law";

    // translators run newest first, so the base class goes in first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("std_normal_cdf", &std_normal_cdf);
    m.def("std_normal_quantile", &std_normal_quantile);

    py::class_<ProblemSpec>(m, "Problem")
        .def_readwrite("name", &ProblemSpec::name)
        .def_readwrite("mu0", &ProblemSpec::mu0)
        .def_readwrite("sigma0_sq", &ProblemSpec::sigma0_sq)
        .def_property(
            "horizon", [](const ProblemSpec& p) { return p.solver.horizon; },
            [](ProblemSpec& p, double h) { p.solver.horizon = h; })
        .def("to_json", [](const ProblemSpec& p) { return problem_to_json(p).dump(); })
        .def_static("from_json",
                    [](const std::string& s) { return parse_problem(nlohmann::json::parse(s)).spec; })
        .def_static("load", [](const std::string& path) { return load_problem(path).spec; })
        .def("forward", [](const ProblemSpec& p, double t, double x) { return forward(p.coeffs, t, x); })
        .def("inverse", [](const ProblemSpec& p, double t, double y) { return inverse(p.coeffs, t, y); })
        .def("beta", [](const ProblemSpec& p, std::size_t n, double t) { return beta_n(p.coeffs, n, t); });

    m.def("gaussian", &builtin::gaussian);
    m.def("linear", &builtin::linear);
    m.def("logdrift", &builtin::logdrift);
    m.def("oscillation", &builtin::oscillation);
    m.def("explosion", &explosion_demo, py::arg("finite"), py::arg("count"));

    m.def("check_assumptions", [](const ProblemSpec& p) {
        py::list out;
        for (const auto& c : check_assumptions(p).checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    });

    py::class_<Schedule>(m, "Schedule")
        .def_property_readonly("breakpoints", &Schedule::breakpoints)
        .def_property_readonly("status", [](const Schedule& s) { return to_string(s.status); })
        .def_readonly("tmax_estimate", &Schedule::tmax_estimate)
        .def_readonly("start_index", &Schedule::start_index)
        .def_readonly("notes", &Schedule::notes)
        .def("phi", &Schedule::phi)
        .def("regime_at", &Schedule::regime_at)
        .def("mean_var",
             [](const Schedule& s, double t) {
                 const auto mv = s.mean_var(t);
                 return py::make_tuple(mv.mean, mv.var);
             })
        .def("to_json", [](const Schedule& s) { return s.to_json().dump(); });

    m.def("build_schedule", &build_schedule);

    m.def(
        "simulate_exact",
        [](const Schedule& s, const ProblemSpec& p, std::size_t n, const std::vector<double>& times,
           std::uint64_t seed) { return batch_array(simulate_exact(s, p.mu0, p.sigma0_sq, n, times, seed)); },
        py::arg("schedule"), py::arg("problem"), py::arg("n"), py::arg("times"), py::arg("seed") = 20240521);

    m.def(
        "simulate_particles",
        [](const ProblemSpec& p, std::size_t n, double dt, double T, std::uint64_t seed, bool original) {
            ParticleOptions o;
            o.particles = n;
            o.dt = dt;
            o.T = T;
            o.seed = seed;
            o.coords = original ? Coordinates::Original : Coordinates::Transformed;
            const auto run = simulate_particles(p, o);
            py::dict d;
            d["t"] = run.curve.times;
            d["phi_hat"] = run.curve.phi_hat;
            d["regime"] = run.curve.regime;
            d["mean_hat"] = run.curve.mean_hat;
            d["var_hat"] = run.curve.var_hat;
            return d;
        },
        py::arg("problem"), py::arg("n") = 10000, py::arg("dt") = 1e-3, py::arg("T") = 1.0,
        py::arg("seed") = 20240521, py::arg("original") = false);

    py::class_<LevelProblem>(m, "LevelProblem")
        .def_readwrite("level", &LevelProblem::level)
        .def_readwrite("delta", &LevelProblem::delta)
        .def_static("from_problem", &LevelProblem::from_problem)
        .def_static("constant",
                    [](double y, double a_low, double b_low, double a_high, double b_high) {
                        const auto C = [](double v) { return TimeFunction::constant(v); };
                        return LevelProblem::with_level(y, C(a_low), C(b_low), C(a_high), C(b_high));
                    })
        .def("to_json", [](const LevelProblem& p) { return p.to_json().dump(); });

    m.def("two_solutions", &builtin::two_solutions);
    m.def("no_local_solution", &builtin::no_local_solution);
    m.def("infinitely_many", &builtin::infinitely_many);
    m.def("classify_level", [](const LevelProblem& p) { return to_string(classify_level(p).kind); });
    m.def("branch_phi", [](const LevelProblem& p, double t) {
        const auto b = construct_branches(p);
        return py::make_tuple(b.decreasing.phi(t), b.increasing.phi(t));
    });
    m.def("delay_phi", [](const LevelProblem& p, double w, double t) { return construct_delay_family(p, w).phi(t); });
    m.def(
        "oscillation_flips",
        [](const LevelProblem& p, double dt, std::size_t steps, std::size_t n, std::uint64_t seed) {
            const auto r = oscillation_probe(p, dt, steps, n, seed);
            return py::make_tuple(r.flips, r.max_excursion, r.mean_excursion);
        },
        py::arg("problem"), py::arg("dt") = 1e-3, py::arg("steps") = 1000, py::arg("n") = 10000,
        py::arg("seed") = 20240521);
}
