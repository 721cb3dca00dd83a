#include "regime_sde/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "regime_sde/errors.hpp"

namespace rsde {

namespace {

template <class F>
auto section(const char* name, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(name) + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(std::string(name) + ": " + e.what());
    }
}

}  // namespace

nlohmann::json to_json(const SolverOptions& o) {
    return {{"horizon", o.horizon},
            {"root_tol", o.root_tol},
            {"t_atom_rel", o.t_atom_rel},
            {"k_atom", o.k_atom},
            {"max_regimes", o.max_regimes},
            {"n_cap", o.n_cap},
            {"strict_margin", o.strict_margin},
            {"check_window", o.check_window},
            {"grid",
             {{"density", o.grid.density},
              {"dense_span", o.grid.dense_span},
              {"tail_points", o.grid.tail_points},
              {"max_dense_points", o.grid.max_dense_points}}}};
}

nlohmann::json to_json(const SimulationOptions& o) {
    return {{"N", o.particles}, {"dt", o.dt}, {"T", o.T}, {"seed", o.seed}, {"output_points", o.output_points}};
}

SolverOptions solver_options_from_json(const nlohmann::json& j) {
    SolverOptions o;
    o.horizon = j.value("horizon", o.horizon);
    o.root_tol = j.value("root_tol", o.root_tol);
    o.t_atom_rel = j.value("t_atom_rel", o.t_atom_rel);
    o.k_atom = j.value("k_atom", o.k_atom);
    o.max_regimes = j.value("max_regimes", o.max_regimes);
    o.n_cap = j.value("n_cap", o.n_cap);
    o.strict_margin = j.value("strict_margin", o.strict_margin);
    o.check_window = j.value("check_window", o.check_window);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        o.grid.density = g.value("density", o.grid.density);
        o.grid.dense_span = g.value("dense_span", o.grid.dense_span);
        o.grid.tail_points = g.value("tail_points", o.grid.tail_points);
        o.grid.max_dense_points = g.value("max_dense_points", o.grid.max_dense_points);
    }
    if (!(o.horizon > 0.0) || !(o.root_tol > 0.0)) throw ParseError("horizon and root_tol must be positive");
    return o;
}

SimulationOptions simulation_options_from_json(const nlohmann::json& j) {
    SimulationOptions o;
    o.particles = j.value("N", j.value("particles", o.particles));
    o.dt = j.value("dt", o.dt);
    o.T = j.value("T", o.T);
    o.seed = j.value("seed", o.seed);
    o.output_points = j.value("output_points", o.output_points);
    if (!(o.dt > 0.0) || !(o.T >= 0.0) || o.particles == 0) throw ParseError("need N > 0, dt > 0 and T >= 0");
    return o;
}

ProblemFile parse_problem(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("problem file must be a JSON object");
    auto coeffs = section("coefficients", [&] { return CoefficientSet::from_json(j.at("coefficients")); });
    const auto law = section("initial_law", [&] {
        const auto& l = j.at("initial_law");
        return std::pair{l.at("mu0_bar").get<double>(), l.at("sigma0_sq").get<double>()};
    });
    auto r = section("reference", [&] {
        const auto& ref = j.at("reference");
        return TimeFunction::from_json(ref.is_object() && ref.contains("r") ? ref.at("r") : ref);
    });
    auto levels = section("levels", [&] { return LevelSet::from_json(j.at("levels")); });
    ProblemFile f{ProblemSpec{j.value("name", std::string("problem")), std::move(coeffs), law.first, law.second,
                              std::move(r), std::move(levels)},
                  std::nullopt};
    auto& s = f.spec;
    if (j.contains("solver")) s.solver = section("solver", [&] { return solver_options_from_json(j.at("solver")); });
    if (j.contains("simulation")) {
        s.simulation = section("simulation", [&] { return simulation_options_from_json(j.at("simulation")); });
    }
    if (j.contains("level_problem")) {
        f.level_problem = section("level_problem", [&] { return LevelProblem::from_json(j.at("level_problem")); });
    }
    s.validate();
    return f;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return parse_problem(j);
}

nlohmann::json problem_to_json(const ProblemSpec& spec, const std::optional<LevelProblem>& level_problem) {
    nlohmann::json j = {{"name", spec.name},
                        {"coefficients", spec.coeffs.to_json()},
                        {"initial_law", {{"mu0_bar", spec.mu0}, {"sigma0_sq", spec.sigma0_sq}}},
                        {"reference", {{"r", spec.r.to_json()}}},
                        {"levels", spec.levels.to_json()},
                        {"solver", to_json(spec.solver)},
                        {"simulation", to_json(spec.simulation)}};
    if (level_problem) j["level_problem"] = level_problem->to_json();
    return j;
}

void save_problem(const std::string& path, const ProblemSpec& spec, const std::optional<LevelProblem>& level_problem) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << problem_to_json(spec, level_problem).dump(2) << '\n';
}

}  // namespace rsde
