#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "regime_sde/pathology.hpp"
#include "regime_sde/problem.hpp"

namespace rsde {

/// A problem document: the regime-switching problem plus an optional single
/// level problem for classification.
struct ProblemFile {
    ProblemSpec spec;
    std::optional<LevelProblem> level_problem;
};

/// Throws ParseError naming the offending section.
ProblemFile parse_problem(const nlohmann::json& j);
ProblemFile load_problem(const std::string& path);

nlohmann::json problem_to_json(const ProblemSpec& spec, const std::optional<LevelProblem>& level_problem = {});
void save_problem(const std::string& path, const ProblemSpec& spec,
                  const std::optional<LevelProblem>& level_problem = {});

nlohmann::json to_json(const SolverOptions& o);
nlohmann::json to_json(const SimulationOptions& o);
SolverOptions solver_options_from_json(const nlohmann::json& j);
SimulationOptions simulation_options_from_json(const nlohmann::json& j);

}  // namespace rsde
