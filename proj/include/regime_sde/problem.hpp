#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regime_sde/coefficients.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/time_function.hpp"

namespace rsde {

/// A switching level y_n carried both as a probability and as its normal
/// score z_n = Φ⁻¹(y_n). Levels very close to 1 round to 1.0 in double; the
/// score keeps them distinct, and the solver works with scores.
struct Level {
    double prob = 0.5;
    double score = 0.0;

    static Level from_prob(double p);
    static Level from_score(double z);
};

/// 0 = y₀ < y₁ < y₂ < ... given as a finite list or as an expression in n.
class LevelSet {
public:
    static LevelSet probabilities(const std::vector<double>& ys);
    static LevelSet scores(const std::vector<double>& zs);
    /// y_n = expr(n), probabilities.
    static LevelSet probability_expression(TimeFunction expr);
    /// z_n = expr(n), normal scores.
    static LevelSet score_expression(TimeFunction expr);

    /// Level n >= 1; nullopt past the end of a finite list.
    std::optional<Level> at(std::size_t n) const;
    std::optional<std::size_t> size() const;
    bool is_expression() const noexcept { return expr_.has_value(); }

    nlohmann::json to_json() const;
    static LevelSet from_json(const nlohmann::json& j);

private:
    std::vector<Level> list_;
    std::optional<TimeFunction> expr_;
    bool expr_is_score_ = false;
};

struct SolverOptions {
    double horizon = 1e6;
    double root_tol = 1e-12;        // |f(t*) − z| in score space
    double t_atom_rel = 1e-10;      // gap threshold, relative to max(1, T_n)
    std::size_t k_atom = 8;         // consecutive tiny gaps that declare an accumulation point
    std::size_t max_regimes = 100000;
    std::size_t n_cap = 64;         // regimes sampled by family-wide checks
    double strict_margin = 1e-9;
    double check_window = 64.0;     // window for band checks of each regime
    GridPolicy grid{};
    /// Test only: skip the start re-indexing so its effect can be compared.
    bool reindex = true;
};

struct SimulationOptions {
    std::size_t particles = 10000;
    double dt = 1e-3;
    double T = 1.0;
    std::uint64_t seed = 20240521;
    std::size_t output_points = 101;
};

/// Everything needed to pose the regime-switching problem.
struct ProblemSpec {
    std::string name;
    CoefficientSet coeffs;
    double mu0 = 0.0;       // μ̄₀
    double sigma0_sq = 1.0; // σ̄₀²
    TimeFunction r;         // reference level in original coordinates
    LevelSet levels;
    SolverOptions solver{};
    SimulationOptions simulation{};

    /// Throws ParseError for structurally invalid data (σ̄₀² <= 0, levels not
    /// increasing). The |μ̄₀| <= ½σ̄₀² condition is an assumption, reported by
    /// check_assumptions rather than rejected here.
    void validate() const;
};

}  // namespace rsde
