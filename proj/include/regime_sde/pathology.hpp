#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regime_sde/coefficients.hpp"
#include "regime_sde/problem.hpp"
#include "regime_sde/regime_solver.hpp"

namespace rsde {

/// One level y with the transformed law restarted at t₀:
/// Y_{t₀} ~ N(μ̄₀ + μ̄_{t₀}, σ̄₀² + σ̄_{t₀}²), φ(t) = P(Y_t ≤ μ̄₀).
/// The low regime runs while φ < y, the high regime while φ ≥ y.
struct LevelProblem {
    double level = 0.5;
    double t0 = 0.0;
    double mu0 = 0.0;
    double mu_t0 = 0.0;
    double sigma0_sq = 1.0;
    double var_t0 = 0.0;
    TimeFunction alpha_low, beta_low, alpha_high, beta_high;
    double delta = 1.0;        // classification window [t₀, t₀ + δ]
    std::size_t grid = 257;
    double strict_margin = 1e-9;

    /// Base N(0, 1) at t₀ = 0 with the smallest σ̄_{t₀}² that keeps
    /// |μ̄_{t₀}| ≤ ½σ̄_{t₀}² while φ(t₀) = y. For y = ½ that is N(0, 1) itself.
    static LevelProblem with_level(double y, TimeFunction alpha_low, TimeFunction beta_low, TimeFunction alpha_high,
                                   TimeFunction beta_high);
    /// Level 1 of a problem whose initial law sits exactly on it
    /// (φ(0) = y₁ and constant ρ). Regimes 1 and 2 become low and high.
    static LevelProblem from_problem(const ProblemSpec& problem);

    /// φ(t₀) from the restart law.
    double phi0() const;
    /// Throws RangeError when φ(t₀) ≠ y or |μ̄_{t₀}| > ½σ̄_{t₀}².
    void validate() const;

    nlohmann::json to_json() const;
    static LevelProblem from_json(const nlohmann::json& j);
};

enum class VerdictKind { UniqueUp, UniqueDown, TwoSolutions, InfinitelyMany, NoLocalSolution, NotCoveredByPaper };

std::string to_string(VerdictKind v);

struct Verdict {
    VerdictKind kind = VerdictKind::NotCoveredByPaper;
    BandClass low;
    BandClass high;
    std::string detail;

    nlohmann::json to_json() const;
};

/// Pure function of the two band classes.
Verdict verdict_from(const BandClass& low, const BandClass& high);

Verdict classify_level(const LevelProblem& problem);

struct Branches {
    Schedule decreasing;  // low regime forever, φ < y after t₀
    Schedule increasing;  // high regime forever, φ ≥ y
    std::size_t probes = 0;
    bool verified = false;
    std::string detail;

    nlohmann::json to_json(std::size_t points = 64) const;
};

/// The two solutions of a TwoSolutions problem. Throws VerdictMismatch
/// otherwise.
Branches construct_branches(const LevelProblem& problem, std::size_t probes = 128);

/// Frozen on [t₀, t₀ + w], then the low regime. Throws VerdictMismatch
/// unless the problem is InfinitelyMany.
Schedule construct_delay_family(const LevelProblem& problem, double w);

struct OscillationReport {
    double dt = 0.0;
    std::size_t steps = 0;
    std::size_t particles = 0;
    std::size_t flips = 0;
    double max_excursion = 0.0;
    double mean_excursion = 0.0;
    std::vector<double> phi_hat;        // per step, including step 0
    std::vector<std::size_t> regime;    // 1 = low, 2 = high
    std::vector<std::size_t> flip_count;

    bool flips_ok() const noexcept { return flips * 10 >= steps; }
    /// step, phi_hat, regime, flip_count
    void write_csv(std::ostream& os) const;
    nlohmann::json to_json() const;
};

/// Self-consistent particle run of the level problem in transformed
/// coordinates, counting sign changes of φ̂ − y. Throws VerdictMismatch unless
/// the problem is NoLocalSolution.
OscillationReport oscillation_probe(const LevelProblem& problem, double dt, std::size_t steps, std::size_t particles,
                                    std::uint64_t seed);

struct OscillationComparison {
    OscillationReport coarse;
    OscillationReport fine;  // dt/2 over the same time span
    bool excursion_shrinks() const noexcept { return fine.mean_excursion <= coarse.mean_excursion; }
};

OscillationComparison oscillation_compare(const LevelProblem& problem, double dt, std::size_t steps,
                                          std::size_t particles, std::uint64_t seed);

namespace builtin {
/// α₁ = α₂ = 1, β₁ = ⅜, β₂ = −⅜ at y = ½.
LevelProblem two_solutions();
/// α₁ = α₂ = 1, β₁ = −⅜, β₂ = ⅜ at y = ½.
LevelProblem no_local_solution();
/// α₁ = 1, β₁ = ⅜, α₂ = β₂ = 0 at y = ½.
LevelProblem infinitely_many();
}  // namespace builtin

}  // namespace rsde
