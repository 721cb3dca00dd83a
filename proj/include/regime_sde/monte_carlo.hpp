#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "regime_sde/problem.hpp"
#include "regime_sde/regime_solver.hpp"

namespace rsde {

enum class Coordinates { Transformed, Original };

std::string to_string(Coordinates c);

/// States of N paths on a time grid. states[i][p] is path p at times[i].
struct PathBatch {
    Coordinates coords = Coordinates::Transformed;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::uint64_t seed = 0;
    std::uint32_t stream = 0;
    bool valid = true;
    std::string invalid_reason;

    std::size_t count() const noexcept { return states.empty() ? 0 : states.front().size(); }
    /// Index of t in the grid; RangeError when t is not a grid time.
    std::size_t time_index(double t) const;
    /// t, path_0, path_1, ... for at most max_paths paths.
    void write_paths_csv(std::ostream& os, std::size_t max_paths = 100) const;
};

struct EmpiricalCurve {
    std::vector<double> times;
    std::vector<double> phi_hat;
    std::vector<std::size_t> regime;
    std::vector<double> mean_hat;
    std::vector<double> var_hat;

    /// t, phi_hat, regime, mean_hat, var_hat
    void write_csv(std::ostream& os) const;
};

/// Exact sampling of the transformed process along a schedule: Gaussian
/// increments with the schedule's drift and variance integrals. Throws
/// RangeError for times outside [0, span_end] or not increasing.
PathBatch simulate_exact(const Schedule& schedule, double mu0, double sigma0_sq, std::size_t n,
                         const std::vector<double>& times, std::uint64_t seed);

struct ParticleOptions {
    std::size_t particles = 10000;
    double dt = 1e-3;
    double T = 1.0;
    std::uint64_t seed = 20240521;
    Coordinates coords = Coordinates::Transformed;
    /// Original coordinates only: Euler–Maruyama on X itself instead of exact
    /// steps of Y mapped back through G. Can leave U_t.
    bool raw_euler = false;
    std::size_t output_points = 101;

    static ParticleOptions from(const SimulationOptions& sim, Coordinates coords = Coordinates::Transformed);
};

struct ParticleRun {
    EmpiricalCurve curve;  // every step
    PathBatch batch;       // output_points snapshots
};

/// Self-consistent particle system: each step takes φ̂ from the current
/// particles, picks n with φ̂ ∈ [y_{n−1}, y_n) and advances every particle in
/// regime n. Throws DomainExit when a raw Euler particle leaves U_t.
ParticleRun simulate_particles(const ProblemSpec& problem, const ParticleOptions& opts);

/// #{state ≤ threshold}/N at grid time t.
double empirical_phi(const PathBatch& batch, double t, double threshold);

/// Summary of a batch against a threshold curve in the batch coordinates.
EmpiricalCurve summarize(const PathBatch& batch, const std::function<double(double)>& threshold,
                         const LevelSet& levels, std::size_t max_regimes = 100000);

/// Elementwise G (to Original) or F (to Transformed). F throws DomainError
/// for states outside U_t.
PathBatch transform_batch(const CoefficientSet& coeffs, const PathBatch& batch, Coordinates target);

/// n with φ̂ ∈ [y_{n−1}, y_n), capped at max_regimes.
std::size_t regime_for(const LevelSet& levels, double phi_hat, std::size_t max_regimes = 100000);

/// OpenMP worker count, capped by REGIME_SDE_THREADS when set.
int worker_threads();

}  // namespace rsde
