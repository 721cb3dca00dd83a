#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regime_sde/gaussian_law.hpp"
#include "regime_sde/problem.hpp"

namespace rsde {

enum class ScheduleStatus { GlobalProven, FiniteTmax, HorizonTruncated };

std::string to_string(ScheduleStatus s);

/// One regime interval [start, end) with the law that governs it.
struct Segment {
    std::size_t regime = 1;
    double start = 0.0;
    double end = std::numeric_limits<double>::infinity();
    /// Level whose crossing ends the segment; nullopt when none is left.
    std::optional<Level> target;
    LawCurve law;
};

/// Switch times T₀ < T₁ < ... with the per-interval regimes.
struct Schedule {
    std::vector<Segment> segments;
    ScheduleStatus status = ScheduleStatus::HorizonTruncated;
    std::optional<double> tmax_estimate;
    std::size_t start_index = 1;
    double horizon = 0.0;
    std::vector<std::string> notes;

    /// T₀ followed by every finite segment end.
    std::vector<double> breakpoints() const;
    /// Last time at which the schedule may be evaluated.
    double span_end() const;
    const Segment& segment_at(double t) const;

    MeanVar mean_var(double t) const { return segment_at(t).law.mean_var(t); }
    double standardized(double t) const { return segment_at(t).law.standardized(t); }
    double phi(double t) const { return segment_at(t).law.phi(t); }
    std::size_t regime_at(double t) const { return segment_at(t).regime; }

    nlohmann::json to_json() const;
    /// Columns t, phi, mean, var, regime; `points` samples per interval. The
    /// open last interval is sampled on [T, T + max(1, T)] capped at the horizon.
    void write_curve_csv(std::ostream& os, std::size_t points = 256) const;
};

/// inf{t ≥ start : f(t) = z} for the level's score z, searched up to
/// `horizon`. Returns start when φ(start) ≥ level already and nullopt when
/// the level is not reached. Throws MonotonicityError when g ≤ 0 at a probe
/// point between start and the crossing.
std::optional<double> find_crossing(const LawCurve& curve, const Level& level, double start, double horizon,
                                    double root_tol = 1e-12);

/// Constructive schedule of the existence proof (see README for the stop rules).
Schedule build_schedule(const ProblemSpec& problem);

/// Uniform bound over the whole family: sup_n sup_t α_n² (globality) or
/// inf_n inf_t α_n² (bijectivity), sampled on the check grid.
struct FamilyBound {
    bool holds = false;
    double value = 0.0;
    std::size_t worst_n = 1;
    double worst_t = 0.0;
    std::string detail;
    explicit operator bool() const noexcept { return holds; }
};

FamilyBound check_globality(const ProblemSpec& problem);
FamilyBound check_bijectivity(const ProblemSpec& problem, double floor = 1e-12);

/// T_n ≥ (2σ̄₀/C)Φ⁻¹(y_n) at every finite breakpoint.
struct LowerBoundReport {
    bool holds = true;
    double C = 0.0;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
};

LowerBoundReport check_lower_bound(const Schedule& schedule, double sigma0_sq, double C);

/// v(T_n) along the breakpoints and whether it grows without apparent bound.
struct VarianceDivergenceReport {
    std::vector<double> variances;
    bool increasing = true;
    /// Δv_n ≈ c·n^{−p}; p ≤ 1 means the partial sums diverge.
    double decay_exponent = 0.0;
    bool unbounded = false;
    std::string detail;
};

VarianceDivergenceReport variance_divergence_diagnostic(const Schedule& schedule);

/// Limit of an increasing sequence T₀ < T₁ < ... from a power-law or
/// geometric fit of its trailing gaps.
struct TailEstimate {
    bool finite = false;
    double estimate = std::numeric_limits<double>::infinity();
    std::string model;
    double parameter = 0.0;  // exponent p or ratio r
};

TailEstimate extrapolate_tmax(const std::vector<double>& T);

/// Per-probe consistency of a schedule with its level partition.
struct ScheduleCheck {
    std::size_t probes = 0;
    std::size_t indicator_violations = 0;  // φ ∉ [y_{n−1}, y_n) at a probe
    std::size_t monotonicity_violations = 0;
    double max_level_error = 0.0;  // max |φ(T_n) − y_n|
    double max_score_error = 0.0;  // max |f(T_n) − z_n|
    double first_violation_t = std::numeric_limits<double>::quiet_NaN();
    bool ok() const noexcept { return indicator_violations == 0 && monotonicity_violations == 0; }
};

ScheduleCheck verify_schedule(const Schedule& schedule, const LevelSet& levels, std::size_t probes_per_interval = 64);

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    std::vector<std::string> notes;
    bool all_passed() const;
    const AssumptionCheck* find(const std::string& name) const;
};

/// Checklist (As-σ), (As-b), (As-x0), (As-I), (As-r), (As-beta_n) plus
/// globality / bijectivity notes. Every "for all t" is checked on a grid.
AssumptionReport check_assumptions(const ProblemSpec& problem);

}  // namespace rsde
