#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "regime_sde/time_function.hpp"

namespace rsde {

enum class DiffusionMode {
    Additive,        // σ₁ ≡ 0, σ₂ > 0
    Multiplicative,  // σ₁ > 0
};

std::string to_string(DiffusionMode mode);

/// Regime volatility family n ↦ α_n, n = 1, 2, ...
///
/// Either an explicit finite list or a single expression in the free symbol n
/// (e.g. √(2n)). Asking a list for an index past its end throws
/// RegimeExhausted.
class AlphaFamily {
public:
    static AlphaFamily list(std::vector<TimeFunction> alphas);
    static AlphaFamily parametric(TimeFunction expression);

    /// α_n with n bound (n >= 1).
    TimeFunction at(std::size_t n) const;
    /// Number of regimes, or nullopt for a parametric (infinite) family.
    std::optional<std::size_t> size() const;
    bool is_parametric() const noexcept { return parametric_.has_value(); }
    const std::optional<TimeFunction>& expression() const noexcept { return parametric_; }
    const std::vector<TimeFunction>& entries() const noexcept { return list_; }

    nlohmann::json to_json() const;
    static AlphaFamily from_json(const nlohmann::json& j);

private:
    std::vector<TimeFunction> list_;
    std::optional<TimeFunction> parametric_;
};

/// σ(t, x) = σ₁(t)x + σ₂(t), the drift parameter (k or ℓ) and the family {α_n}.
///
/// Immutable; derivatives of σ₁, σ₂ and the expression for b(t, 1) are built
/// once at construction.
class CoefficientSet {
public:
    /// σ₁ ≡ 0, σ₂ > 0, b(t, x) = (σ₂'/σ₂)x + k(t).
    static CoefficientSet additive(TimeFunction sigma2, TimeFunction k, AlphaFamily alpha);
    /// σ₁ > 0, b(t, x) from the log formula with ℓ(t).
    static CoefficientSet multiplicative(TimeFunction sigma1, TimeFunction sigma2, TimeFunction ell,
                                         AlphaFamily alpha);

    DiffusionMode mode() const noexcept { return mode_; }
    const TimeFunction& sigma1() const noexcept { return sigma1_; }
    const TimeFunction& sigma2() const noexcept { return sigma2_; }
    const TimeFunction& sigma1_prime() const noexcept { return sigma1_prime_; }
    const TimeFunction& sigma2_prime() const noexcept { return sigma2_prime_; }
    const TimeFunction& drift_param() const noexcept { return drift_param_; }
    const AlphaFamily& alpha() const noexcept { return alpha_; }

    /// b(t, 1) as an expression; 1 ∈ U_t in both modes.
    const TimeFunction& drift_at_one() const noexcept { return drift_at_one_; }
    /// β_n as an expression in t (n bound).
    TimeFunction beta(std::size_t n) const;

    double diffusion(double t, double x) const { return sigma1_(t) * x + sigma2_(t); }

    /// Throws ModeError when the mode invariant fails at t.
    void require_mode(double t) const;

    nlohmann::json to_json() const;
    static CoefficientSet from_json(const nlohmann::json& j);

private:
    CoefficientSet(DiffusionMode mode, TimeFunction sigma1, TimeFunction sigma2, TimeFunction drift_param,
                   AlphaFamily alpha);

    DiffusionMode mode_;
    TimeFunction sigma1_;
    TimeFunction sigma2_;
    TimeFunction sigma1_prime_;
    TimeFunction sigma2_prime_;
    TimeFunction drift_param_;
    AlphaFamily alpha_;
    TimeFunction drift_at_one_;
};

/// b(t, x). Throws DomainError for x ∉ U_t and ModeError if the mode
/// invariant fails at t.
double eval_b(const CoefficientSet& coeffs, double t, double x);

/// β_n(t). Throws ModeError if the mode invariant fails at t.
double beta_n(const CoefficientSet& coeffs, std::size_t n, double t);

struct DriftGrid {
    double t0 = 0.0;
    double t1 = 2.0;
    std::size_t time_points = 257;
    std::size_t state_points = 64;
    double x_high = 10.0;
    double x_low_additive = -10.0;
    /// Multiplicative mode samples x from lower(t) + offset·max(1, |lower(t)|).
    double boundary_offset = 0.1;
};

struct DriftOdeReport {
    double max_residual = 0.0;
    double worst_t = 0.0;
    double worst_x = 0.0;
    std::size_t points = 0;
};

using DriftFunction = std::function<double(double t, double x)>;

/// Residual of σ₁b = ∂ₓb·(σ₁x + σ₂) − σ₁'x − σ₂' over the grid with ∂ₓb by
/// central differences.
DriftOdeReport check_drift_ode(const CoefficientSet& coeffs, const DriftGrid& grid = {});
/// Same check for an arbitrary drift, e.g. a perturbed one.
DriftOdeReport check_drift_ode(const CoefficientSet& coeffs, const DriftFunction& drift, const DriftGrid& grid = {});

enum class Band { Up, UpStrict, Down, DownStrict, Frozen, Unclassified };

std::string to_string(Band band);

/// Classification of a (α, β) pair against
///   Up:   −½α² ≤ β ≤ −¼α²
///   Down:  ¼α² ≤ β ≤  ½α²
///   Frozen: α ≡ β ≡ 0
/// on a grid. margin is the infimum slack of the satisfied strict side, or
/// (negative) the smallest violation when Unclassified.
struct BandClass {
    Band band = Band::Unclassified;
    double margin = 0.0;
    std::string detail;

    bool up() const noexcept { return band == Band::Up || band == Band::UpStrict; }
    bool down() const noexcept { return band == Band::Down || band == Band::DownStrict; }
    bool strict() const noexcept { return band == Band::UpStrict || band == Band::DownStrict; }
};

BandClass classify_band(const TimeFunction& alpha, const TimeFunction& beta, double t0, double t1,
                        std::size_t grid_size, double strict_margin = 1e-9);

BandClass classify_band(const CoefficientSet& coeffs, std::size_t n, double t0, double t1, std::size_t grid_size,
                        double strict_margin = 1e-9);

}  // namespace rsde
