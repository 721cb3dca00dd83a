#pragma once

#include <limits>
#include <optional>
#include <string>

#include "regime_sde/coefficients.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/time_function.hpp"

namespace rsde {

/// U_t = (lower(t), ∞).
struct DomainBound {
    double lower = -std::numeric_limits<double>::infinity();
    bool contains(double x) const noexcept { return x > lower; }
};

DomainBound domain_bound(const CoefficientSet& coeffs, double t);

/// F(t, x): x/σ₂ (additive) or log(σ₁x + σ₂)/σ₁ (multiplicative).
/// Throws DomainError for x ∉ U_t.
double forward(const CoefficientSet& coeffs, double t, double x);

/// G(t, y) = F(t, ·)⁻¹(y) ∈ U_t.
double inverse(const CoefficientSet& coeffs, double t, double y);

/// ρ(t) and ρ'(t) for the transformed reference level.
class ReferenceCurve {
public:
    explicit ReferenceCurve(TimeFunction rho);
    static ReferenceCurve constant(double value) { return ReferenceCurve(TimeFunction::constant(value)); }

    double operator()(double t) const { return rho_(t); }
    double derivative(double t) const { return rho_prime_(t); }
    bool is_constant() const noexcept { return !rho_.depends_on_time(); }
    const TimeFunction& expression() const noexcept { return rho_; }

private:
    TimeFunction rho_;
    TimeFunction rho_prime_;
};

struct ReferenceReport {
    ReferenceCurve rho;
    bool nondecreasing = true;
    /// First grid time where ρ' < 0 (only meaningful when !nondecreasing).
    double decrease_at = 0.0;
    double min_slope = 0.0;
    double sup_rho = -std::numeric_limits<double>::infinity();
    double sup_rho_at = 0.0;
    /// Set when μ̄₀ was supplied: whether sup ρ ≤ μ̄₀ on the grid.
    std::optional<bool> below_mu0;
    std::size_t grid_points = 0;

    bool ok() const noexcept { return nondecreasing && below_mu0.value_or(true); }
    std::string summary() const;
};

/// ρ(t) = F(t, r(t)) with the chain-rule derivative, checked on the grid of
/// [0, T]. Throws DomainError at the first grid time with r(t) ∉ U_t.
ReferenceReport transform_reference(const CoefficientSet& coeffs, const TimeFunction& r, double T,
                                    std::optional<double> mu0 = std::nullopt, const GridPolicy& policy = {});

/// ρ as an expression, no checks.
TimeFunction reference_expression(const CoefficientSet& coeffs, const TimeFunction& r);

}  // namespace rsde
