#include "regime_sde/transform.hpp"

#include <cmath>
#include <sstream>

#include "regime_sde/errors.hpp"

namespace rsde {

DomainBound domain_bound(const CoefficientSet& coeffs, double t) {
    coeffs.require_mode(t);
    if (coeffs.mode() == DiffusionMode::Additive) return {};
    return {-coeffs.sigma2()(t) / coeffs.sigma1()(t)};
}

double forward(const CoefficientSet& coeffs, double t, double x) {
    coeffs.require_mode(t);
    const double s2 = coeffs.sigma2()(t);
    if (coeffs.mode() == DiffusionMode::Additive) return x / s2;
    const double s1 = coeffs.sigma1()(t);
    const double s = std::fma(s1, x, s2);
    if (!(s > 0.0)) {
        throw DomainError("forward: x = " + std::to_string(x) + " is outside U_t at t = " + std::to_string(t), t, x);
    }
    // Near s = 1 the log loses relative accuracy; use log1p of the offset.
    if (std::abs(s - 1.0) < 0.5) return std::log1p(std::fma(s1, x, s2 - 1.0)) / s1;
    return std::log(s) / s1;
}

double inverse(const CoefficientSet& coeffs, double t, double y) {
    coeffs.require_mode(t);
    const double s2 = coeffs.sigma2()(t);
    if (coeffs.mode() == DiffusionMode::Additive) return s2 * y;
    const double s1 = coeffs.sigma1()(t);
    const double u = s1 * y;
    if (std::abs(u) < 0.5) return (std::expm1(u) + (1.0 - s2)) / s1;
    return (std::exp(u) - s2) / s1;
}

ReferenceCurve::ReferenceCurve(TimeFunction rho) : rho_(std::move(rho)), rho_prime_(rho_.derivative()) {}

TimeFunction reference_expression(const CoefficientSet& coeffs, const TimeFunction& r) {
    if (coeffs.mode() == DiffusionMode::Additive) return r / coeffs.sigma2();
    return log(coeffs.sigma1() * r + coeffs.sigma2()) / coeffs.sigma1();
}

std::string ReferenceReport::summary() const {
    std::ostringstream os;
    os.precision(10);
    if (nondecreasing) {
        os << "rho non-decreasing on grid";
    } else {
        os << "rho decreasing at t=" << decrease_at << " (min slope " << min_slope << ")";
    }
    if (below_mu0) {
        os << "; sup rho = " << sup_rho << " at t=" << sup_rho_at << (*below_mu0 ? " <= mu0" : " > mu0 (VIOLATION)");
    }
    os << " [checked on " << grid_points << " grid points]";
    return os.str();
}

ReferenceReport transform_reference(const CoefficientSet& coeffs, const TimeFunction& r, double T,
                                    std::optional<double> mu0, const GridPolicy& policy) {
    ReferenceReport rep{ReferenceCurve(reference_expression(coeffs, r)), true, 0.0, 0.0,
                        -std::numeric_limits<double>::infinity(), 0.0, std::nullopt, 0};
    const auto grid = check_grid(0.0, T, policy);
    rep.grid_points = grid.size();
    rep.min_slope = std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const double rt = r(t);
        if (!domain_bound(coeffs, t).contains(rt)) {
            throw DomainError("r(t) = " + std::to_string(rt) + " is outside U_t at t = " + std::to_string(t), t, rt);
        }
        const double rho = forward(coeffs, t, rt);
        if (rho > rep.sup_rho) {
            rep.sup_rho = rho;
            rep.sup_rho_at = t;
        }
        const double slope = rep.rho.derivative(t);
        if (slope < rep.min_slope) rep.min_slope = slope;
        // Roundoff-level negative slopes of a constant ρ are not violations.
        if (slope < -1e-12 * std::max(1.0, std::abs(rho)) && rep.nondecreasing) {
            rep.nondecreasing = false;
            rep.decrease_at = t;
        }
    }
    if (mu0) rep.below_mu0 = rep.sup_rho <= *mu0 + 1e-12 * std::max(1.0, std::abs(*mu0));
    return rep;
}

}  // namespace rsde
