#pragma once

#include <optional>

#include "regime_sde/quadrature.hpp"
#include "regime_sde/time_function.hpp"
#include "regime_sde/transform.hpp"

namespace rsde {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

/// B(t) = ∫_{t0}^t β and A(t) = ∫_{t0}^t α² for one regime. Exact when the
/// integrand is constant or has a closed-form antiderivative, adaptive
/// quadrature otherwise.
class RegimeIntegrals {
public:
    RegimeIntegrals(TimeFunction alpha, TimeFunction beta, double t0, QuadratureOptions quad = {});

    double drift(double t) const;
    double variance(double t) const;
    bool exact() const noexcept { return drift_.exact() && variance_.exact(); }

    const TimeFunction& alpha() const noexcept { return alpha_; }
    const TimeFunction& beta() const noexcept { return beta_; }
    const TimeFunction& alpha_sq() const noexcept { return alpha_sq_; }
    double t0() const noexcept { return t0_; }

private:
    class Integral {
    public:
        Integral(const TimeFunction& f, double t0, QuadratureOptions quad);
        double operator()(double t) const;
        bool exact() const noexcept { return constant_.has_value() || anti_.has_value(); }

    private:
        TimeFunction f_;
        double t0_;
        QuadratureOptions quad_;
        std::optional<double> constant_;
        std::optional<TimeFunction> anti_;
        double anti_t0_ = 0.0;
    };

    TimeFunction alpha_;
    TimeFunction beta_;
    TimeFunction alpha_sq_;
    double t0_;
    Integral drift_;
    Integral variance_;
};

struct SlopeSign {
    int sign = 0;  // sign of φ'(t)
    double g = 0.0;
};

/// Law of Y_t = ξ_{t0} + ∫_{t0}^t α dB + ∫_{t0}^t β ds with
/// ξ_{t0} ~ N(μ̄₀ + μ̄_{t0}, σ̄₀² + σ̄²_{t0}), and φ(t) = P(Y_t ≤ ρ(t)).
class LawCurve {
public:
    LawCurve(double mu0, double sigma0_sq, double mu_offset, double var_offset, double t0, TimeFunction alpha,
             TimeFunction beta, ReferenceCurve rho, QuadratureOptions quad = {});

    /// (m(t), v(t)); throws RangeError for t < t0.
    MeanVar mean_var(double t) const;
    /// f(t) = (ρ(t) − m(t))/√v(t), so φ = Φ(f).
    double standardized(double t) const;
    double phi(double t) const;
    /// g(t) with sign(φ') = sign(g).
    SlopeSign phi_slope_sign(double t) const;

    double drift_integral(double t) const { return integrals_.drift(t); }
    double variance_integral(double t) const { return integrals_.variance(t); }

    /// Curve continuing from t1 with a new regime; offsets absorb the
    /// integrals accumulated on [t0, t1].
    LawCurve restart(double t1, TimeFunction alpha, TimeFunction beta) const;

    double mu0() const noexcept { return mu0_; }
    double sigma0_sq() const noexcept { return sigma0_sq_; }
    double mu_offset() const noexcept { return mu_offset_; }
    double var_offset() const noexcept { return var_offset_; }
    double t0() const noexcept { return integrals_.t0(); }
    const TimeFunction& alpha() const noexcept { return integrals_.alpha(); }
    const TimeFunction& beta() const noexcept { return integrals_.beta(); }
    const ReferenceCurve& rho() const noexcept { return rho_; }
    const RegimeIntegrals& integrals() const noexcept { return integrals_; }

private:
    double mu0_;
    double sigma0_sq_;
    double mu_offset_;
    double var_offset_;
    RegimeIntegrals integrals_;
    ReferenceCurve rho_;
    QuadratureOptions quad_;
};

}  // namespace rsde
