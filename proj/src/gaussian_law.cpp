#include "regime_sde/gaussian_law.hpp"

#include <cmath>
#include <string>

#include "regime_sde/errors.hpp"
#include "regime_sde/normal.hpp"

namespace rsde {

RegimeIntegrals::Integral::Integral(const TimeFunction& f, double t0, QuadratureOptions quad)
    : f_(f), t0_(t0), quad_(quad) {
    if (f.depends_on_index()) throw ModeError("regime integrand must have its index bound");
    if (!f.depends_on_time()) {
        constant_ = *f.constant_value();
        return;
    }
    anti_ = f.antiderivative();
    if (anti_) anti_t0_ = (*anti_)(t0);
}

double RegimeIntegrals::Integral::operator()(double t) const {
    if (constant_) return *constant_ * (t - t0_);
    if (anti_) return (*anti_)(t) - anti_t0_;
    return integrate([this](double s) { return f_(s); }, t0_, t, quad_);
}

RegimeIntegrals::RegimeIntegrals(TimeFunction alpha, TimeFunction beta, double t0, QuadratureOptions quad)
    : alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      alpha_sq_(alpha_ * alpha_),
      t0_(t0),
      drift_(beta_, t0, quad),
      variance_(alpha_sq_, t0, quad) {}

double RegimeIntegrals::drift(double t) const { return drift_(t); }
double RegimeIntegrals::variance(double t) const { return variance_(t); }

LawCurve::LawCurve(double mu0, double sigma0_sq, double mu_offset, double var_offset, double t0, TimeFunction alpha,
                   TimeFunction beta, ReferenceCurve rho, QuadratureOptions quad)
    : mu0_(mu0),
      sigma0_sq_(sigma0_sq),
      mu_offset_(mu_offset),
      var_offset_(var_offset),
      integrals_(std::move(alpha), std::move(beta), t0, quad),
      rho_(std::move(rho)),
      quad_(quad) {
    if (!(sigma0_sq > 0.0)) throw RangeError("base variance must be positive");
    if (!(var_offset >= 0.0)) throw RangeError("variance offset must be non-negative");
}

MeanVar LawCurve::mean_var(double t) const {
    if (t < t0()) {
        throw RangeError("law requested at t = " + std::to_string(t) + " before its start " + std::to_string(t0()));
    }
    return {mu0_ + mu_offset_ + integrals_.drift(t), sigma0_sq_ + var_offset_ + integrals_.variance(t)};
}

double LawCurve::standardized(double t) const {
    const MeanVar mv = mean_var(t);
    return (rho_(t) - mv.mean) / std::sqrt(mv.var);
}

double LawCurve::phi(double t) const { return std_normal_cdf(standardized(t)); }

SlopeSign LawCurve::phi_slope_sign(double t) const {
    const MeanVar mv = mean_var(t);
    const double a = alpha()(t);
    const double a2 = a * a;
    const double b = beta()(t);
    const double r = rho_(t);
    const double dr = rho_.derivative(t);
    const double level_term = integrals_.drift(t) + mu_offset_ + (mu0_ - r);
    SlopeSign out;
    out.g = a2 * level_term + 2.0 * (dr - b) * mv.var;
    // Cancellation guard: a g that is zero up to roundoff has sign 0.
    const double scale = a2 * (std::abs(integrals_.drift(t)) + std::abs(mu_offset_) + std::abs(mu0_ - r)) +
                         2.0 * (std::abs(dr) + std::abs(b)) * mv.var;
    if (std::abs(out.g) <= 64.0 * 2.220446049250313e-16 * scale) {
        out.sign = 0;
    } else {
        out.sign = out.g > 0.0 ? 1 : -1;
    }
    return out;
}

LawCurve LawCurve::restart(double t1, TimeFunction alpha, TimeFunction beta) const {
    if (t1 < t0()) throw RangeError("restart time precedes the curve start");
    return LawCurve(mu0_, sigma0_sq_, mu_offset_ + integrals_.drift(t1), var_offset_ + integrals_.variance(t1), t1,
                    std::move(alpha), std::move(beta), rho_, quad_);
}

}  // namespace rsde
