#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "regime_sde/coefficients.hpp"
#include "regime_sde/errors.hpp"
#include "regime_sde/grid.hpp"

using namespace rsde;

namespace {
const TimeFunction t = TimeFunction::time();
TimeFunction C(double v) { return TimeFunction::constant(v); }
AlphaFamily alphas(double a) { return AlphaFamily::list({C(a)}); }
double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }
}  // namespace

TEST(Coefficients, DriftExamples) {
    const auto lin = CoefficientSet::multiplicative(C(1), C(0), C(0.7), alphas(1));
    for (double x : {0.1, 1.0, 5.0}) EXPECT_DOUBLE_EQ(eval_b(lin, 0.3, x), 0.7 * x);

    const auto trivial = CoefficientSet::additive(C(1), C(0), alphas(1));
    for (double x : {-4.0, 0.0, 3.0}) EXPECT_EQ(eval_b(trivial, 1.0, x), 0.0);

    const auto logdrift = CoefficientSet::multiplicative(exp(t), C(0), C(0), alphas(1));
    for (double tt : {0.0, 0.5, 1.5}) {
        for (double x : {0.2, 1.0, 4.0}) {
            EXPECT_LE(rel(eval_b(logdrift, tt, x), x * (tt + std::log(x))), 1e-13);
        }
    }
    EXPECT_THROW(eval_b(lin, 0.0, -0.5), DomainError);
    EXPECT_THROW(eval_b(lin, 0.0, 0.0), DomainError);
    const auto bad = CoefficientSet::additive(1.0 - t, C(0), alphas(1));
    EXPECT_THROW(eval_b(bad, 2.0, 1.0), ModeError);
}

TEST(Coefficients, BetaClosedForms) {
    // Gaussian SDE: σ₂ = c, b = (c'/c)x + a/c, β = a/c²
    const auto c = 2.0 + exp(-t);
    const auto a = sqrt(1.0 + t);
    const auto gauss = CoefficientSet::additive(c, a / c, alphas(1));
    // Linear SDE: β = b − α²/2
    const auto bt = 0.3 + 0.1 * t;
    const auto alpha_t = 1.0 + 0.5 * t;
    const auto linear = CoefficientSet::multiplicative(C(1), C(0), bt, AlphaFamily::list({alpha_t}));
    // log-drift: σ₁ = c, β = c'/c² − α²c/2
    const auto c2 = exp(0.5 * t);
    const auto logd = CoefficientSet::multiplicative(c2, C(0), C(0), alphas(0.8));
    for (double tt = 0; tt <= 3.0; tt += 0.01) {
        const double cv = c(tt);
        EXPECT_LE(rel(beta_n(gauss, 1, tt), a(tt) / (cv * cv)), 1e-12);
        EXPECT_LE(rel(beta_n(linear, 1, tt), bt(tt) - 0.5 * alpha_t(tt) * alpha_t(tt)), 1e-12);
        const double cc = c2(tt);
        EXPECT_LE(rel(beta_n(logd, 1, tt), 0.5 * cc / (cc * cc) - 0.5 * 0.64 * cc), 1e-12);
    }
    const auto zero_drift = CoefficientSet::additive(c, C(0), alphas(1));
    for (double tt : {0.0, 1.0, 2.5}) EXPECT_NEAR(beta_n(zero_drift, 1, tt), 0.0, 1e-15);
}

TEST(Coefficients, ExplosionFamilyBeta) {
    const auto fam = AlphaFamily::parametric(sqrt(2.0 * TimeFunction::index()));
    const auto coeffs = CoefficientSet::multiplicative(C(1), C(0), C(0), fam);
    for (std::size_t n = 1; n <= 50; ++n) {
        EXPECT_NEAR(beta_n(coeffs, n, 0.7), -static_cast<double>(n), 1e-12 * n);
        EXPECT_EQ(classify_band(coeffs, n, 0.0, 1.0, 64).band, Band::UpStrict) << n;
    }
}

TEST(Coefficients, ListFamilyExhausts) {
    const auto fam = AlphaFamily::list({C(1), C(2)});
    EXPECT_EQ(fam.size(), 2u);
    EXPECT_NO_THROW(fam.at(2));
    try {
        fam.at(3);
        FAIL();
    } catch (const RegimeExhausted& e) {
        EXPECT_EQ(e.index(), 3u);
    }
}

TEST(Coefficients, DriftOde) {
    const auto trivial = CoefficientSet::additive(C(1), C(0), alphas(1));
    EXPECT_EQ(check_drift_ode(trivial).max_residual, 0.0);

    const auto logdrift = CoefficientSet::multiplicative(exp(-t), C(0), C(0), alphas(1));
    DriftGrid grid;
    grid.x_high = 10.0;
    EXPECT_LE(check_drift_ode(logdrift, grid).max_residual, 1e-6);

    const auto perturbed = [&](double tt, double x) { return eval_b(logdrift, tt, x) + 0.1; };
    EXPECT_GE(check_drift_ode(logdrift, perturbed, grid).max_residual, 0.05);

    const auto affine = CoefficientSet::multiplicative(1.0 + 0.5 * t, 2.0 + sqrt(1.0 + t), 0.2 * t, alphas(1));
    EXPECT_LE(check_drift_ode(affine).max_residual, 1e-6);
    const auto additive = CoefficientSet::additive(2.0 + exp(-t), 0.5 * t, alphas(1));
    EXPECT_LE(check_drift_ode(additive).max_residual, 1e-6);
}

TEST(Coefficients, Bands) {
    EXPECT_EQ(classify_band(C(std::sqrt(2.0)), C(-1), 0, 1, 16).band, Band::UpStrict);
    EXPECT_EQ(classify_band(C(0), C(0), 0, 1, 16).band, Band::Frozen);
    const auto down = classify_band(C(1), C(0.375), 0, 1, 16);
    EXPECT_EQ(down.band, Band::DownStrict);
    EXPECT_NEAR(down.margin, 0.125, 1e-15);
    EXPECT_EQ(classify_band(C(1), C(0.1), 0, 1, 16).band, Band::Unclassified);
    EXPECT_FALSE(classify_band(C(1), C(0.1), 0, 1, 16).detail.empty());
    // the band edge itself is non-strict... unless the other side has slack
    EXPECT_EQ(classify_band(C(1), C(-0.25), 0, 1, 16).band, Band::UpStrict);
    // time-varying α that touches zero: both inequalities degenerate at t = 0
    const auto b = classify_band(t, -0.3 * t * t, 0, 1, 101);
    EXPECT_TRUE(b.up());
    EXPECT_THROW(classify_band(C(1), C(0), 1, 0, 16), RangeError);
}

TEST(Coefficients, JsonRoundTrip) {
    const auto c = CoefficientSet::multiplicative(exp(t), C(0.5), C(0.1), AlphaFamily::parametric(sqrt(2.0 * TimeFunction::index())));
    const auto d = CoefficientSet::from_json(c.to_json());
    EXPECT_EQ(d.mode(), DiffusionMode::Multiplicative);
    EXPECT_DOUBLE_EQ(beta_n(c, 3, 0.4), beta_n(d, 3, 0.4));
    EXPECT_THROW(CoefficientSet::from_json(nlohmann::json::parse(R"({"mode":"weird","sigma2":1,"drift_param":0,"alpha_family":[1]})")), ParseError);
    EXPECT_THROW(CoefficientSet::from_json(nlohmann::json::parse(R"({"mode":"multiplicative","sigma2":1,"drift_param":0,"alpha_family":[1]})")), ParseError);
}

TEST(Grid, CheckGridShape) {
    const auto g = check_grid(0.0, 1e6);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 1e6);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    EXPECT_EQ(check_grid(0.0, 1.0).size(), 2049u);
}
