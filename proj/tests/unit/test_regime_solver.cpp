#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "regime_sde/builtin.hpp"
#include "regime_sde/errors.hpp"
#include "regime_sde/normal.hpp"
#include "regime_sde/regime_solver.hpp"

using namespace rsde;

namespace {
const TimeFunction t = TimeFunction::time();
TimeFunction C(double v) { return TimeFunction::constant(v); }
LawCurve curve(TimeFunction a, TimeFunction b) {
    return LawCurve(0.0, 1.0, 0.0, 0.0, 0.0, std::move(a), std::move(b), ReferenceCurve::constant(0.0));
}
}  // namespace

TEST(FindCrossing, ConstantRegime) {
    const auto c = curve(C(std::sqrt(2.0)), C(-1.0));
    const auto hit = find_crossing(c, Level::from_score(1.0 / std::sqrt(3.0)), 0.0, 1e6);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(*hit, 1.0, 1e-12);
    EXPECT_NEAR(c.standardized(*hit), 1.0 / std::sqrt(3.0), 1e-12);

    const auto at_start = find_crossing(c, Level::from_prob(0.5), 0.0, 1e6);
    ASSERT_TRUE(at_start);
    EXPECT_EQ(*at_start, 0.0);
}

TEST(FindCrossing, UnreachedAndMonotonicity) {
    // bounded drift and variance: f(t) → small limit
    const auto bounded = curve(exp(-t), -0.01 * exp(-t));
    EXPECT_FALSE(find_crossing(bounded, Level::from_prob(0.9), 0.0, 1e4).has_value());

    // β > ¼α² pushes φ down for good
    const auto down = curve(C(1.0), C(0.4));
    EXPECT_FALSE(find_crossing(down, Level::from_prob(0.6), 0.0, 1e4).has_value());

    // dips first, then crosses: the bracket contains g < 0
    const auto dip = curve(C(1.0), 0.4 - t);
    EXPECT_THROW(find_crossing(dip, Level::from_prob(0.6), 0.0, 1e4), MonotonicityError);
}

TEST(BuildSchedule, ExplosionFinite) {
    const auto times = builtin::finite_times(200);
    auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(times)));
    const auto s = build_schedule(p);
    const auto bps = s.breakpoints();
    ASSERT_EQ(bps.size(), 201u);
    EXPECT_EQ(bps[0], 0.0);
    double F = 0;
    for (std::size_t n = 1; n <= 200; ++n) {
        EXPECT_NEAR(bps[n], times[n - 1], 1e-8) << n;
        F += 1.0 / (n + 1.0);
        EXPECT_NEAR(s.mean_var(bps[n]).var, 1.0 + 2.0 * F, 1e-10) << n;
    }
    EXPECT_EQ(s.status, ScheduleStatus::FiniteTmax);
    ASSERT_TRUE(s.tmax_estimate.has_value());
    EXPECT_NEAR(*s.tmax_estimate, 1.0, 1e-3);
    EXPECT_FALSE(check_globality(p).holds);
}

TEST(BuildSchedule, ExplosionGlobal) {
    auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(builtin::global_times(20))));
    const auto s = build_schedule(p);
    const auto bps = s.breakpoints();
    ASSERT_EQ(bps.size(), 21u);
    for (std::size_t n = 0; n <= 20; ++n) EXPECT_NEAR(bps[n], double(n), 1e-8);
    EXPECT_NE(s.status, ScheduleStatus::FiniteTmax);

    auto q = builtin::explosion(LevelSet::score_expression(builtin::global_score_expression()));
    q.solver.horizon = 200.0;
    const auto s2 = build_schedule(q);
    const auto b2 = s2.breakpoints();
    ASSERT_GE(b2.size(), 200u);
    for (std::size_t n = 0; n < b2.size(); ++n) EXPECT_NEAR(b2[n], double(n), 1e-8 * std::max<double>(1, n));
    EXPECT_NE(s2.status, ScheduleStatus::FiniteTmax);
}

TEST(BuildSchedule, VerifyAndDeterminism) {
    for (auto p : {builtin::gaussian(), builtin::linear()}) {
        const auto a = build_schedule(p);
        const auto b = build_schedule(p);
        ASSERT_EQ(a.breakpoints(), b.breakpoints());
        const auto chk = verify_schedule(a, p.levels);
        EXPECT_TRUE(chk.ok()) << p.name;
        EXPECT_LT(chk.max_score_error, 1e-10);
        EXPECT_EQ(a.status, ScheduleStatus::GlobalProven) << p.name;
    }
}

TEST(BuildSchedule, ReindexesWhenStartAboveFirstLevel) {
    auto p = builtin::gaussian();
    p.levels = LevelSet::probabilities({0.45, 0.6, 0.7});
    const auto s = build_schedule(p);
    EXPECT_EQ(s.start_index, 2u);
    EXPECT_EQ(s.segments.front().regime, 2u);
    EXPECT_EQ(s.segments.size(), 3u);
    EXPECT_TRUE(verify_schedule(s, p.levels).ok());
}

TEST(FamilyBounds, Examples) {
    const auto ex = builtin::explosion(LevelSet::probabilities({0.6}));
    const auto g = check_globality(ex);
    EXPECT_FALSE(g.holds);
    EXPECT_TRUE(check_bijectivity(ex).holds);
    EXPECT_NEAR(check_bijectivity(ex).value, 2.0, 1e-12);

    const auto gauss = builtin::gaussian();
    const auto gg = check_globality(gauss);
    EXPECT_TRUE(gg.holds);
    EXPECT_NEAR(gg.value, 1.5625, 1e-12);
    EXPECT_NEAR(check_bijectivity(gauss).value, 1.0, 1e-12);

    auto vanishing = builtin::explosion(LevelSet::probabilities({0.6}));
    vanishing.coeffs = CoefficientSet::multiplicative(C(1), C(0), C(0), AlphaFamily::parametric(exp(-t)));
    EXPECT_FALSE(check_bijectivity(vanishing).holds);
}

TEST(LowerBound, BoundedSchedule) {
    const auto p = builtin::gaussian();
    const auto s = build_schedule(p);
    const auto rep = check_lower_bound(s, p.sigma0_sq, check_globality(p).value);
    EXPECT_TRUE(rep.holds);
    EXPECT_EQ(rep.checked, 3u);
    EXPECT_GT(rep.min_slack, 0.0);
}

TEST(VarianceDiagnostic, FiniteExplosionDiverges) {
    auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(builtin::finite_times(200))));
    const auto rep = variance_divergence_diagnostic(build_schedule(p));
    EXPECT_TRUE(rep.increasing);
    EXPECT_TRUE(rep.unbounded) << rep.detail;
    EXPECT_NEAR(rep.decay_exponent, 1.0, 0.05);
}

TEST(TailExtrapolation, Models) {
    std::vector<double> pw, geo, lin;
    double s = 0;
    for (int n = 1; n <= 64; ++n) {
        pw.push_back(1.0 - 1.0 / (n + 1.0));
        s += std::pow(0.7, n);
        geo.push_back(s);
        lin.push_back(n);
    }
    const auto a = extrapolate_tmax(pw);
    EXPECT_TRUE(a.finite);
    EXPECT_NEAR(a.estimate, 1.0, 1e-3);
    const auto b = extrapolate_tmax(geo);
    EXPECT_TRUE(b.finite);
    EXPECT_NEAR(b.estimate, 0.7 / 0.3, 1e-9);
    EXPECT_FALSE(extrapolate_tmax(lin).finite);
}

TEST(Schedule, CurveCsvAndJson) {
    const auto s = build_schedule(builtin::gaussian());
    std::ostringstream os;
    s.write_curve_csv(os, 11);
    const std::string csv = os.str();
    EXPECT_EQ(csv.rfind("t,phi,mean,var,regime\n", 0), 0u);
    // 11 points per segment, shared ends written once
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), long(1 + 10 * s.segments.size() + 1));
    const auto j = s.to_json();
    EXPECT_EQ(j.at("segments").size(), s.segments.size());
}

TEST(Assumptions, Builtins) {
    EXPECT_TRUE(check_assumptions(builtin::gaussian()).all_passed());
    EXPECT_TRUE(check_assumptions(builtin::linear()).all_passed());
    auto bad = builtin::gaussian();
    bad.mu0 = 2.0;
    const auto rep = check_assumptions(bad);
    ASSERT_NE(rep.find("As-x0"), nullptr);
    EXPECT_FALSE(rep.find("As-x0")->passed);
}
