#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "regime_sde/builtin.hpp"
#include "regime_sde/errors.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/monte_carlo.hpp"
#include "regime_sde/philox.hpp"
#include "regime_sde/transform.hpp"

using namespace rsde;

namespace {
// one regime α ≡ √2, β ≡ −1 reaching far past t = 1
ProblemSpec single_regime() { return builtin::explosion(LevelSet::scores({5.0})); }
}  // namespace

TEST(Philox, KnownAnswers) {
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, NormalMoments) {
    const NormalSource src(99);
    double s = 0, q = 0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double z = src.normal(i, 3);
        s += z;
        q += z * z;
    }
    EXPECT_NEAR(s / N, 0.0, 4.0 / std::sqrt(N));
    EXPECT_NEAR(q / N, 1.0, 4.0 * std::sqrt(2.0 / N));
}

TEST(SimulateExact, SingleRegimeMoments) {
    const auto p = single_regime();
    const auto sched = build_schedule(p);
    const std::size_t N = 100000;
    const auto batch = simulate_exact(sched, 0.0, 1.0, N, {0.0, 1.0}, 42);
    const auto& x0 = batch.states[batch.time_index(0.0)];
    const auto& x1 = batch.states[batch.time_index(1.0)];
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s += x;
        return s / double(v.size());
    };
    auto var = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s / double(v.size() - 1);
    };
    EXPECT_NEAR(mean(x0), 0.0, 4.0 / std::sqrt(double(N)));
    EXPECT_NEAR(mean(x1), -1.0, 4.0 * std::sqrt(3.0 / N));
    EXPECT_NEAR(var(x1), 3.0, 4.0 * 3.0 * std::sqrt(2.0 / N));
    EXPECT_THROW(simulate_exact(sched, 0.0, 1.0, 10, {1e9}, 1), RangeError);
}

TEST(SimulateExact, MatchesAnalyticPhiAndIsDeterministic) {
    const auto p = builtin::gaussian();
    const auto sched = build_schedule(p);
    const std::size_t N = 100000;
    const auto times = linspace(0.0, 3.0, 20);
    const auto a = simulate_exact(sched, p.mu0, p.sigma0_sq, N, times, 7);
    const TimeFunction rho = reference_expression(p.coeffs, p.r);
    for (double t : times) {
        const double phi = sched.phi(t);
        EXPECT_LE(std::abs(empirical_phi(a, t, rho(t)) - phi), 4.0 * std::sqrt(phi * (1 - phi) / N)) << t;
    }
    setenv("REGIME_SDE_THREADS", "1", 1);
    const auto b = simulate_exact(sched, p.mu0, p.sigma0_sq, N, times, 7);
    unsetenv("REGIME_SDE_THREADS");
    EXPECT_EQ(a.states, b.states);
}

TEST(Particles, TransformedTracksSchedule) {
    const auto p = builtin::gaussian();
    const auto sched = build_schedule(p);
    ParticleOptions o;
    o.particles = 20000;
    o.dt = 1e-2;
    o.T = 7.0;
    const auto run = simulate_particles(p, o);
    // first switch into each regime vs the analytic breakpoints
    const auto bps = sched.breakpoints();
    for (std::size_t n = 2; n <= 4; ++n) {
        double first = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = 0; k < run.curve.times.size(); ++k) {
            if (run.curve.regime[k] >= n) {
                first = run.curve.times[k];
                break;
            }
        }
        ASSERT_FALSE(std::isnan(first)) << n;
        // window where the analytic φ is within 4 binomial errors of y_{n−1}
        const double y = p.levels.at(n - 1)->prob;
        const double band = 4.0 * std::sqrt(y * (1 - y) / double(o.particles));
        double lo = 0.0, hi = o.T;
        for (double t = 0.0; t <= o.T; t += 1e-3) {
            if (sched.phi(t) < y - band) lo = t;
            if (sched.phi(t) <= y + band) hi = t;
        }
        EXPECT_GE(first, lo - o.dt) << n;
        EXPECT_LE(first, hi + o.dt) << n;
        EXPECT_LT(lo, bps[n - 1]);
        EXPECT_GT(hi, bps[n - 1]);
    }
    ParticleOptions o1 = o;
    o1.particles = 2000;
    o1.T = 1.0;
    const auto r1 = simulate_particles(p, o1);
    setenv("REGIME_SDE_THREADS", "1", 1);
    const auto r2 = simulate_particles(p, o1);
    unsetenv("REGIME_SDE_THREADS");
    EXPECT_EQ(r1.curve.phi_hat, r2.curve.phi_hat);
    EXPECT_EQ(r1.batch.states, r2.batch.states);
}

TEST(Particles, OriginalCoordinatesMatchExactLaw) {
    const auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(builtin::finite_times(50))));
    const auto sched = build_schedule(p);
    ParticleOptions o;
    o.particles = 10000;
    o.dt = 1e-3;
    o.T = 0.5;
    o.coords = Coordinates::Original;
    const auto run = simulate_particles(p, o);
    const auto y = transform_batch(p.coeffs, run.batch, Coordinates::Transformed);
    const auto& yT = y.states[y.time_index(0.5)];
    double s = 0, q = 0;
    for (double v : yT) s += v;
    const double m = s / double(yT.size());
    for (double v : yT) q += (v - m) * (v - m);
    const double var = q / double(yT.size() - 1);
    const auto mv = sched.mean_var(0.5);
    const double N = double(yT.size());
    EXPECT_NEAR(m, mv.mean, 4.0 * std::sqrt(mv.var / N) + 0.05);
    EXPECT_NEAR(var, mv.var, 4.0 * mv.var * std::sqrt(2.0 / N) + 0.05);
    EXPECT_TRUE(run.batch.valid);
}

TEST(Particles, RawEulerLeavesDomain) {
    const auto p = single_regime();
    ParticleOptions o;
    o.particles = 1000;
    o.dt = 0.5;
    o.T = 2.0;
    o.coords = Coordinates::Original;
    o.raw_euler = true;
    try {
        simulate_particles(p, o);
        FAIL() << "expected DomainExit";
    } catch (const DomainExit& e) {
        EXPECT_GT(e.count(), 0u);
        EXPECT_GT(e.time(), 0.0);
    }
}

TEST(Particles, SingleParticle) {
    ParticleOptions o;
    o.particles = 1;
    o.T = 0.2;
    o.dt = 0.01;
    const auto run = simulate_particles(builtin::gaussian(), o);
    for (double f : run.curve.phi_hat) EXPECT_TRUE(f == 0.0 || f == 1.0);
    std::ostringstream os;
    run.curve.write_csv(os);
    EXPECT_EQ(os.str().rfind("t,phi_hat,regime,mean_hat,var_hat\n", 0), 0u);
}

TEST(EmpiricalPhi, EdgeCases) {
    PathBatch b;
    b.times = {0.0, 1.0};
    b.states = {{-1.0, 0.0, 1.0, 2.0}, {0.0, 0.0, 0.0, 0.0}};
    EXPECT_EQ(empirical_phi(b, 0.0, 5.0), 1.0);
    EXPECT_EQ(empirical_phi(b, 0.0, -std::numeric_limits<double>::infinity()), 0.0);
    EXPECT_EQ(empirical_phi(b, 0.0, 0.0), 0.5);
    EXPECT_EQ(empirical_phi(b, 1.0, 0.0), 1.0);  // ties count as ≤
    EXPECT_THROW(empirical_phi(b, 0.5, 0.0), RangeError);
}

TEST(TransformBatch, RoundTripAndTransport) {
    const auto gbm = single_regime().coeffs;
    PathBatch y;
    y.times = {0.0};
    y.states = {{0.0}};
    EXPECT_EQ(transform_batch(gbm, y, Coordinates::Original).states[0][0], 1.0);

    const auto p = builtin::logdrift();
    const auto batch = simulate_exact(build_schedule(p), p.mu0, p.sigma0_sq, 1000000, {0.5}, 3);
    const auto x = transform_batch(p.coeffs, batch, Coordinates::Original);
    const auto back = transform_batch(p.coeffs, x, Coordinates::Transformed);
    double worst = 0;
    for (std::size_t i = 0; i < x.states[0].size(); ++i) {
        worst = std::max(worst, std::abs(x.states[0][i] - inverse(p.coeffs, 0.5, back.states[0][i])));
    }
    EXPECT_LE(worst, 1e-10);
    const TimeFunction rho = reference_expression(p.coeffs, p.r);
    EXPECT_EQ(empirical_phi(x, 0.5, p.r(0.5)), empirical_phi(batch, 0.5, rho(0.5)));
}
