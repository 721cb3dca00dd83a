#include "regime_sde/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "regime_sde/errors.hpp"
#include "regime_sde/gaussian_law.hpp"
#include "regime_sde/philox.hpp"
#include "regime_sde/transform.hpp"

namespace rsde {

namespace {

constexpr std::uint32_t kExactStream = 0;
constexpr std::uint32_t kParticleStream = 1;

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

// Sequential so the result does not depend on the thread count.
Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    double s = 0.0;
    for (double x : xs) s += x;
    m.mean = s / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    double q = 0.0;
    for (double x : xs) q += (x - m.mean) * (x - m.mean);
    m.var = q / static_cast<double>(xs.size() - 1);
    return m;
}

double fraction_le(const std::vector<double>& xs, double threshold) {
    if (xs.empty()) return 0.0;
    std::size_t k = 0;
    for (double x : xs) k += (x <= threshold);
    return static_cast<double>(k) / static_cast<double>(xs.size());
}

}  // namespace

std::string to_string(Coordinates c) { return c == Coordinates::Transformed ? "transformed" : "original"; }

int worker_threads() {
    int n = 1;
#ifdef _OPENMP
    n = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("REGIME_SDE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(n, 1);
}

std::size_t PathBatch::time_index(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * std::max(1.0, std::abs(t)));
    if (it == times.end() || std::abs(*it - t) > 1e-12 * std::max(1.0, std::abs(t))) {
        throw RangeError("time " + std::to_string(t) + " is not on the batch grid");
    }
    return static_cast<std::size_t>(it - times.begin());
}

void PathBatch::write_paths_csv(std::ostream& os, std::size_t max_paths) const {
    const std::size_t m = std::min(max_paths, count());
    os << 't';
    for (std::size_t p = 0; p < m; ++p) os << ",path_" << p;
    os << '\n';
    char buf[32];
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", times[i]);
        os << buf;
        for (std::size_t p = 0; p < m; ++p) {
            std::snprintf(buf, sizeof buf, ",%.17g", states[i][p]);
            os << buf;
        }
        os << '\n';
    }
}

void EmpiricalCurve::write_csv(std::ostream& os) const {
    os << "t,phi_hat,regime,mean_hat,var_hat\n";
    char buf[160];
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%.17g,%.17g\n", times[i], phi_hat[i], regime[i], mean_hat[i],
                      var_hat[i]);
        os << buf;
    }
}

std::size_t regime_for(const LevelSet& levels, double phi_hat, std::size_t max_regimes) {
    std::size_t n = 1;
    while (n < max_regimes) {
        const auto y = levels.at(n);
        if (!y || phi_hat < y->prob) break;
        ++n;
    }
    return n;
}

PathBatch simulate_exact(const Schedule& schedule, double mu0, double sigma0_sq, std::size_t n,
                         const std::vector<double>& times, std::uint64_t seed) {
    if (times.empty()) throw RangeError("simulate_exact needs at least one output time");
    const double span = schedule.span_end();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || times[i] > span) {
            throw RangeError("time " + std::to_string(times[i]) + " outside the schedule span");
        }
        if (i > 0 && !(times[i] > times[i - 1])) throw RangeError("output times must be increasing");
    }
    // increments of the cumulative mean/variance between output times
    std::vector<double> dm(times.size()), sd(times.size());
    MeanVar prev{mu0, sigma0_sq};
    for (std::size_t i = 0; i < times.size(); ++i) {
        const MeanVar mv = times[i] == 0.0 ? MeanVar{mu0, sigma0_sq} : schedule.mean_var(times[i]);
        dm[i] = mv.mean - prev.mean;
        sd[i] = std::sqrt(std::max(0.0, mv.var - prev.var));
        prev = mv;
    }

    PathBatch batch;
    batch.coords = Coordinates::Transformed;
    batch.times = times;
    batch.seed = seed;
    batch.stream = kExactStream;
    batch.states.assign(times.size(), std::vector<double>(n));
    const NormalSource rng(seed, kExactStream);
    const double s0 = std::sqrt(sigma0_sq);
    const auto paths = static_cast<std::int64_t>(n);
#pragma omp parallel for num_threads(worker_threads()) schedule(static)
    for (std::int64_t p = 0; p < paths; ++p) {
        double y = mu0 + s0 * rng.normal(static_cast<std::uint64_t>(p), 0);
        for (std::size_t i = 0; i < times.size(); ++i) {
            y += dm[i] + sd[i] * rng.normal(static_cast<std::uint64_t>(p), static_cast<std::uint32_t>(i + 1));
            batch.states[i][static_cast<std::size_t>(p)] = y;
        }
    }
    return batch;
}

ParticleOptions ParticleOptions::from(const SimulationOptions& sim, Coordinates coords) {
    ParticleOptions o;
    o.particles = sim.particles;
    o.dt = sim.dt;
    o.T = sim.T;
    o.seed = sim.seed;
    o.coords = coords;
    o.output_points = sim.output_points;
    return o;
}

ParticleRun simulate_particles(const ProblemSpec& problem, const ParticleOptions& opts) {
    if (!(opts.dt > 0.0) || !(opts.T >= 0.0)) throw RangeError("simulate_particles needs dt > 0 and T >= 0");
    if (opts.particles == 0) throw RangeError("simulate_particles needs at least one particle");
    if (opts.raw_euler && opts.coords != Coordinates::Original) {
        throw RangeError("raw Euler stepping applies to original coordinates only");
    }
    const auto& cs = problem.coeffs;
    const std::size_t N = opts.particles;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(opts.T / opts.dt - 1e-9)));
    const double dt = opts.T > 0.0 ? opts.T / static_cast<double>(steps) : 0.0;
    const std::size_t nsteps = opts.T > 0.0 ? steps : 0;
    const bool original = opts.coords == Coordinates::Original;
    const TimeFunction rho_expr = reference_expression(cs, problem.r);

    // snapshot steps
    std::vector<std::size_t> snap;
    const std::size_t pts = std::max<std::size_t>(2, opts.output_points);
    for (std::size_t i = 0; i < pts; ++i) {
        const auto k = static_cast<std::size_t>(std::llround(double(nsteps) * double(i) / double(pts - 1)));
        if (snap.empty() || k != snap.back()) snap.push_back(k);
    }

    ParticleRun run;
    run.batch.coords = opts.coords;
    run.batch.seed = opts.seed;
    run.batch.stream = kParticleStream;

    const NormalSource rng(opts.seed, kParticleStream);
    const double s0 = std::sqrt(problem.sigma0_sq);
    const int threads = worker_threads();
    const auto paths = static_cast<std::int64_t>(N);

    // y holds transformed states, x original ones (when tracked)
    std::vector<double> y(N), x;
    for (std::size_t p = 0; p < N; ++p) y[p] = problem.mu0 + s0 * rng.normal(p, 0);
    if (original) {
        x.resize(N);
        for (std::size_t p = 0; p < N; ++p) x[p] = inverse(cs, 0.0, y[p]);
    }

    std::map<std::size_t, RegimeIntegrals> integrals;
    auto regime_integrals = [&](std::size_t n) -> const RegimeIntegrals& {
        auto it = integrals.find(n);
        if (it == integrals.end()) {
            it = integrals.emplace(n, RegimeIntegrals(cs.alpha().at(n), cs.beta(n), 0.0)).first;
        }
        return it->second;
    };

    std::size_t next_snap = 0;
    for (std::size_t k = 0; k <= nsteps; ++k) {
        const double t = dt * static_cast<double>(k);
        const std::vector<double>& state = original ? x : y;
        const double threshold = original ? problem.r(t) : rho_expr(t);
        const double phi = fraction_le(state, threshold);
        const std::size_t n = regime_for(problem.levels, phi, problem.solver.max_regimes);
        const Moments mom = moments(state);
        run.curve.times.push_back(t);
        run.curve.phi_hat.push_back(phi);
        run.curve.regime.push_back(n);
        run.curve.mean_hat.push_back(mom.mean);
        run.curve.var_hat.push_back(mom.var);
        if (next_snap < snap.size() && snap[next_snap] == k) {
            run.batch.times.push_back(t);
            run.batch.states.push_back(state);
            ++next_snap;
        }
        if (k == nsteps) break;

        const double t1 = t + dt;
        const auto step = static_cast<std::uint32_t>(k + 1);
        if (opts.raw_euler) {
            const TimeFunction alpha = cs.alpha().at(n);
            const double a = alpha(t);
            const double sq = std::sqrt(dt);
            const double lower = domain_bound(cs, t1).lower;
            std::size_t exits = 0;
#pragma omp parallel for num_threads(threads) schedule(static) reduction(+ : exits)
            for (std::int64_t p = 0; p < paths; ++p) {
                const auto i = static_cast<std::size_t>(p);
                double drift = 0.0;
                try {
                    drift = eval_b(cs, t, x[i]);
                } catch (const DomainError&) {
                    ++exits;
                    continue;
                }
                x[i] += drift * dt + a * cs.diffusion(t, x[i]) * sq * rng.normal(i, step);
                if (!(x[i] >= lower) || !std::isfinite(x[i])) ++exits;
            }
            if (exits > 0) {
                throw DomainExit(std::to_string(exits) + " particle(s) left the state domain at t = " +
                                     std::to_string(t1),
                                 t1, exits);
            }
        } else {
            const RegimeIntegrals& I = regime_integrals(n);
            const double dm = I.drift(t1) - I.drift(t);
            const double sd = std::sqrt(std::max(0.0, I.variance(t1) - I.variance(t)));
#pragma omp parallel for num_threads(threads) schedule(static)
            for (std::int64_t p = 0; p < paths; ++p) {
                const auto i = static_cast<std::size_t>(p);
                y[i] += dm + sd * rng.normal(i, step);
                if (original) x[i] = inverse(cs, t1, y[i]);
            }
        }
    }
    return run;
}

double empirical_phi(const PathBatch& batch, double t, double threshold) {
    return fraction_le(batch.states[batch.time_index(t)], threshold);
}

EmpiricalCurve summarize(const PathBatch& batch, const std::function<double(double)>& threshold,
                         const LevelSet& levels, std::size_t max_regimes) {
    EmpiricalCurve c;
    for (std::size_t i = 0; i < batch.times.size(); ++i) {
        const double t = batch.times[i];
        const double phi = fraction_le(batch.states[i], threshold(t));
        const Moments m = moments(batch.states[i]);
        c.times.push_back(t);
        c.phi_hat.push_back(phi);
        c.regime.push_back(regime_for(levels, phi, max_regimes));
        c.mean_hat.push_back(m.mean);
        c.var_hat.push_back(m.var);
    }
    return c;
}

PathBatch transform_batch(const CoefficientSet& coeffs, const PathBatch& batch, Coordinates target) {
    PathBatch out = batch;
    out.coords = target;
    if (target == batch.coords) return out;
    for (std::size_t i = 0; i < batch.times.size(); ++i) {
        const double t = batch.times[i];
        for (double& s : out.states[i]) s = target == Coordinates::Original ? inverse(coeffs, t, s) : forward(coeffs, t, s);
    }
    return out;
}

}  // namespace rsde
