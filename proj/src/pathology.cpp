#include "regime_sde/pathology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "regime_sde/errors.hpp"
#include "regime_sde/gaussian_law.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/monte_carlo.hpp"
#include "regime_sde/normal.hpp"
#include "regime_sde/philox.hpp"
#include "regime_sde/transform.hpp"

namespace rsde {

namespace {

constexpr std::uint32_t kProbeStream = 2;
const double kInf = std::numeric_limits<double>::infinity();

LawCurve restart_law(const LevelProblem& p, const TimeFunction& alpha, const TimeFunction& beta) {
    return LawCurve(p.mu0, p.sigma0_sq, p.mu_t0, p.var_t0, p.t0, alpha, beta, ReferenceCurve::constant(p.mu0));
}

Schedule single_segment(const LevelProblem& p, std::size_t regime, const TimeFunction& alpha,
                        const TimeFunction& beta) {
    Schedule s;
    s.segments.push_back(Segment{regime, p.t0, kInf, std::nullopt, restart_law(p, alpha, beta)});
    s.status = ScheduleStatus::GlobalProven;
    s.start_index = regime;
    s.horizon = kInf;
    return s;
}

void require(const Verdict& v, VerdictKind want) {
    if (v.kind != want) {
        throw VerdictMismatch("expected verdict " + to_string(want) + ", problem classifies as " + to_string(v.kind) +
                              (v.detail.empty() ? "" : " (" + v.detail + ")"));
    }
}

nlohmann::json band_json(const BandClass& b) {
    return {{"band", to_string(b.band)}, {"margin", b.margin}, {"detail", b.detail}};
}

}  // namespace

// ---------------------------------------------------------------------------
// LevelProblem

LevelProblem LevelProblem::with_level(double y, TimeFunction alpha_low, TimeFunction beta_low,
                                      TimeFunction alpha_high, TimeFunction beta_high) {
    LevelProblem p;
    p.level = y;
    const double z = std_normal_quantile(y);
    // |z|√(1 + v) = v/2 at the smallest admissible v
    p.var_t0 = 2.0 * z * z + 2.0 * std::abs(z) * std::sqrt(z * z + 1.0);
    p.mu_t0 = -z * std::sqrt(1.0 + p.var_t0);
    p.alpha_low = std::move(alpha_low);
    p.beta_low = std::move(beta_low);
    p.alpha_high = std::move(alpha_high);
    p.beta_high = std::move(beta_high);
    return p;
}

LevelProblem LevelProblem::from_problem(const ProblemSpec& problem) {
    const auto y = problem.levels.at(1);
    if (!y) throw RangeError("level problem needs at least one level");
    const TimeFunction rho = reference_expression(problem.coeffs, problem.r);
    if (rho.depends_on_time()) throw RangeError("level problem needs a constant transformed reference level");
    LevelProblem p;
    p.level = y->prob;
    p.mu0 = rho(0.0);
    p.mu_t0 = problem.mu0 - p.mu0;
    p.sigma0_sq = problem.sigma0_sq;
    p.alpha_low = problem.coeffs.alpha().at(1);
    p.beta_low = problem.coeffs.beta(1);
    p.alpha_high = problem.coeffs.alpha().at(2);
    p.beta_high = problem.coeffs.beta(2);
    p.validate();
    return p;
}

double LevelProblem::phi0() const { return std_normal_cdf(-mu_t0 / std::sqrt(sigma0_sq + var_t0)); }

void LevelProblem::validate() const {
    if (!(level > 0.0 && level < 1.0)) throw RangeError("level must lie in (0, 1)");
    if (!(sigma0_sq > 0.0) || !(var_t0 >= 0.0)) throw RangeError("restart variance must be positive");
    if (!(delta > 0.0)) throw RangeError("classification window must be positive");
    if (std::abs(phi0() - level) > 1e-12) {
        throw RangeError("restart law gives φ(t0) = " + std::to_string(phi0()) + ", level is " + std::to_string(level));
    }
    if (std::abs(mu_t0) > 0.5 * var_t0 * (1.0 + 1e-12) + 1e-15) {
        throw RangeError("restart offset violates |mu_t0| <= var_t0/2");
    }
}

nlohmann::json LevelProblem::to_json() const {
    return {{"level", level},
            {"t0", t0},
            {"mu0_bar", mu0},
            {"mu_t0", mu_t0},
            {"sigma0_sq", sigma0_sq},
            {"var_t0", var_t0},
            {"alpha_low", alpha_low.to_json()},
            {"beta_low", beta_low.to_json()},
            {"alpha_high", alpha_high.to_json()},
            {"beta_high", beta_high.to_json()},
            {"delta", delta},
            {"grid", grid},
            {"strict_margin", strict_margin}};
}

LevelProblem LevelProblem::from_json(const nlohmann::json& j) {
    try {
        LevelProblem p;
        p.level = j.at("level").get<double>();
        p.t0 = j.value("t0", 0.0);
        p.alpha_low = TimeFunction::from_json(j.at("alpha_low"));
        p.beta_low = TimeFunction::from_json(j.at("beta_low"));
        p.alpha_high = TimeFunction::from_json(j.at("alpha_high"));
        p.beta_high = TimeFunction::from_json(j.at("beta_high"));
        if (j.contains("mu_t0") || j.contains("var_t0") || j.contains("sigma0_sq") || j.contains("mu0_bar")) {
            p.mu0 = j.value("mu0_bar", 0.0);
            p.mu_t0 = j.value("mu_t0", 0.0);
            p.sigma0_sq = j.value("sigma0_sq", 1.0);
            p.var_t0 = j.value("var_t0", 0.0);
        } else {
            const auto base = with_level(p.level, p.alpha_low, p.beta_low, p.alpha_high, p.beta_high);
            p.mu_t0 = base.mu_t0;
            p.var_t0 = base.var_t0;
        }
        p.delta = j.value("delta", 1.0);
        p.grid = j.value("grid", std::size_t{257});
        p.strict_margin = j.value("strict_margin", 1e-9);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("level_problem: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Verdicts

std::string to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::UniqueUp: return "UniqueUp";
        case VerdictKind::UniqueDown: return "UniqueDown";
        case VerdictKind::TwoSolutions: return "TwoSolutions";
        case VerdictKind::InfinitelyMany: return "InfinitelyMany";
        case VerdictKind::NoLocalSolution: return "NoLocalSolution";
        case VerdictKind::NotCoveredByPaper: return "NotCoveredByPaper";
    }
    return "NotCoveredByPaper";
}

nlohmann::json Verdict::to_json() const {
    return {{"verdict", to_string(kind)}, {"low", band_json(low)}, {"high", band_json(high)}, {"detail", detail}};
}

Verdict verdict_from(const BandClass& low, const BandClass& high) {
    Verdict v;
    v.low = low;
    v.high = high;
    const Band l = low.band, h = high.band;
    if (l == Band::DownStrict && h == Band::UpStrict) {
        v.kind = VerdictKind::TwoSolutions;
    } else if (l == Band::UpStrict && h == Band::DownStrict) {
        v.kind = VerdictKind::NoLocalSolution;
    } else if (l == Band::DownStrict && h == Band::Frozen) {
        v.kind = VerdictKind::InfinitelyMany;
    } else if (l == Band::UpStrict && h == Band::UpStrict) {
        v.kind = VerdictKind::UniqueUp;
    } else if (l == Band::DownStrict && h == Band::DownStrict) {
        v.kind = VerdictKind::UniqueDown;
    } else {
        v.kind = VerdictKind::NotCoveredByPaper;
        v.detail = "low regime " + to_string(l) + (low.detail.empty() ? "" : " [" + low.detail + "]") +
                   ", high regime " + to_string(h) + (high.detail.empty() ? "" : " [" + high.detail + "]");
    }
    return v;
}

Verdict classify_level(const LevelProblem& p) {
    const double t1 = p.t0 + p.delta;
    return verdict_from(classify_band(p.alpha_low, p.beta_low, p.t0, t1, p.grid, p.strict_margin),
                        classify_band(p.alpha_high, p.beta_high, p.t0, t1, p.grid, p.strict_margin));
}

// ---------------------------------------------------------------------------
// Constructions

nlohmann::json Branches::to_json(std::size_t points) const {
    auto trace = [&](const Schedule& s) {
        const auto t0 = s.segments.front().start;
        nlohmann::json rows = nlohmann::json::array();
        for (double t : linspace(t0, t0 + 1.0, std::max<std::size_t>(points, 2))) rows.push_back({t, s.phi(t)});
        return rows;
    };
    return {{"probes", probes},
            {"verified", verified},
            {"detail", detail},
            {"decreasing", {{"schedule", decreasing.to_json()}, {"trace", trace(decreasing)}}},
            {"increasing", {{"schedule", increasing.to_json()}, {"trace", trace(increasing)}}}};
}

Branches construct_branches(const LevelProblem& p, std::size_t probes) {
    p.validate();
    require(classify_level(p), VerdictKind::TwoSolutions);
    Branches b{single_segment(p, 1, p.alpha_low, p.beta_low), single_segment(p, 2, p.alpha_high, p.beta_high),
               probes, true, ""};
    const LawCurve& low = b.decreasing.segments.front().law;
    const LawCurve& high = b.increasing.segments.front().law;
    // probes on (t₀, t₀ + δ]
    for (std::size_t i = 1; i <= probes; ++i) {
        const double t = p.t0 + p.delta * static_cast<double>(i) / static_cast<double>(probes);
        const bool ok = low.phi_slope_sign(t).sign < 0 && high.phi_slope_sign(t).sign > 0 && low.phi(t) < p.level &&
                        high.phi(t) >= p.level;
        if (!ok && b.verified) {
            b.verified = false;
            b.detail = "branch check fails at t = " + std::to_string(t);
        }
    }
    return b;
}

Schedule construct_delay_family(const LevelProblem& p, double w) {
    p.validate();
    if (!(w >= 0.0)) throw RangeError("delay must be non-negative");
    require(classify_level(p), VerdictKind::InfinitelyMany);
    if (w == 0.0) return single_segment(p, 1, p.alpha_low, p.beta_low);
    Schedule s = single_segment(p, 2, p.alpha_high, p.beta_high);
    Segment& frozen = s.segments.front();
    frozen.end = p.t0 + w;
    LawCurve after = frozen.law.restart(frozen.end, p.alpha_low, p.beta_low);
    s.segments.push_back(Segment{1, frozen.end, kInf, std::nullopt, std::move(after)});
    return s;
}

// ---------------------------------------------------------------------------
// Oscillation

void OscillationReport::write_csv(std::ostream& os) const {
    os << "step,phi_hat,regime,flip_count\n";
    char buf[96];
    for (std::size_t k = 0; k < phi_hat.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%zu\n", k, phi_hat[k], regime[k], flip_count[k]);
        os << buf;
    }
}

nlohmann::json OscillationReport::to_json() const {
    return {{"dt", dt},
            {"steps", steps},
            {"particles", particles},
            {"flips", flips},
            {"flips_ok", flips_ok()},
            {"max_excursion", max_excursion},
            {"mean_excursion", mean_excursion}};
}

OscillationReport oscillation_probe(const LevelProblem& p, double dt, std::size_t steps, std::size_t particles,
                                    std::uint64_t seed) {
    p.validate();
    require(classify_level(p), VerdictKind::NoLocalSolution);
    if (!(dt > 0.0) || particles == 0) throw RangeError("oscillation probe needs dt > 0 and particles > 0");

    OscillationReport rep;
    rep.dt = dt;
    rep.steps = steps;
    rep.particles = particles;

    const NormalSource rng(seed, kProbeStream);
    const double m0 = p.mu0 + p.mu_t0;
    const double s0 = std::sqrt(p.sigma0_sq + p.var_t0);
    std::vector<double> y(particles);
    for (std::size_t i = 0; i < particles; ++i) y[i] = m0 + s0 * rng.normal(i, 0);

    const RegimeIntegrals low(p.alpha_low, p.beta_low, p.t0);
    const RegimeIntegrals high(p.alpha_high, p.beta_high, p.t0);
    const auto paths = static_cast<std::int64_t>(particles);
    const int threads = worker_threads();
    int prev_sign = 0;
    double excursion_sum = 0.0;
    for (std::size_t k = 0;; ++k) {
        std::size_t below = 0;
        for (double v : y) below += (v <= p.mu0);
        const double phi = static_cast<double>(below) / static_cast<double>(particles);
        const int sign = phi >= p.level ? 1 : -1;
        if (prev_sign != 0 && sign != prev_sign) ++rep.flips;
        prev_sign = sign;
        const double exc = std::abs(phi - p.level);
        rep.max_excursion = std::max(rep.max_excursion, exc);
        excursion_sum += exc;
        rep.phi_hat.push_back(phi);
        rep.regime.push_back(sign > 0 ? 2 : 1);
        rep.flip_count.push_back(rep.flips);
        if (k == steps) break;

        const double t = p.t0 + dt * static_cast<double>(k);
        const RegimeIntegrals& I = sign > 0 ? high : low;
        const double dm = I.drift(t + dt) - I.drift(t);
        const double sd = std::sqrt(std::max(0.0, I.variance(t + dt) - I.variance(t)));
        const auto step = static_cast<std::uint32_t>(k + 1);
#pragma omp parallel for num_threads(threads) schedule(static)
        for (std::int64_t i = 0; i < paths; ++i) {
            y[static_cast<std::size_t>(i)] += dm + sd * rng.normal(static_cast<std::uint64_t>(i), step);
        }
    }
    rep.mean_excursion = excursion_sum / static_cast<double>(steps + 1);
    return rep;
}

OscillationComparison oscillation_compare(const LevelProblem& p, double dt, std::size_t steps, std::size_t particles,
                                          std::uint64_t seed) {
    return {oscillation_probe(p, dt, steps, particles, seed),
            oscillation_probe(p, 0.5 * dt, 2 * steps, particles, seed)};
}

namespace builtin {

namespace {
TimeFunction C(double v) { return TimeFunction::constant(v); }
}  // namespace

LevelProblem two_solutions() { return LevelProblem::with_level(0.5, C(1.0), C(0.375), C(1.0), C(-0.375)); }

LevelProblem no_local_solution() { return LevelProblem::with_level(0.5, C(1.0), C(-0.375), C(1.0), C(0.375)); }

LevelProblem infinitely_many() { return LevelProblem::with_level(0.5, C(1.0), C(0.375), C(0.0), C(0.0)); }

}  // namespace builtin

}  // namespace rsde
