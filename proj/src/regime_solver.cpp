#include "regime_sde/regime_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "regime_sde/errors.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/normal.hpp"
#include "regime_sde/transform.hpp"

namespace rsde {

std::string to_string(ScheduleStatus s) {
    switch (s) {
        case ScheduleStatus::GlobalProven: return "GlobalProven";
        case ScheduleStatus::FiniteTmax: return "FiniteTmax";
        case ScheduleStatus::HorizonTruncated: return "HorizonTruncated";
    }
    return "HorizonTruncated";
}

// ---------------------------------------------------------------------------
// Schedule

std::vector<double> Schedule::breakpoints() const {
    std::vector<double> out;
    if (segments.empty()) return out;
    out.push_back(segments.front().start);
    for (const auto& s : segments) {
        if (std::isfinite(s.end)) out.push_back(s.end);
    }
    return out;
}

double Schedule::span_end() const {
    if (segments.empty()) return 0.0;
    const auto& last = segments.back();
    if (std::isfinite(last.end)) return last.end;
    return status == ScheduleStatus::GlobalProven ? std::numeric_limits<double>::infinity() : horizon;
}

const Segment& Schedule::segment_at(double t) const {
    if (segments.empty()) throw RangeError("empty schedule");
    if (t < segments.front().start || t > span_end()) {
        throw RangeError("t = " + std::to_string(t) + " outside the schedule span");
    }
    // first segment whose end is beyond t; the closing breakpoint of a
    // finite schedule belongs to its last segment
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const Segment& s) { return v < s.end; });
    if (it == segments.end()) return segments.back();
    return *it;
}

nlohmann::json Schedule::to_json() const {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : segments) {
        nlohmann::json j{{"regime", s.regime},
                         {"start", s.start},
                         {"end", std::isfinite(s.end) ? nlohmann::json(s.end) : nlohmann::json(nullptr)},
                         {"alpha", s.law.alpha().to_json()},
                         {"beta", s.law.beta().to_json()},
                         {"drift_integral", s.law.mu_offset()},
                         {"variance_integral", s.law.var_offset()}};
        if (s.target) {
            j["level"] = {{"prob", s.target->prob}, {"score", s.target->score}};
        } else {
            j["level"] = nullptr;
        }
        segs.push_back(std::move(j));
    }
    return {{"status", to_string(status)},
            {"tmax_estimate", tmax_estimate ? nlohmann::json(*tmax_estimate) : nlohmann::json(nullptr)},
            {"start_index", start_index},
            {"horizon", horizon},
            {"breakpoints", breakpoints()},
            {"segments", segs},
            {"notes", notes}};
}

void Schedule::write_curve_csv(std::ostream& os, std::size_t points) const {
    if (points < 2) points = 2;
    os << "t,phi,mean,var,regime\n";
    char buf[160];
    for (const auto& s : segments) {
        double end = s.end;
        if (!std::isfinite(end)) end = std::min(horizon, s.start + std::max(1.0, s.start));
        if (!(end > s.start)) continue;
        const auto grid = linspace(s.start, end, points);
        // the right end belongs to the next interval except for the very last one
        const bool last = &s == &segments.back();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (i + 1 == grid.size() && !last) break;
            const double t = grid[i];
            const MeanVar mv = s.law.mean_var(t);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n", t, s.law.phi(t), mv.mean, mv.var, s.regime);
            os << buf;
        }
    }
}

// ---------------------------------------------------------------------------
// Crossing search

namespace {

void require_increasing_at(const LawCurve& curve, double t) {
    const SlopeSign s = curve.phi_slope_sign(t);
    if (s.sign <= 0) {
        std::ostringstream os;
        os.precision(12);
        os << "phi is not strictly increasing at t = " << t << " (g = " << s.g << ") in regime starting at "
           << curve.t0();
        throw MonotonicityError(os.str(), t, s.g);
    }
}

}  // namespace

std::optional<double> find_crossing(const LawCurve& curve, const Level& level, double start, double horizon,
                                    double root_tol) {
    if (start < curve.t0()) throw RangeError("find_crossing: start precedes the curve");
    const double z = level.score;
    auto h = [&](double t) { return curve.standardized(t) - z; };
    const double h0 = h(start);
    if (std::isnan(h0)) throw DomainError("phi is undefined at t = " + std::to_string(start), start, 0.0);
    if (h0 >= 0.0) return start;
    if (!(start < horizon)) return std::nullopt;

    // Initial step from the slope f' = g / (2 v^{3/2}).
    double step = 1e-3 * std::max(1.0, std::abs(start));
    {
        const SlopeSign s = curve.phi_slope_sign(start);
        const double v = curve.mean_var(start).var;
        const double fprime = s.g / (2.0 * v * std::sqrt(v));
        if (s.sign > 0 && std::isfinite(fprime) && fprime > 0.0) {
            const double newton = -h0 / fprime;
            if (std::isfinite(newton) && newton > 0.0) step = newton;
        }
    }
    const double min_step = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(start));
    step = std::max(step, min_step);

    double a = start, ha = h0;
    double b = std::min(start + step, horizon);
    double hb = h(b);
    while (hb < 0.0) {
        if (std::isnan(hb)) throw DomainError("phi is undefined at t = " + std::to_string(b), b, 0.0);
        if (b >= horizon) return std::nullopt;
        a = b;
        ha = hb;
        step *= 2.0;
        b = std::min(start + step, horizon);
        hb = h(b);
    }
    if (std::isnan(hb)) throw DomainError("phi is undefined at t = " + std::to_string(b), b, 0.0);

    // Illinois regula falsi with a bisection fallback whenever the bracket
    // fails to halve over two consecutive steps.
    double best = b, best_h = hb;
    int side = 0;
    double width_prev = b - a;
    int slow = 0;
    const double polish = 1e-2 * root_tol;
    for (int iter = 0; iter < 400; ++iter) {
        if (std::abs(best_h) <= polish) break;
        const double ulp_gap = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(b));
        if (b - a <= ulp_gap) break;
        double c = b - hb * (b - a) / (hb - ha);
        if (slow >= 2 || !(c > a && c < b)) {
            c = 0.5 * (a + b);
            slow = 0;
        }
        const double hc = h(c);
        if (std::isnan(hc)) throw DomainError("phi is undefined at t = " + std::to_string(c), c, 0.0);
        if (std::abs(hc) < std::abs(best_h) || (std::abs(hc) == std::abs(best_h) && c < best)) {
            best = c;
            best_h = hc;
        }
        if (hc < 0.0) {
            a = c;
            ha = hc;
            if (side == -1) hb *= 0.5;
            side = -1;
        } else {
            b = c;
            hb = hc;
            if (side == +1) ha *= 0.5;
            side = +1;
        }
        const double width = b - a;
        slow = (width > 0.5 * width_prev) ? slow + 1 : 0;
        width_prev = width;
    }
    if (std::abs(ha) < std::abs(best_h)) {
        best = a;
        best_h = ha;
    }

    // Hypothesis check: φ must increase between start and the crossing.
    if (best > start) {
        for (double frac : {0.25, 0.5, 0.75, 1.0}) require_increasing_at(curve, start + frac * (best - start));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Tail extrapolation

TailEstimate extrapolate_tmax(const std::vector<double>& T) {
    TailEstimate out;
    if (T.size() < 17) {
        out.model = "too few breakpoints";
        return out;
    }
    const std::size_t N = T.size() - 1;  // gaps d_1..d_N
    const std::size_t K = std::max<std::size_t>(8, N / 4);
    std::vector<double> ks, logd;
    for (std::size_t k = N - K + 1; k <= N; ++k) {
        const double d = T[k] - T[k - 1];
        if (!(d > 0.0)) {
            out.model = "non-increasing sequence";
            return out;
        }
        ks.push_back(static_cast<double>(k));
        logd.push_back(std::log(d));
    }
    const double dN = T[N] - T[N - 1];
    if (logd.back() >= logd.front()) {
        out.model = "gaps not shrinking";
        return out;
    }
    auto fit = [&](auto xform, double& slope) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double x = xform(ks[i]);
            sx += x;
            sy += logd[i];
            sxx += x * x;
            sxy += x * logd[i];
        }
        slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        const double icpt = (sy - slope * sx) / m;
        double sse = 0;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double e = logd[i] - (icpt + slope * xform(ks[i]));
            sse += e * e;
        }
        return sse;
    };
    double slope_pow = 0, slope_geo = 0;
    const double sse_pow = fit([](double k) { return std::log(k); }, slope_pow);
    const double sse_geo = fit([](double k) { return k; }, slope_geo);
    const double Nd = static_cast<double>(N);
    if (sse_pow <= sse_geo) {
        const double p = -slope_pow;
        out.model = "power";
        out.parameter = p;
        if (p > 1.1) {
            out.finite = true;
            out.estimate = T[N] + dN * std::pow(Nd, p) * std::pow(Nd + 0.5, 1.0 - p) / (p - 1.0);
        }
    } else {
        const double r = std::exp(slope_geo);
        out.model = "geometric";
        out.parameter = r;
        if (r < 1.0 - 1e-3) {
            out.finite = true;
            out.estimate = T[N] + dN * r / (1.0 - r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Family bounds

namespace {

struct Extreme {
    double value;
    double t;
};

Extreme alpha_sq_extreme(const TimeFunction& alpha, const std::vector<double>& grid, bool want_max) {
    if (!alpha.depends_on_time()) {
        const double a = *alpha.constant_value();
        return {a * a, 0.0};
    }
    Extreme e{want_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity(), 0.0};
    for (double t : grid) {
        const double a = alpha(t);
        const double a2 = a * a;
        if (std::isnan(a2)) return {std::numeric_limits<double>::quiet_NaN(), t};
        if (want_max ? a2 > e.value : a2 < e.value) e = {a2, t};
    }
    return e;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

FamilyBound family_bound(const ProblemSpec& problem, bool want_max, double floor) {
    const auto& fam = problem.coeffs.alpha();
    const double H = problem.solver.horizon;
    const auto grid = check_grid(0.0, H, problem.solver.grid);
    const std::string where = " [checked on " + std::to_string(grid.size()) + " grid points of [0, " + fmt(H) + "]]";
    FamilyBound out;
    auto better = [&](double a, double b) { return want_max ? a > b : a < b; };
    auto judge = [&](double v) { return want_max ? std::isfinite(v) : v > floor; };

    auto describe = [&](const std::string& what) {
        std::string d = (want_max ? "sup alpha^2 = " : "inf alpha^2 = ") + fmt(out.value) + " at n = " +
                        std::to_string(out.worst_n) + ", t = " + fmt(out.worst_t);
        if (!want_max && !out.holds && out.worst_t == H) d += " (fails at horizon)";
        return d + what + where;
    };

    if (!fam.is_parametric()) {
        out.value = want_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= *fam.size(); ++n) {
            const Extreme e = alpha_sq_extreme(fam.at(n), grid, want_max);
            if (std::isnan(e.value) || better(e.value, out.value)) {
                out.value = e.value;
                out.worst_n = n;
                out.worst_t = e.t;
            }
        }
        out.holds = judge(out.value);
        out.detail = describe(", finite family of " + std::to_string(*fam.size()));
        return out;
    }

    const std::size_t cap = std::max<std::size_t>(problem.solver.n_cap, 2);
    std::vector<Extreme> ex;
    for (std::size_t n = 1; n <= cap; ++n) ex.push_back(alpha_sq_extreme(fam.at(n), grid, want_max));
    bool nondecreasing = true, nonincreasing = true;
    for (std::size_t i = 1; i < ex.size(); ++i) {
        const double tol = 1e-12 * std::max(std::abs(ex[i].value), std::abs(ex[i - 1].value));
        if (ex[i].value < ex[i - 1].value - tol) nondecreasing = false;
        if (ex[i].value > ex[i - 1].value + tol) nonincreasing = false;
    }
    // The monotone direction towards the bound: growth for a sup, decay for an inf.
    const bool runs_away = want_max ? nondecreasing && !nonincreasing : nonincreasing && !nondecreasing;
    const bool settled = want_max ? nonincreasing : nondecreasing;
    if (settled) {
        out.value = ex[0].value;
        out.worst_n = 1;
        out.worst_t = ex[0].t;
        out.holds = judge(out.value);
        out.detail = describe(", family monotone in n so n = 1 is extremal");
        return out;
    }
    if (runs_away) {
        Extreme prev = ex.back();
        Extreme last = prev;
        std::size_t last_n = cap;
        for (int k = 7; k <= 40; ++k) {
            const std::size_t n = std::size_t{1} << k;
            if (n <= cap) continue;
            prev = last;
            last = alpha_sq_extreme(fam.at(n), grid, want_max);
            last_n = n;
        }
        out.value = last.value;
        out.worst_n = last_n;
        out.worst_t = last.t;
        if (want_max) {
            const bool growing = !(std::isfinite(last.value)) || last.value > prev.value * (1.0 + 1e-6);
            out.holds = !growing && std::isfinite(last.value);
            if (growing) out.value = std::numeric_limits<double>::infinity();
            out.detail = growing ? "alpha family unbounded: sup alpha_n^2 still growing at n = 2^40 (" +
                                       fmt(last.value) + ")" + where
                                 : describe(", monotone limit estimated at n = 2^40");
        } else {
            out.holds = judge(last.value);
            out.detail = describe(", monotone limit estimated at n = 2^40");
        }
        return out;
    }
    out.value = ex[0].value;
    out.worst_t = ex[0].t;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        if (better(ex[i].value, out.value)) {
            out.value = ex[i].value;
            out.worst_n = i + 1;
            out.worst_t = ex[i].t;
        }
    }
    out.holds = judge(out.value);
    out.detail = describe(", family not monotone in n: checked n <= " + std::to_string(cap));
    return out;
}

}  // namespace

FamilyBound check_globality(const ProblemSpec& problem) { return family_bound(problem, true, 0.0); }

FamilyBound check_bijectivity(const ProblemSpec& problem, double floor) { return family_bound(problem, false, floor); }

LowerBoundReport check_lower_bound(const Schedule& schedule, double sigma0_sq, double C) {
    LowerBoundReport rep;
    rep.C = C;
    const double sigma0 = std::sqrt(sigma0_sq);
    for (const auto& s : schedule.segments) {
        if (!std::isfinite(s.end) || !s.target) continue;
        const double bound = 2.0 * sigma0 / C * s.target->score;
        const double slack = s.end - bound;
        ++rep.checked;
        rep.min_slack = std::min(rep.min_slack, slack);
        if (slack < -1e-12 * std::max(1.0, s.end)) {
            ++rep.violations;
            rep.holds = false;
        }
    }
    return rep;
}

VarianceDivergenceReport variance_divergence_diagnostic(const Schedule& schedule) {
    VarianceDivergenceReport rep;
    const auto bps = schedule.breakpoints();
    for (double t : bps) rep.variances.push_back(schedule.mean_var(t).var);
    const auto& v = rep.variances;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) rep.increasing = false;
    }
    if (v.size() < 3) {
        rep.detail = "fewer than 3 breakpoints: no growth fit";
        return rep;
    }
    // Fit Δv_n ≈ c n^{-p} on the trailing half.
    const std::size_t N = v.size() - 1;
    const std::size_t first = std::max<std::size_t>(1, N / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t n = first; n <= N; ++n) {
        const double dv = v[n] - v[n - 1];
        if (!(dv > 0.0)) continue;
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(dv);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1;
    }
    if (m >= 2 && m * sxx - sx * sx > 0) {
        rep.decay_exponent = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    rep.unbounded = rep.increasing && m >= 2 && rep.decay_exponent <= 1.05;
    std::ostringstream os;
    os.precision(10);
    os << "v(T_n) from " << v.front() << " to " << v.back() << " over " << v.size() << " breakpoints; increments decay like n^-"
       << rep.decay_exponent << (rep.unbounded ? " (partial sums diverge)" : " (summable)");
    rep.detail = os.str();
    return rep;
}

// ---------------------------------------------------------------------------
// Schedule construction

Schedule build_schedule(const ProblemSpec& problem) {
    const auto& coeffs = problem.coeffs;
    const auto& opt = problem.solver;
    const ReferenceCurve rho(reference_expression(coeffs, problem.r));
    const FamilyBound globality = check_globality(problem);

    Schedule sched;
    sched.horizon = opt.horizon;

    // Re-index: start in the regime whose interval contains φ(0).
    const double z0 = (rho(0.0) - problem.mu0) / std::sqrt(problem.sigma0_sq);
    if (std::isnan(z0)) throw DomainError("r(0) is outside U_0", 0.0, problem.r(0.0));
    std::size_t n = 1;
    if (opt.reindex) {
        while (true) {
            const auto lvl = problem.levels.at(n);
            if (!lvl || z0 < lvl->score) break;
            ++n;
            if (n > opt.max_regimes) throw RegimeExhausted("phi(0) exceeds every level up to max_regimes", n);
        }
    }
    sched.start_index = n;
    if (n > 1) sched.notes.push_back("phi(0) >= y_" + std::to_string(n - 1) + ": levels re-indexed to start at regime " + std::to_string(n));

    LawCurve curve(problem.mu0, problem.sigma0_sq, 0.0, 0.0, 0.0, coeffs.alpha().at(n), coeffs.beta(n), rho);
    double t = 0.0;
    std::size_t built = 0;
    std::size_t tiny = 0;
    enum class Stop { NotReached, LevelsExhausted, MaxRegimes, Atom } stop;

    while (true) {
        const auto lvl = problem.levels.at(n);
        if (!lvl) {
            stop = Stop::LevelsExhausted;
            break;
        }
        if (built >= opt.max_regimes) {
            stop = Stop::MaxRegimes;
            break;
        }
        const auto Tn = find_crossing(curve, *lvl, t, opt.horizon, opt.root_tol);
        if (!Tn) {
            sched.segments.push_back({n, t, std::numeric_limits<double>::infinity(), lvl, curve});
            stop = Stop::NotReached;
            break;
        }
        if (*Tn > t) {
            sched.segments.push_back({n, t, *Tn, lvl, curve});
            ++built;
            const double gap = *Tn - t;
            tiny = gap < opt.t_atom_rel * std::max(1.0, *Tn) ? tiny + 1 : 0;
            t = *Tn;
        } else {
            sched.notes.push_back("level y_" + std::to_string(n) + " already reached at t = " + fmt(t) + "; regime " +
                                  std::to_string(n) + " has zero length");
        }
        ++n;
        curve = curve.restart(t, coeffs.alpha().at(n), coeffs.beta(n));
        if (tiny >= opt.k_atom) {
            stop = Stop::Atom;
            break;
        }
    }

    const auto finite_T = sched.breakpoints();
    if (stop == Stop::NotReached) {
        sched.status = globality ? ScheduleStatus::GlobalProven : ScheduleStatus::HorizonTruncated;
        sched.notes.push_back("level y_" + std::to_string(n) + " not reached by the horizon " + fmt(opt.horizon));
        return sched;
    }

    TailEstimate tail = extrapolate_tmax(finite_T);
    if (stop == Stop::Atom) {
        sched.notes.push_back(std::to_string(opt.k_atom) + " consecutive gaps below t_atom: breakpoints accumulate");
        if (!tail.finite && finite_T.size() >= 3) {
            // Aitken Δ² on the last three breakpoints.
            const std::size_t k = finite_T.size() - 1;
            const double a = finite_T[k - 2], b = finite_T[k - 1], c = finite_T[k];
            const double den = (c - b) - (b - a);
            tail.finite = true;
            tail.model = "aitken";
            tail.estimate = den != 0.0 ? c - (c - b) * (c - b) / den : c;
        }
    }
    if (tail.finite && !globality) {
        sched.status = ScheduleStatus::FiniteTmax;
        sched.tmax_estimate = tail.estimate;
        sched.notes.push_back("T_max extrapolated (" + tail.model + " tail, parameter " + fmt(tail.parameter) +
                              ") from " + std::to_string(finite_T.size() - 1) + " breakpoints");
        return sched;
    }
    if (tail.finite && globality) {
        sched.notes.push_back("breakpoints look convergent but the alpha family is bounded; T_max = infinity by the globality bound");
    }
    // The current regime persists past the last computed breakpoint.
    sched.segments.push_back({n, t, std::numeric_limits<double>::infinity(), problem.levels.at(n), curve});
    sched.status = globality ? ScheduleStatus::GlobalProven : ScheduleStatus::HorizonTruncated;
    if (stop == Stop::LevelsExhausted) {
        sched.notes.push_back("level list exhausted after " + std::to_string(n - 1) + "; regime " + std::to_string(n) +
                              " persists");
    } else if (stop == Stop::MaxRegimes) {
        sched.notes.push_back("stopped after max_regimes = " + std::to_string(opt.max_regimes) + " regimes");
    }
    return sched;
}

ScheduleCheck verify_schedule(const Schedule& schedule, const LevelSet& levels, std::size_t probes_per_interval) {
    ScheduleCheck out;
    auto lower_score = [&](std::size_t n) {
        if (n <= 1) return -std::numeric_limits<double>::infinity();
        const auto l = levels.at(n - 1);
        return l ? l->score : std::numeric_limits<double>::infinity();
    };
    for (const auto& s : schedule.segments) {
        const double lo = lower_score(s.regime);
        const double hi = s.target ? s.target->score : std::numeric_limits<double>::infinity();
        double end = s.end;
        if (!std::isfinite(end)) end = std::min(schedule.horizon, s.start + std::max(1.0, s.start));
        if (!(end > s.start)) continue;
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < probes_per_interval; ++i) {
            // interior probes; endpoint values are compared separately
            const double t = s.start + (end - s.start) * (static_cast<double>(i) + 0.5) / static_cast<double>(probes_per_interval);
            const double f = s.law.standardized(t);
            ++out.probes;
            // scores are compared with a root-tolerance allowance
            if (f < lo - 1e-10 || f >= hi) {
                if (out.indicator_violations == 0) out.first_violation_t = t;
                ++out.indicator_violations;
            }
            if (!(f > prev)) ++out.monotonicity_violations;
            prev = f;
        }
        if (std::isfinite(s.end) && s.target) {
            const double f = s.law.standardized(s.end);
            out.max_score_error = std::max(out.max_score_error, std::abs(f - s.target->score));
            out.max_level_error = std::max(out.max_level_error, std::abs(std_normal_cdf(f) - s.target->prob));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assumption checklist

bool AssumptionReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

AssumptionReport check_assumptions(const ProblemSpec& problem) {
    AssumptionReport rep;
    const auto& coeffs = problem.coeffs;
    const auto& opt = problem.solver;
    const double H = opt.horizon;
    const auto grid = check_grid(0.0, H, opt.grid);
    const std::string on_grid = " [checked on " + std::to_string(grid.size()) + " grid points of [0, " + fmt(H) + "]]";

    {  // (As-σ)
        AssumptionCheck c{"As-sigma", true, ""};
        for (double t : grid) {
            const double s1 = coeffs.sigma1()(t), s2 = coeffs.sigma2()(t);
            std::string why;
            if (!std::isfinite(s1) || !std::isfinite(s2)) why = "sigma not finite";
            else if (s1 < 0.0 || s2 < 0.0) why = "sigma1, sigma2 must be >= 0";
            else if (coeffs.mode() == DiffusionMode::Additive && !(s2 > 0.0)) why = "additive mode needs sigma2 > 0";
            else if (coeffs.mode() == DiffusionMode::Multiplicative && !(s1 > 0.0)) why = "multiplicative mode needs sigma1 > 0";
            if (!why.empty()) {
                c.passed = false;
                c.detail = why + " at t = " + fmt(t) + " (sigma1 = " + fmt(s1) + ", sigma2 = " + fmt(s2) + ")";
                break;
            }
        }
        if (c.passed) c.detail = to_string(coeffs.mode()) + " mode holds" + on_grid;
        rep.checks.push_back(c);
    }
    {  // (As-b)
        AssumptionCheck c{"As-b", false, ""};
        try {
            const auto ode = check_drift_ode(coeffs);
            c.passed = ode.max_residual <= 1e-6;
            c.detail = "drift ODE residual " + fmt(ode.max_residual) + " (worst at t = " + fmt(ode.worst_t) +
                       ", x = " + fmt(ode.worst_x) + ") on " + std::to_string(ode.points) + " points";
        } catch (const Error& e) {
            c.detail = e.what();
        }
        rep.checks.push_back(c);
    }
    {  // (As-x0)
        AssumptionCheck c{"As-x0", false, ""};
        const double half = 0.5 * problem.sigma0_sq;
        c.passed = problem.sigma0_sq > 0.0 && std::abs(problem.mu0) <= half;
        c.detail = "|mu0_bar| = " + fmt(std::abs(problem.mu0)) + (c.passed ? " <= " : " > ") +
                   "sigma0_sq/2 = " + fmt(half);
        rep.checks.push_back(c);
    }
    {  // (As-I)
        AssumptionCheck c{"As-I", true, ""};
        const auto sz = problem.levels.size();
        const std::size_t count = sz ? *sz : opt.n_cap;
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= count; ++n) {
            std::optional<Level> l;
            try {
                l = problem.levels.at(n);
            } catch (const Error& e) {
                c.passed = false;
                c.detail = "level " + std::to_string(n) + ": " + e.what();
                break;
            }
            if (!(l->score > prev)) {
                c.passed = false;
                c.detail = "levels not strictly increasing at n = " + std::to_string(n);
                break;
            }
            prev = l->score;
        }
        if (c.passed) {
            c.detail = sz ? std::to_string(*sz) + " strictly increasing levels in (0,1); the last interval is [y_N, 1)"
                          : "level expression strictly increasing for n <= " + std::to_string(count) +
                                "; y_n -> 1 not verifiable numerically";
        }
        rep.checks.push_back(c);
    }
    {  // (As-r)
        AssumptionCheck c{"As-r", false, ""};
        try {
            const auto rr = transform_reference(coeffs, problem.r, H, problem.mu0, opt.grid);
            c.passed = rr.ok();
            c.detail = rr.summary();
        } catch (const DomainError& e) {
            c.detail = std::string("r(t) outside U_t: ") + e.what();
        }
        rep.checks.push_back(c);
    }
    {  // (As-beta_n)
        AssumptionCheck c{"As-beta_n", true, ""};
        std::size_t n_max = opt.n_cap;
        if (auto a = coeffs.alpha().size()) n_max = std::min(n_max, *a);
        if (auto l = problem.levels.size()) n_max = std::min(n_max, *l + 1);
        const double W = std::min(opt.check_window, H);
        const auto pts = static_cast<std::size_t>(std::min<double>(
            static_cast<double>(opt.grid.max_dense_points), std::ceil(opt.grid.density * W) + 1.0));
        for (std::size_t n = 1; n <= n_max; ++n) {
            const auto b = classify_band(coeffs, n, 0.0, W, std::max<std::size_t>(pts, 2), opt.strict_margin);
            if (b.band != Band::UpStrict) {
                c.passed = false;
                c.detail = "regime " + std::to_string(n) + " is " + to_string(b.band) + " (margin " + fmt(b.margin) +
                           ")" + (b.detail.empty() ? "" : ": " + b.detail);
                break;
            }
        }
        if (c.passed) {
            c.detail = "regimes 1.." + std::to_string(n_max) + " strictly inside the up band on [0, " + fmt(W) +
                       "] (" + std::to_string(pts) + " points each)";
        }
        rep.checks.push_back(c);
    }
    const auto glob = check_globality(problem);
    rep.notes.push_back(std::string("globality: ") + (glob ? "bounded family, C = " + fmt(glob.value) : "not certified") +
                        "; " + glob.detail);
    const auto bij = check_bijectivity(problem);
    rep.notes.push_back(std::string("bijectivity: ") + (bij ? "inf alpha^2 > 0" : "not certified") + "; " + bij.detail);
    return rep;
}

}  // namespace rsde
