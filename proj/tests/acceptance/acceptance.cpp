// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "regime_sde/builtin.hpp"
#include "regime_sde/errors.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/monte_carlo.hpp"
#include "regime_sde/normal.hpp"
#include "regime_sde/pathology.hpp"
#include "regime_sde/regime_solver.hpp"
#include "regime_sde/transform.hpp"

using namespace rsde;

namespace {

const TimeFunction t_ = TimeFunction::time();
TimeFunction C(double v) { return TimeFunction::constant(v); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %s  %s: %s [%.3f s, limit %.0f s%s]\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(), secs,
                limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

std::string g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

std::vector<ProblemSpec> builtins() {
    return {builtin::gaussian(), builtin::linear(), builtin::logdrift(), builtin::oscillation(),
            builtin::explosion(LevelSet::probabilities({0.6}))};
}

Outcome ac1() {
    double worst = 0.0;
    std::size_t points = 0;
    bool additive = false, multiplicative = false;
    for (const auto& p : builtins()) {
        additive |= p.coeffs.mode() == DiffusionMode::Additive;
        multiplicative |= p.coeffs.mode() == DiffusionMode::Multiplicative;
        for (double t : linspace(0.0, 5.0, 100)) {
            const double lower = domain_bound(p.coeffs, t).lower;
            for (int i = 0; i < 100; ++i) {
                // log-spaced offsets above the boundary, or a symmetric range
                const double x = std::isfinite(lower) ? lower + std::pow(10.0, -6.0 + 0.1 * i)
                                                      : -50.0 + 100.0 * i / 99.0;
                const double err = std::abs(inverse(p.coeffs, t, forward(p.coeffs, t, x)) - x) /
                                   std::max(1.0, std::abs(x));
                worst = std::max(worst, err);
                ++points;
            }
        }
    }
    return {worst <= 1e-12 && additive && multiplicative,
            "max relative round-trip error " + g(worst) + " over " + std::to_string(points) + " points"};
}

Outcome ac2() {
    double worst = 0.0;
    const auto grid = linspace(0.0, 10.0, 1000);
    const auto gauss = builtin::gaussian();
    const auto lin = builtin::linear();
    const auto logd = builtin::logdrift();
    for (std::size_t n = 1; n <= 4; ++n) {
        for (double t : grid) {
            // a/c² with a = −0.4c²
            const double a33 = -0.4;
            const double al = lin.coeffs.alpha().at(n)(t);
            const double a34 = 0.1 + 0.05 * std::exp(-t) - 0.5 * al * al;
            const double c = std::exp(-t);
            const double a5 = logd.coeffs.alpha().at(std::min<std::size_t>(n, 2))(t);
            const double a35 = -c / (c * c) - 0.5 * a5 * a5 * c;
            auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
            worst = std::max(worst, rel(beta_n(gauss.coeffs, n, t), a33));
            worst = std::max(worst, rel(beta_n(lin.coeffs, n, t), a34));
            worst = std::max(worst, rel(beta_n(logd.coeffs, std::min<std::size_t>(n, 2), t), a35));
        }
    }
    return {worst <= 1e-12, "max relative gap to closed forms " + g(worst)};
}

Outcome ac3() {
    double worst = 0.0;
    for (const auto& p : builtins()) worst = std::max(worst, check_drift_ode(p.coeffs).max_residual);
    const auto lin = builtin::linear();
    const auto perturbed = check_drift_ode(lin.coeffs, [&](double t, double x) { return eval_b(lin.coeffs, t, x) + 0.1; });
    const auto gauss = builtin::gaussian();
    const auto perturbed_add =
        check_drift_ode(gauss.coeffs, [&](double t, double x) { return eval_b(gauss.coeffs, t, x) + 0.1 * x; });
    const double bad = std::min(perturbed.max_residual, perturbed_add.max_residual);
    return {worst <= 1e-6 && bad >= 0.05, "built-in residual " + g(worst) + ", perturbed residual " + g(bad)};
}

Outcome ac4() {
    const auto alpha = 1.0 + 0.5 * exp(-t_);
    const LawCurve up(0.1, 0.8, 0.0, 0.0, 0.0, alpha, -0.35 * alpha * alpha, ReferenceCurve::constant(0.1));
    const LawCurve down(0.1, 0.8, 0.0, 0.0, 0.0, alpha, 0.35 * alpha * alpha, ReferenceCurve::constant(0.1));
    std::size_t checked = 0, mismatches = 0;
    const double h = 1e-6;
    for (const LawCurve* c : {&up, &down}) {
        for (int i = 1; i <= 1000; ++i) {
            const double t = 5.0 * i / 1000.0;
            const auto s = c->phi_slope_sign(t);
            if (std::abs(s.g) <= 1e-8) continue;
            ++checked;
            const double d = c->phi(t + h) - c->phi(t - h);
            if ((d > 0) != (s.g > 0) || d == 0.0) ++mismatches;
        }
    }
    return {mismatches == 0 && checked >= 1000,
            std::to_string(mismatches) + " sign mismatches at " + std::to_string(checked) + " probes"};
}

Outcome ac5() {
    const auto times = builtin::finite_times(200);
    const auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(times)));
    const auto s = build_schedule(p);
    const auto bps = s.breakpoints();
    if (bps.size() != 201) return {false, std::to_string(bps.size()) + " breakpoints"};
    double t_err = 0.0, v_err = 0.0, F = 0.0;
    for (std::size_t n = 1; n <= 200; ++n) {
        t_err = std::max(t_err, std::abs(bps[n] - times[n - 1]));
        F += 1.0 / (n + 1.0);
        v_err = std::max(v_err, std::abs(s.mean_var(bps[n]).var - (1.0 + 2.0 * F)));
    }
    const double est = s.tmax_estimate.value_or(INFINITY);
    const bool ok = t_err <= 1e-8 && v_err <= 1e-10 && s.status == ScheduleStatus::FiniteTmax &&
                    std::abs(est - 1.0) <= 1e-3;
    return {ok, "max |T_n - n/(n+1)| " + g(t_err) + ", max variance error " + g(v_err) + ", status " +
                    to_string(s.status) + ", T_max estimate " + std::to_string(est)};
}

Outcome ac6() {
    const auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(builtin::global_times(20))));
    const auto s = build_schedule(p);
    const auto bps = s.breakpoints();
    if (bps.size() != 21) return {false, std::to_string(bps.size()) + " breakpoints"};
    double err = 0.0;
    for (std::size_t n = 1; n <= 20; ++n) err = std::max(err, std::abs(bps[n] - double(n)));
    return {err <= 1e-8 && s.status != ScheduleStatus::FiniteTmax,
            "max |T_n - n| " + g(err) + ", status " + to_string(s.status)};
}

Outcome ac7() {
    const auto ex = builtin::explosion(LevelSet::probabilities({0.6}));
    const bool glob_false = !check_globality(ex).holds;
    const bool bij_true = check_bijectivity(ex).holds;
    bool finite_lists = true, bound_ok = true;
    std::size_t checked = 0;
    auto random_list = builtin::gaussian();
    random_list.coeffs = CoefficientSet::additive(C(1.0), C(-0.3),
                                                  AlphaFamily::list({C(3.0), 2.0 + sqrt(1.0 + t_), C(0.5), C(7.0)}));
    for (const auto& p : {builtin::gaussian(), builtin::linear(), builtin::oscillation(), random_list}) {
        finite_lists &= check_globality(p).holds;
    }
    for (const auto& p : {builtin::gaussian(), builtin::linear()}) {
        const auto s = build_schedule(p);
        const auto rep = check_lower_bound(s, p.sigma0_sq, check_globality(p).value);
        bound_ok &= rep.holds && rep.checked > 0;
        checked += rep.checked;
    }
    return {glob_false && bij_true && finite_lists && bound_ok,
            std::string("sqrt(2n): globality ") + (glob_false ? "false" : "true") + ", bijectivity " +
                (bij_true ? "true" : "false") + "; finite lists global: " + (finite_lists ? "yes" : "no") +
                "; lower bound at " + std::to_string(checked) + " breakpoints: " + (bound_ok ? "holds" : "fails")};
}

Outcome ac8() {
    const auto p = builtin::gaussian();
    const auto s = build_schedule(p);
    const std::size_t N = 100000;
    const auto times = linspace(0.05, 4.0, 20);
    const TimeFunction rho = reference_expression(p.coeffs, p.r);
    const auto a = simulate_exact(s, p.mu0, p.sigma0_sq, N, times, 20240521);
    double worst_ratio = 0.0;
    for (double t : times) {
        const double phi = s.phi(t);
        const double bound = 4.0 * std::sqrt(phi * (1 - phi) / N);
        worst_ratio = std::max(worst_ratio, std::abs(empirical_phi(a, t, rho(t)) - phi) / bound);
    }
    auto csv = [&](const PathBatch& b) {
        std::ostringstream os;
        summarize(b, [&](double t) { return rho(t); }, p.levels).write_csv(os);
        return os.str();
    };
    const auto b = simulate_exact(s, p.mu0, p.sigma0_sq, N, times, 20240521);
    const bool same = csv(a) == csv(b) && a.states == b.states;
    return {worst_ratio <= 1.0 && same, "max |phi_hat - phi| / (4 binomial SE) = " + g(worst_ratio) +
                                            "; repeated run " + (same ? "byte-identical" : "differs")};
}

Outcome ac9() {
    // constants by direct substitution into the band inequalities
    const double a = 1.0, b = 0.375;
    bool constants = 0.25 * a * a < b && b < 0.5 * a * a && -0.5 * a * a < -b && -b < -0.25 * a * a;
    const double bb = 0.9, a1 = 2.0, a2 = 1.0;
    constants &= 0 < bb && bb < 0.25 * a1 * a1 && 0.75 * a2 * a2 < bb && bb < a2 * a2;
    constants &= std::abs((bb - 0.5 * a1 * a1) - (-1.1)) < 1e-15 && std::abs((bb - 0.5 * a2 * a2) - 0.4) < 1e-15;

    const bool verdicts = classify_level(builtin::two_solutions()).kind == VerdictKind::TwoSolutions &&
                          classify_level(builtin::infinitely_many()).kind == VerdictKind::InfinitelyMany &&
                          classify_level(builtin::no_local_solution()).kind == VerdictKind::NoLocalSolution;
    const auto br = construct_branches(builtin::two_solutions());
    const double p1 = br.decreasing.phi(1.0), p2 = br.increasing.phi(1.0);
    const bool branches = br.verified && std::abs(p1 - std::erfc(0.375 / 2.0) / 2.0) <= 1e-6 &&
                          std::abs(p2 - (1.0 - std::erfc(0.375 / 2.0) / 2.0)) <= 1e-6 &&
                          std::abs(p1 + p2 - 1.0) <= 1e-12;
    const auto osc = LevelProblem::from_problem(builtin::oscillation());
    const bool osc_verdict = classify_level(osc).kind == VerdictKind::NoLocalSolution;
    const auto rep = oscillation_probe(osc, 1e-3, 1000, 10000, 20240521);
    const bool flips = rep.flips >= 100;
    return {constants && verdicts && branches && osc_verdict && flips,
            std::string("constants ") + (constants ? "ok" : "bad") + ", verdicts " + (verdicts ? "ok" : "bad") +
                ", phi_1(1) = " + std::to_string(p1) + ", phi_2(1) = " + std::to_string(p2) + ", sum - 1 = " +
                g(p1 + p2 - 1.0) + ", oscillation " + to_string(classify_level(osc).kind) + " with " +
                std::to_string(rep.flips) + " flips"};
}

Outcome ac10() {
    bool identical = true;
    for (const auto& p : {builtin::gaussian(), builtin::linear(),
                          builtin::explosion(LevelSet::scores(builtin::explosion_scores(builtin::finite_times(200))))}) {
        identical &= build_schedule(p).breakpoints() == build_schedule(p).breakpoints();
    }
    auto p = builtin::gaussian();
    p.levels = LevelSet::probabilities({0.45, 0.6, 0.7});
    const auto re = build_schedule(p);
    const bool consistent = re.start_index == 2 && verify_schedule(re, p.levels).ok();
    // without re-indexing the first crossing is immediate; the remaining breakpoints must agree
    auto q = p;
    q.solver.reindex = false;
    const auto raw = build_schedule(q);
    std::vector<double> a, b;
    for (double t : re.breakpoints()) if (t > 0.0) a.push_back(t);
    for (double t : raw.breakpoints()) if (t > 0.0) b.push_back(t);
    const bool agree = a == b;
    return {identical && consistent && agree, std::string("repeat runs ") + (identical ? "bitwise identical" : "differ") +
                                                  ", re-indexed start " + std::to_string(re.start_index) + " " +
                                                  (consistent ? "consistent" : "inconsistent") +
                                                  ", matches the unindexed run: " + (agree ? "yes" : "no")};
}

}  // namespace

int main() {
    run("AC1", "transform round trip", 1, ac1);
    run("AC2", "beta_n closed forms", 1, ac2);
    run("AC3", "drift ODE residual", 1, ac3);
    run("AC4", "slope sign oracle", 1, ac4);
    run("AC5", "explosion, finite T_max", 10, ac5);
    run("AC6", "explosion, global", 5, ac6);
    run("AC7", "globality and bijectivity", 1, ac7);
    run("AC8", "Monte Carlo consistency", 30, ac8);
    run("AC9", "pathologies", 60, ac9);
    run("AC10", "uniqueness signature", 5, ac10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
