// regime-sde: command-line front end.
//
// Exit codes: 0 ok, 1 assumption check failed, 2 parse/schema error,
// 3 solver error, 4 simulation error, 5 unknown demo.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regime_sde/builtin.hpp"
#include "regime_sde/errors.hpp"
#include "regime_sde/grid.hpp"
#include "regime_sde/monte_carlo.hpp"
#include "regime_sde/normal.hpp"
#include "regime_sde/pathology.hpp"
#include "regime_sde/problem_io.hpp"
#include "regime_sde/regime_solver.hpp"
#include "regime_sde/transform.hpp"

using namespace rsde;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kParse = 2, kSolver = 3, kSimulation = 4, kUnknownDemo = 5 };

struct Flags {
    std::string out;
    std::size_t points = 256;
    std::optional<double> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> particles;
    std::optional<double> dt;
    std::optional<double> T;
    bool force = false;
    std::string mode = "exact";
    std::string coords = "transformed";
    bool raw_euler = false;
    std::string emit_problem;
};

struct Failure {
    int code;
    std::string message;
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void apply_overrides(ProblemSpec& p, const Flags& f) {
    if (f.horizon) p.solver.horizon = *f.horizon;
    if (f.seed) p.simulation.seed = *f.seed;
    if (f.particles) p.simulation.particles = *f.particles;
    if (f.dt) p.simulation.dt = *f.dt;
    if (f.T) p.simulation.T = *f.T;
}

ProblemFile load(const std::string& path, const Flags& f) {
    ProblemFile file = load_problem(path);
    apply_overrides(file.spec, f);
    file.spec.validate();
    return file;
}

void write_file(const std::string& path, const std::string& content) {
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{kParse, "cannot write " + path};
    out << content;
}

void print_report(const AssumptionReport& rep) {
    for (const auto& c : rep.checks) {
        std::printf("%s %-9s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    for (const auto& n : rep.notes) std::printf("note      %s\n", n.c_str());
}

Schedule solve_or_fail(const ProblemSpec& p) {
    try {
        return build_schedule(p);
    } catch (const Error& e) {
        throw Failure{kSolver, std::string("build_schedule failed: ") + e.what()};
    }
}

void print_schedule(const Schedule& s, std::size_t show = 6) {
    const auto bps = s.breakpoints();
    std::printf("status: %s\n", to_string(s.status).c_str());
    std::printf("start regime: %zu\n", s.start_index);
    std::printf("breakpoints (%zu):", bps.size() > 0 ? bps.size() - 1 : 0);
    for (std::size_t i = 1; i < bps.size(); ++i) {
        if (i <= show || i + 2 > bps.size()) {
            std::printf(" %s", num(bps[i]).c_str());
        } else if (i == show + 1) {
            std::printf(" ...");
        }
    }
    std::printf("\n");
    if (s.tmax_estimate) std::printf("T_max estimate: %s\n", num(*s.tmax_estimate).c_str());
    for (const auto& n : s.notes) std::printf("note: %s\n", n.c_str());
}

void emit_schedule(const Schedule& s, const Flags& f) {
    if (f.out.empty()) return;
    std::ostringstream csv;
    s.write_curve_csv(csv, f.points);
    write_file(f.out + ".json", s.to_json().dump(2) + "\n");
    write_file(f.out + ".csv", csv.str());
    std::printf("wrote %s.json and %s.csv\n", f.out.c_str(), f.out.c_str());
}

// ---------------------------------------------------------------------------
// commands

int cmd_check(const std::string& path, const Flags& f) {
    const auto file = load(path, f);
    const auto rep = check_assumptions(file.spec);
    std::printf("problem: %s\n", file.spec.name.c_str());
    print_report(rep);
    return rep.all_passed() ? kOk : kCheckFailed;
}

int cmd_solve(const std::string& path, const Flags& f) {
    const auto file = load(path, f);
    if (!f.force) {
        const auto rep = check_assumptions(file.spec);
        if (!rep.all_passed()) {
            print_report(rep);
            std::fprintf(stderr, "assumption check failed; rerun with --force to solve anyway\n");
            return kCheckFailed;
        }
    }
    const auto s = solve_or_fail(file.spec);
    print_schedule(s);
    emit_schedule(s, f);
    return kOk;
}

double max_phi_error(const Schedule& s, const EmpiricalCurve& c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        if (c.times[i] > s.span_end()) break;
        worst = std::max(worst, std::abs(c.phi_hat[i] - s.phi(c.times[i])));
    }
    return worst;
}

int cmd_simulate(const std::string& path, const Flags& f) {
    const auto file = load(path, f);
    const auto& p = file.spec;
    Coordinates coords;
    if (f.coords == "transformed") {
        coords = Coordinates::Transformed;
    } else if (f.coords == "original") {
        coords = Coordinates::Original;
    } else {
        throw Failure{kParse, "--coords must be transformed or original"};
    }
    EmpiricalCurve curve;
    std::optional<Schedule> sched;
    if (f.mode == "exact") {
        sched = solve_or_fail(p);
        try {
            const double T = std::min(p.simulation.T, sched->span_end());
            const auto times = linspace(0.0, T, std::max<std::size_t>(2, p.simulation.output_points));
            auto batch = simulate_exact(*sched, p.mu0, p.sigma0_sq, p.simulation.particles, times, p.simulation.seed);
            const TimeFunction rho = reference_expression(p.coeffs, p.r);
            std::function<double(double)> threshold = [&](double t) { return rho(t); };
            if (coords == Coordinates::Original) {
                batch = transform_batch(p.coeffs, batch, Coordinates::Original);
                threshold = [&](double t) { return p.r(t); };
            }
            curve = summarize(batch, threshold, p.levels, p.solver.max_regimes);
        } catch (const Error& e) {
            throw Failure{kSimulation, std::string("simulate_exact failed: ") + e.what()};
        }
    } else if (f.mode == "particles") {
        auto opts = ParticleOptions::from(p.simulation, coords);
        opts.raw_euler = f.raw_euler;
        try {
            curve = simulate_particles(p, opts).curve;
        } catch (const Error& e) {
            throw Failure{kSimulation, std::string("simulate_particles failed: ") + e.what()};
        }
        try {
            sched = build_schedule(p);
        } catch (const Error&) {
            std::printf("no analytic schedule for comparison\n");
        }
    } else {
        throw Failure{kParse, "--mode must be exact or particles"};
    }
    std::ostringstream csv;
    curve.write_csv(csv);
    if (f.out.empty()) {
        std::cout << csv.str();
    } else {
        write_file(f.out, csv.str());
        std::printf("wrote %s\n", f.out.c_str());
    }
    if (sched) std::fprintf(stderr, "max |phi_hat - phi| = %s\n", num(max_phi_error(*sched, curve)).c_str());
    return kOk;
}

int cmd_classify(const std::string& path, const Flags& f) {
    const auto file = load(path, f);
    LevelProblem lp = [&] {
        if (file.level_problem) return *file.level_problem;
        try {
            return LevelProblem::from_problem(file.spec);
        } catch (const Error& e) {
            throw Failure{kParse, std::string("no level problem: ") + e.what()};
        }
    }();
    try {
        lp.validate();
    } catch (const Error& e) {
        throw Failure{kParse, std::string("level_problem: ") + e.what()};
    }
    const auto v = classify_level(lp);
    std::fprintf(stderr, "verdict: %s\n", to_string(v.kind).c_str());
    std::cout << v.to_json().dump(2) << '\n';
    if (!f.out.empty()) write_file(f.out, v.to_json().dump(2) + "\n");
    return kOk;
}

// ---------------------------------------------------------------------------
// demos

void demo_header(const std::string& name, const std::string& what) {
    std::printf("== %s ==\nreproduces: %s\n", name.c_str(), what.c_str());
}

void emit_problem(const Flags& f, const ProblemSpec& p, const std::optional<LevelProblem>& lp = {}) {
    if (f.emit_problem.empty()) return;
    write_file(f.emit_problem, problem_to_json(p, lp).dump(2) + "\n");
    std::printf("problem file written to %s\n", f.emit_problem.c_str());
}

using ClosedForm = std::function<double(std::size_t n, double t)>;

int demo_regular(ProblemSpec p, const Flags& f, const std::string& what, const std::string& beta_text,
                 const ClosedForm& beta_closed) {
    apply_overrides(p, f);
    demo_header(p.name, what);
    emit_problem(f, p);
    double worst = 0.0;
    const std::size_t regimes = p.coeffs.alpha().size().value_or(4);
    for (std::size_t n = 1; n <= regimes; ++n) {
        for (double t : linspace(0.0, 5.0, 1001)) {
            const double want = beta_closed(n, t);
            worst = std::max(worst, std::abs(beta_n(p.coeffs, n, t) - want) / std::max(1.0, std::abs(want)));
        }
    }
    std::printf("beta_n closed form: %s; max relative gap to the generic formula = %s\n", beta_text.c_str(),
                num(worst).c_str());
    const auto rep = check_assumptions(p);
    print_report(rep);
    if (!rep.all_passed() && !f.force) {
        std::printf("assumptions fail on the grid; the solver is not run (use --force)\n");
        return kOk;
    }
    const auto s = solve_or_fail(p);
    print_schedule(s);
    const auto chk = verify_schedule(s, p.levels);
    std::printf("schedule check: %zu probes, %zu indicator violations, max |f(T_n) - z_n| = %s\n", chk.probes,
                chk.indicator_violations, num(chk.max_score_error).c_str());
    emit_schedule(s, f);
    return kOk;
}

int demo_explosion(bool finite, const Flags& f) {
    const std::size_t count = finite ? 200 : 20;
    const auto times = finite ? builtin::finite_times(count) : builtin::global_times(count);
    auto p = builtin::explosion(LevelSet::scores(builtin::explosion_scores(times)));
    p.name = finite ? "explosion-4.6-finite" : "explosion-4.6-global";
    apply_overrides(p, f);
    demo_header(p.name, finite ? "alpha_n = sqrt(2n), levels from t_n = n/(n+1): T_max = lim n/(n+1) = 1"
                               : "alpha_n = sqrt(2n), levels from t_n = n: the schedule has no accumulation point");
    emit_problem(f, p);
    const auto g = check_globality(p);
    std::printf("globality (sup alpha_n^2 bounded): %s  %s\n", g.holds ? "yes" : "no", g.detail.c_str());
    const auto b = check_bijectivity(p);
    std::printf("bijectivity (inf alpha_n^2 > 0): %s  %s\n", b.holds ? "yes" : "no", b.detail.c_str());
    const auto s = solve_or_fail(p);
    print_schedule(s);
    const auto bps = s.breakpoints();
    double worst = 0.0;
    for (std::size_t n = 1; n < bps.size() && n <= count; ++n) worst = std::max(worst, std::abs(bps[n] - times[n - 1]));
    std::printf("max |T_n - t_n| = %s\n", num(worst).c_str());
    if (finite) {
        std::printf("T_max ~ %s\n", s.tmax_estimate ? num(*s.tmax_estimate).c_str() : "inf");
        const auto vd = variance_divergence_diagnostic(s);
        std::printf("variance at breakpoints: %s\n", vd.detail.c_str());
    }
    emit_schedule(s, f);
    return kOk;
}

// Problem files need a full problem; the level problem section is what
// classify reads.
ProblemSpec carrier(const std::string& name) {
    auto p = builtin::oscillation();
    p.name = name;
    return p;
}

int demo_two_solutions(const Flags& f) {
    const auto lp = builtin::two_solutions();
    demo_header("two-solutions-5.1", "alpha = 1, beta_low = 3/8, beta_high = -3/8 at y = 1/2: exactly two solutions");
    emit_problem(f, carrier("two-solutions-5.1"), lp);
    const auto v = classify_level(lp);
    std::printf("verdict: %s\n", to_string(v.kind).c_str());
    const auto br = construct_branches(lp);
    std::printf("branch check at %zu probes: %s\n", br.probes, br.verified ? "ok" : br.detail.c_str());
    const double p1 = br.decreasing.phi(1.0), p2 = br.increasing.phi(1.0);
    std::printf("phi_1(1) = %.12f  (Phi(-3/8/sqrt 2) = %.12f)\n", p1, std_normal_cdf(-0.375 / std::sqrt(2.0)));
    std::printf("phi_2(1) = %.12f  (Phi(+3/8/sqrt 2) = %.12f)\n", p2, std_normal_cdf(0.375 / std::sqrt(2.0)));
    std::printf("phi_1(1) + phi_2(1) - 1 = %.3e\n", p1 + p2 - 1.0);
    if (!f.out.empty()) write_file(f.out + ".json", br.to_json().dump(2) + "\n");
    return kOk;
}

int demo_infinite(const Flags& f) {
    const auto lp = builtin::infinitely_many();
    demo_header("infinite-5.2", "alpha_high = beta_high = 0: a delayed start w gives a solution for every w >= 0");
    emit_problem(f, carrier("infinite-5.2"), lp);
    std::printf("verdict: %s\n", to_string(classify_level(lp).kind).c_str());
    std::printf("%6s %14s %14s %14s\n", "w", "phi(0.5)", "phi(1)", "phi(2)");
    for (double w : {0.0, 0.5, 1.0, 1.5}) {
        const auto s = construct_delay_family(lp, w);
        std::printf("%6.2f %14.10f %14.10f %14.10f\n", w, s.phi(0.5), s.phi(1.0), s.phi(2.0));
    }
    std::printf("w = 1: phi(2) = Phi(Phi^-1(1/2) - 3/8/sqrt 2) = %.10f\n",
                std_normal_cdf(std_normal_quantile(0.5) - 0.375 / std::sqrt(2.0)));
    return kOk;
}

int demo_oscillation(const Flags& f) {
    auto spec = builtin::oscillation();
    apply_overrides(spec, f);
    const auto lp = LevelProblem::from_problem(spec);
    demo_header("oscillation-5.4", "b = 0.9, alpha_1 = 2, alpha_2 = 1: no solution on [0, delta) for any delta");
    emit_problem(f, spec, lp);
    std::printf("beta_1 = %s, beta_2 = %s\n", num(lp.beta_low(0.0)).c_str(), num(lp.beta_high(0.0)).c_str());
    std::printf("verdict: %s\n", to_string(classify_level(lp).kind).c_str());
    try {
        const auto s = build_schedule(spec);
        const auto chk = verify_schedule(s, spec.levels);
        std::printf("solver: start regime %zu, %zu of %zu probes violate the indicator constraint\n", s.start_index,
                    chk.indicator_violations, chk.probes);
    } catch (const MonotonicityError& e) {
        std::printf("solver: %s\n", e.what());
    }
    const double dt = spec.simulation.dt;
    const auto steps = static_cast<std::size_t>(std::llround(spec.simulation.T / dt));
    OscillationComparison cmp;
    try {
        cmp = oscillation_compare(lp, dt, steps, spec.simulation.particles, spec.simulation.seed);
    } catch (const Error& e) {
        throw Failure{kSimulation, std::string("oscillation_probe failed: ") + e.what()};
    }
    for (const auto* r : {&cmp.coarse, &cmp.fine}) {
        std::printf("dt = %-8s steps = %-6zu N = %-6zu flips = %-5zu max |phi_hat - y| = %-10s mean = %s\n",
                    num(r->dt).c_str(), r->steps, r->particles, r->flips, num(r->max_excursion).c_str(),
                    num(r->mean_excursion).c_str());
    }
    std::printf("flips >= steps/10: %s; mean excursion does not grow as dt halves: %s\n",
                cmp.coarse.flips_ok() ? "yes" : "no", cmp.excursion_shrinks() ? "yes" : "no");
    if (!f.out.empty()) {
        std::ostringstream csv;
        cmp.coarse.write_csv(csv);
        write_file(f.out + ".csv", csv.str());
    }
    return kOk;
}

int cmd_demo(const std::string& name, const Flags& f) {
    if (name == "gaussian-3.3") {
        return demo_regular(builtin::gaussian(), f, "Gaussian SDE sigma_2 = c, b = (c'/c)x + a/c", "a/c^2 = -0.4",
                            [](std::size_t, double) { return -0.4; });
    }
    if (name == "linear-3.4") {
        const auto p = builtin::linear();
        return demo_regular(p, f, "linear SDE sigma_1 = 1, b(t, x) = b(t)x", "b - alpha_n^2/2",
                            [p](std::size_t n, double t) {
                                const double a = p.coeffs.alpha().at(n)(t);
                                return 0.1 + 0.05 * std::exp(-t) - 0.5 * a * a;
                            });
    }
    if (name == "logdrift-3.5") {
        const auto p = builtin::logdrift();
        return demo_regular(p, f, "sigma_1 = c(t), b = (c'/c)x log(cx)", "c'/c^2 - alpha_n^2 c/2",
                            [p](std::size_t n, double t) {
                                const double c = std::exp(-t), a = p.coeffs.alpha().at(n)(t);
                                return -c / (c * c) - 0.5 * a * a * c;
                            });
    }
    if (name == "explosion-4.6-finite") return demo_explosion(true, f);
    if (name == "explosion-4.6-global") return demo_explosion(false, f);
    if (name == "two-solutions-5.1") return demo_two_solutions(f);
    if (name == "infinite-5.2") return demo_infinite(f);
    if (name == "oscillation-5.4") return demo_oscillation(f);
    std::fprintf(stderr, "unknown demo '%s'\n", name.c_str());
    return kUnknownDemo;
}

const std::vector<std::string> kDemos = {"gaussian-3.3",         "linear-3.4",        "logdrift-3.5",
                                         "explosion-4.6-finite", "explosion-4.6-global", "two-solutions-5.1",
                                         "infinite-5.2",         "oscillation-5.4"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regime-switching SDEs driven by their own law"};
    app.require_subcommand(1);
    Flags f;
    std::string path, demo;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--horizon", f.horizon, "solver horizon");
        sub->add_option("--seed", f.seed, "RNG seed");
        sub->add_option("--particles", f.particles, "number of particles");
        sub->add_option("--dt", f.dt, "time step");
        sub->add_option("--T", f.T, "simulation end time");
        sub->add_option("--out", f.out, "output path or prefix");
        sub->add_option("--points", f.points, "curve points per interval")->capture_default_str();
        sub->add_flag("--force", f.force, "run even when assumptions fail");
    };

    auto* check = app.add_subcommand("check", "check the standing assumptions");
    check->add_option("problem", path, "problem file")->required();
    common(check);
    auto* solve = app.add_subcommand("solve", "build the regime schedule");
    solve->add_option("problem", path, "problem file")->required();
    common(solve);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
    simulate->add_option("problem", path, "problem file")->required();
    simulate->add_option("--mode", f.mode, "exact | particles")->capture_default_str();
    simulate->add_option("--coords", f.coords, "transformed | original")->capture_default_str();
    simulate->add_flag("--raw-euler", f.raw_euler, "Euler steps on X itself (original coordinates)");
    common(simulate);
    auto* classify = app.add_subcommand("classify", "classify a single-level problem");
    classify->add_option("problem", path, "problem file")->required();
    common(classify);
    auto* demos = app.add_subcommand("demo", "run a built-in example");
    demos->add_option("name", demo, "one of: gaussian-3.3 linear-3.4 logdrift-3.5 explosion-4.6-finite "
                                    "explosion-4.6-global two-solutions-5.1 infinite-5.2 oscillation-5.4");
    demos->add_option("--emit-problem", f.emit_problem, "write the demo problem file");
    demos->add_flag("--list", "list demo names");
    common(demos);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }

    try {
        if (*check) return cmd_check(path, f);
        if (*solve) return cmd_solve(path, f);
        if (*simulate) return cmd_simulate(path, f);
        if (*classify) return cmd_classify(path, f);
        if (*demos) {
            if (demos->count("--list") > 0 || demo.empty()) {
                for (const auto& d : kDemos) std::printf("%s\n", d.c_str());
                return demo.empty() && demos->count("--list") == 0 ? kUnknownDemo : kOk;
            }
            return cmd_demo(demo, f);
        }
    } catch (const Failure& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.code;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kParse;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSolver;
    }
    return kOk;
}
