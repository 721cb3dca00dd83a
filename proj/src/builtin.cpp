#include "regime_sde/builtin.hpp"

#include <cmath>

namespace rsde::builtin {

namespace {
const TimeFunction t = TimeFunction::time();
TimeFunction C(double v) { return TimeFunction::constant(v); }
}  // namespace

ProblemSpec gaussian() {
    const TimeFunction c = 1.0 + 0.5 * (1.0 - exp(-t));
    const TimeFunction a = -0.4 * c * c;
    auto coeffs = CoefficientSet::additive(c, a / c, AlphaFamily::list({C(1.0), C(1.2), C(1.1), C(1.25)}));
    ProblemSpec p{"gaussian-3.3", coeffs, 0.0, 1.0, C(0.0), LevelSet::probabilities({0.6, 0.7, 0.8})};
    p.solver.horizon = 1e3;
    return p;
}

ProblemSpec linear() {
    const TimeFunction b = 0.1 + 0.05 * exp(-t);
    std::vector<TimeFunction> alphas;
    for (int n = 1; n <= 5; ++n) alphas.push_back(C(1.0 + 0.1 * n));
    auto coeffs = CoefficientSet::multiplicative(C(1.0), C(0.0), b, AlphaFamily::list(alphas));
    ProblemSpec p{"linear-3.4", coeffs, 0.0, 1.0, C(1.0), LevelSet::probabilities({0.6, 0.7, 0.8, 0.9})};
    p.solver.horizon = 1e3;
    return p;
}

ProblemSpec logdrift() {
    const TimeFunction c = exp(-t);
    auto coeffs = CoefficientSet::multiplicative(c, C(0.0), C(0.0), AlphaFamily::list({C(1.0), C(1.5)}));
    // r = exp(t − e^{−2t}) makes ρ(t) = log(c r)/c = −e^{−t}
    ProblemSpec p{"logdrift-3.5", coeffs, 0.0, 1.0, exp(t - exp(-2.0 * t)), LevelSet::probabilities({0.6})};
    p.solver.horizon = 10.0;
    p.solver.check_window = 2.0;
    return p;
}

ProblemSpec oscillation() {
    auto coeffs = CoefficientSet::multiplicative(C(1.0), C(0.0), C(0.9), AlphaFamily::list({C(2.0), C(1.0)}));
    ProblemSpec p{"oscillation-5.4", coeffs, 0.0, 1.0, C(1.0), LevelSet::probabilities({0.5})};
    p.solver.horizon = 10.0;
    p.simulation.dt = 1e-3;
    p.simulation.T = 1.0;
    return p;
}

ProblemSpec explosion(LevelSet levels) {
    auto coeffs = CoefficientSet::multiplicative(C(1.0), C(0.0), C(0.0),
                                                 AlphaFamily::parametric(sqrt(2.0 * TimeFunction::index())));
    ProblemSpec p{"explosion-4.6", coeffs, 0.0, 1.0, C(1.0), std::move(levels)};
    return p;
}

std::vector<double> explosion_scores(const std::vector<double>& times) {
    std::vector<double> z;
    double F = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        F += static_cast<double>(k + 1) * (times[k] - prev);
        prev = times[k];
        z.push_back(F / std::sqrt(1.0 + 2.0 * F));
    }
    return z;
}

std::vector<double> finite_times(std::size_t count) {
    std::vector<double> out;
    for (std::size_t n = 1; n <= count; ++n) out.push_back(static_cast<double>(n) / static_cast<double>(n + 1));
    return out;
}

std::vector<double> global_times(std::size_t count) {
    std::vector<double> out;
    for (std::size_t n = 1; n <= count; ++n) out.push_back(static_cast<double>(n));
    return out;
}

TimeFunction global_score_expression() {
    const TimeFunction n = TimeFunction::index();
    const TimeFunction F = 0.5 * n * (n + 1.0);
    return F / sqrt(1.0 + 2.0 * F);
}

}  // namespace rsde::builtin
