#include "regime_sde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "regime_sde/errors.hpp"
#include "regime_sde/grid.hpp"

namespace rsde {

std::string to_string(DiffusionMode mode) {
    return mode == DiffusionMode::Additive ? "additive" : "multiplicative";
}

std::string to_string(Band band) {
    switch (band) {
        case Band::Up: return "Up";
        case Band::UpStrict: return "UpStrict";
        case Band::Down: return "Down";
        case Band::DownStrict: return "DownStrict";
        case Band::Frozen: return "Frozen";
        case Band::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

// ---------------------------------------------------------------------------
// AlphaFamily

AlphaFamily AlphaFamily::list(std::vector<TimeFunction> alphas) {
    if (alphas.empty()) throw ParseError("alpha family list must not be empty");
    for (const auto& a : alphas) {
        if (a.depends_on_index()) throw ParseError("explicit alpha list entries must not use the symbol n");
    }
    AlphaFamily f;
    f.list_ = std::move(alphas);
    return f;
}

AlphaFamily AlphaFamily::parametric(TimeFunction expression) {
    AlphaFamily f;
    f.parametric_ = std::move(expression);
    return f;
}

TimeFunction AlphaFamily::at(std::size_t n) const {
    if (n == 0) throw RangeError("regime indices start at 1");
    if (parametric_) return parametric_->bind_index(static_cast<double>(n));
    if (n > list_.size()) {
        throw RegimeExhausted("alpha family has " + std::to_string(list_.size()) + " entries, regime " +
                                  std::to_string(n) + " requested",
                              n);
    }
    return list_[n - 1];
}

std::optional<std::size_t> AlphaFamily::size() const {
    if (parametric_) return std::nullopt;
    return list_.size();
}

nlohmann::json AlphaFamily::to_json() const {
    if (parametric_) return {{"expr", parametric_->to_json()}};
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& a : list_) arr.push_back(a.to_json());
    return {{"list", arr}};
}

AlphaFamily AlphaFamily::from_json(const nlohmann::json& j) {
    if (j.is_array()) {
        std::vector<TimeFunction> alphas;
        for (const auto& e : j) alphas.push_back(TimeFunction::from_json(e));
        return list(std::move(alphas));
    }
    if (j.is_object() && j.contains("list")) return from_json(j["list"]);
    if (j.is_object() && j.contains("expr")) return parametric(TimeFunction::from_json(j["expr"]));
    throw ParseError("alpha_family must be an array, {\"list\": [...]} or {\"expr\": ...}");
}

// ---------------------------------------------------------------------------
// CoefficientSet

CoefficientSet::CoefficientSet(DiffusionMode mode, TimeFunction sigma1, TimeFunction sigma2,
                               TimeFunction drift_param, AlphaFamily alpha)
    : mode_(mode),
      sigma1_(std::move(sigma1)),
      sigma2_(std::move(sigma2)),
      sigma1_prime_(sigma1_.derivative()),
      sigma2_prime_(sigma2_.derivative()),
      drift_param_(std::move(drift_param)),
      alpha_(std::move(alpha)) {
    for (const auto* f : {&sigma1_, &sigma2_, &drift_param_}) {
        if (f->depends_on_index()) throw ParseError("sigma1, sigma2 and the drift parameter must not use n");
    }
    if (mode_ == DiffusionMode::Additive) {
        drift_at_one_ = sigma2_prime_ / sigma2_ + drift_param_;
    } else {
        const TimeFunction s = sigma1_ + sigma2_;
        drift_at_one_ = (sigma1_prime_ * s * log(s) - sigma1_ * sigma2_prime_ + sigma1_prime_ * sigma2_) /
                            (sigma1_ * sigma1_) +
                        drift_param_ * s;
    }
}

CoefficientSet CoefficientSet::additive(TimeFunction sigma2, TimeFunction k, AlphaFamily alpha) {
    return CoefficientSet(DiffusionMode::Additive, TimeFunction::constant(0.0), std::move(sigma2), std::move(k),
                          std::move(alpha));
}

CoefficientSet CoefficientSet::multiplicative(TimeFunction sigma1, TimeFunction sigma2, TimeFunction ell,
                                              AlphaFamily alpha) {
    return CoefficientSet(DiffusionMode::Multiplicative, std::move(sigma1), std::move(sigma2), std::move(ell),
                          std::move(alpha));
}

TimeFunction CoefficientSet::beta(std::size_t n) const {
    if (mode_ == DiffusionMode::Additive) {
        return drift_at_one_ / sigma2_ - sigma2_prime_ / (sigma2_ * sigma2_);
    }
    const TimeFunction a = alpha_.at(n);
    const TimeFunction s = sigma1_ + sigma2_;
    return drift_at_one_ / s - 0.5 * a * a * sigma1_ +
           ((sigma1_prime_ + sigma2_prime_) / s - sigma1_prime_ / sigma1_ * log(s)) / sigma1_;
}

void CoefficientSet::require_mode(double t) const {
    if (mode_ == DiffusionMode::Additive) {
        const double s2 = sigma2_(t);
        if (!(s2 > 0.0)) {
            throw ModeError("additive mode requires sigma2(t) > 0; sigma2(" + std::to_string(t) +
                            ") = " + std::to_string(s2));
        }
    } else {
        const double s1 = sigma1_(t);
        if (!(s1 > 0.0)) {
            throw ModeError("multiplicative mode requires sigma1(t) > 0; sigma1(" + std::to_string(t) +
                            ") = " + std::to_string(s1));
        }
    }
}

nlohmann::json CoefficientSet::to_json() const {
    nlohmann::json j{{"mode", to_string(mode_)},
                     {"sigma2", sigma2_.to_json()},
                     {"drift_param", drift_param_.to_json()},
                     {"alpha_family", alpha_.to_json()}};
    if (mode_ == DiffusionMode::Multiplicative) j["sigma1"] = sigma1_.to_json();
    return j;
}

CoefficientSet CoefficientSet::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("coefficients must be an object");
    for (const char* key : {"mode", "sigma2", "drift_param", "alpha_family"}) {
        if (!j.contains(key)) throw ParseError(std::string("coefficients.") + key + " is missing");
    }
    const auto mode = j["mode"].get<std::string>();
    auto sigma2 = TimeFunction::from_json(j["sigma2"]);
    auto drift = TimeFunction::from_json(j["drift_param"]);
    auto alpha = AlphaFamily::from_json(j["alpha_family"]);
    if (mode == "additive") {
        if (j.contains("sigma1")) {
            const auto s1 = TimeFunction::from_json(j["sigma1"]).constant_value();
            if (!s1 || *s1 != 0.0) throw ParseError("additive mode requires sigma1 to be identically 0");
        }
        return additive(std::move(sigma2), std::move(drift), std::move(alpha));
    }
    if (mode == "multiplicative") {
        if (!j.contains("sigma1")) throw ParseError("multiplicative mode requires coefficients.sigma1");
        return multiplicative(TimeFunction::from_json(j["sigma1"]), std::move(sigma2), std::move(drift),
                              std::move(alpha));
    }
    throw ParseError("coefficients.mode must be \"additive\" or \"multiplicative\", got \"" + mode + "\"");
}

// ---------------------------------------------------------------------------
// Operations

double eval_b(const CoefficientSet& coeffs, double t, double x) {
    coeffs.require_mode(t);
    if (coeffs.mode() == DiffusionMode::Additive) {
        return coeffs.sigma2_prime()(t) / coeffs.sigma2()(t) * x + coeffs.drift_param()(t);
    }
    const double s1 = coeffs.sigma1()(t);
    const double s2 = coeffs.sigma2()(t);
    const double s = std::fma(s1, x, s2);
    if (!(s > 0.0)) {
        throw DomainError("x = " + std::to_string(x) + " is outside U_t at t = " + std::to_string(t), t, x);
    }
    const double d1 = coeffs.sigma1_prime()(t);
    const double d2 = coeffs.sigma2_prime()(t);
    return (d1 * s * std::log(s) - s1 * d2 + d1 * s2) / (s1 * s1) + coeffs.drift_param()(t) * s;
}

double beta_n(const CoefficientSet& coeffs, std::size_t n, double t) {
    coeffs.require_mode(t);
    return coeffs.beta(n)(t);
}

DriftOdeReport check_drift_ode(const CoefficientSet& coeffs, const DriftGrid& grid) {
    return check_drift_ode(coeffs, [&coeffs](double t, double x) { return eval_b(coeffs, t, x); }, grid);
}

DriftOdeReport check_drift_ode(const CoefficientSet& coeffs, const DriftFunction& drift, const DriftGrid& grid) {
    DriftOdeReport report;
    for (double t : linspace(grid.t0, grid.t1, grid.time_points)) {
        const double s1 = coeffs.sigma1()(t);
        const double s2 = coeffs.sigma2()(t);
        const double d1 = coeffs.sigma1_prime()(t);
        const double d2 = coeffs.sigma2_prime()(t);
        double lower = -std::numeric_limits<double>::infinity();
        double x_low = grid.x_low_additive;
        if (coeffs.mode() == DiffusionMode::Multiplicative) {
            lower = -s2 / s1;
            x_low = lower + grid.boundary_offset * std::max(1.0, std::abs(lower));
        }
        for (double x : linspace(x_low, grid.x_high, grid.state_points)) {
            double h = 1e-5 * std::max(1.0, std::abs(x));
            if (std::isfinite(lower)) h = std::min(h, 0.5 * (x - lower));
            const double dbdx = (drift(t, x + h) - drift(t, x - h)) / (2.0 * h);
            const double residual = std::abs(s1 * drift(t, x) - (dbdx * (s1 * x + s2) - d1 * x - d2));
            ++report.points;
            if (residual > report.max_residual || !std::isfinite(residual)) {
                report.max_residual = std::isfinite(residual) ? residual : std::numeric_limits<double>::infinity();
                report.worst_t = t;
                report.worst_x = x;
            }
        }
    }
    return report;
}

BandClass classify_band(const TimeFunction& alpha, const TimeFunction& beta, double t0, double t1,
                        std::size_t grid_size, double strict_margin) {
    if (!(t0 < t1)) throw RangeError("classify_band requires t0 < t1");
    if (grid_size < 2) throw RangeError("classify_band requires grid_size >= 2");
    // Time-independent pairs need a single evaluation.
    const bool constant_pair = !alpha.depends_on_time() && !beta.depends_on_time();
    const std::vector<double> grid = constant_pair ? std::vector<double>{t0} : linspace(t0, t1, grid_size);

    constexpr double inf = std::numeric_limits<double>::infinity();
    double up_left = inf, up_right = inf, down_left = inf, down_right = inf;
    double sup_a2 = 0.0;
    bool frozen = true, up_ok = true, down_ok = true;
    std::ostringstream fail;
    fail.precision(10);
    bool up_reported = false, down_reported = false;

    for (double t : grid) {
        const double a = alpha(t);
        const double a2 = a * a;
        const double b = beta(t);
        const double tol = 1e-12 * std::max(a2, std::abs(b));
        sup_a2 = std::max(sup_a2, a2);
        frozen = frozen && a == 0.0 && b == 0.0;

        const double ul = b + 0.5 * a2, ur = -0.25 * a2 - b;
        const double dl = b - 0.25 * a2, dr = 0.5 * a2 - b;
        up_left = std::min(up_left, ul);
        up_right = std::min(up_right, ur);
        down_left = std::min(down_left, dl);
        down_right = std::min(down_right, dr);
        if (ul < -tol || ur < -tol) {
            up_ok = false;
            if (!up_reported) {
                fail << (ul < -tol ? "-a^2/2 <= beta" : "beta <= -a^2/4") << " fails at t=" << t << " (alpha=" << a
                     << ", beta=" << b << "); ";
                up_reported = true;
            }
        }
        if (dl < -tol || dr < -tol) {
            down_ok = false;
            if (!down_reported) {
                fail << (dl < -tol ? "a^2/4 <= beta" : "beta <= a^2/2") << " fails at t=" << t << " (alpha=" << a
                     << ", beta=" << b << "); ";
                down_reported = true;
            }
        }
    }

    BandClass out;
    if (frozen) {
        out.band = Band::Frozen;
        out.detail = "alpha = beta = 0 on the grid";
        return out;
    }
    const double strict_needed = strict_margin * sup_a2;
    if (up_ok) {
        out.margin = std::max(up_left, up_right);
        out.band = (sup_a2 > 0.0 && out.margin >= strict_needed) ? Band::UpStrict : Band::Up;
        return out;
    }
    if (down_ok) {
        out.margin = std::max(down_left, down_right);
        out.band = (sup_a2 > 0.0 && out.margin >= strict_needed) ? Band::DownStrict : Band::Down;
        return out;
    }
    out.band = Band::Unclassified;
    out.margin = std::max(std::min(up_left, up_right), std::min(down_left, down_right));
    out.detail = fail.str();
    if (out.detail.size() >= 2 && out.detail.compare(out.detail.size() - 2, 2, "; ") == 0) out.detail.resize(out.detail.size() - 2);
    return out;
}

BandClass classify_band(const CoefficientSet& coeffs, std::size_t n, double t0, double t1, std::size_t grid_size,
                        double strict_margin) {
    return classify_band(coeffs.alpha().at(n), coeffs.beta(n), t0, t1, grid_size, strict_margin);
}

}  // namespace rsde
