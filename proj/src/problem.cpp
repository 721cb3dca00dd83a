#include "regime_sde/problem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "regime_sde/errors.hpp"
#include "regime_sde/normal.hpp"

namespace rsde {

Level Level::from_prob(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParseError("level probability must lie in (0, 1), got " + std::to_string(p));
    return {p, std_normal_quantile(p)};
}

Level Level::from_score(double z) {
    if (!std::isfinite(z)) throw ParseError("level score must be finite");
    return {std_normal_cdf(z), z};
}

namespace {

void require_increasing(const std::vector<Level>& levels) {
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i].score > levels[i - 1].score)) {
            throw ParseError("levels must be strictly increasing (entry " + std::to_string(i + 1) + ")");
        }
    }
}

}  // namespace

LevelSet LevelSet::probabilities(const std::vector<double>& ys) {
    LevelSet s;
    for (double y : ys) s.list_.push_back(Level::from_prob(y));
    require_increasing(s.list_);
    return s;
}

LevelSet LevelSet::scores(const std::vector<double>& zs) {
    LevelSet s;
    for (double z : zs) s.list_.push_back(Level::from_score(z));
    require_increasing(s.list_);
    return s;
}

LevelSet LevelSet::probability_expression(TimeFunction expr) {
    if (expr.depends_on_time()) throw ParseError("level expression must not depend on t");
    LevelSet s;
    s.expr_ = std::move(expr);
    return s;
}

LevelSet LevelSet::score_expression(TimeFunction expr) {
    if (expr.depends_on_time()) throw ParseError("level expression must not depend on t");
    LevelSet s;
    s.expr_ = std::move(expr);
    s.expr_is_score_ = true;
    return s;
}

std::optional<Level> LevelSet::at(std::size_t n) const {
    if (n == 0) throw RangeError("level indices start at 1");
    if (expr_) {
        const double v = expr_->eval(0.0, static_cast<double>(n));
        return expr_is_score_ ? Level::from_score(v) : Level::from_prob(v);
    }
    if (n > list_.size()) return std::nullopt;
    return list_[n - 1];
}

std::optional<std::size_t> LevelSet::size() const {
    if (expr_) return std::nullopt;
    return list_.size();
}

nlohmann::json LevelSet::to_json() const {
    if (expr_) return {{expr_is_score_ ? "score_expr" : "expr", expr_->to_json()}};
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& l : list_) scores.push_back(l.score);
    return {{"scores", scores}};
}

LevelSet LevelSet::from_json(const nlohmann::json& j) {
    if (j.is_array()) return probabilities(j.get<std::vector<double>>());
    if (!j.is_object()) throw ParseError("levels must be an array or an object");
    if (j.contains("list")) return probabilities(j["list"].get<std::vector<double>>());
    if (j.contains("probabilities")) return probabilities(j["probabilities"].get<std::vector<double>>());
    if (j.contains("scores")) return scores(j["scores"].get<std::vector<double>>());
    if (j.contains("expr")) return probability_expression(TimeFunction::from_json(j["expr"]));
    if (j.contains("score_expr")) return score_expression(TimeFunction::from_json(j["score_expr"]));
    throw ParseError("levels object needs one of list, probabilities, scores, expr, score_expr");
}

void ProblemSpec::validate() const {
    if (!(sigma0_sq > 0.0)) throw ParseError("initial_law.sigma0_sq must be > 0");
    if (!std::isfinite(mu0)) throw ParseError("initial_law.mu0_bar must be finite");
    if (!(solver.horizon > 0.0)) throw ParseError("solver.horizon must be > 0");
    if (!(solver.root_tol > 0.0)) throw ParseError("solver.root_tol must be > 0");
    if (r.depends_on_index()) throw ParseError("reference must not use n");
    if (!(simulation.dt > 0.0)) throw ParseError("simulation.dt must be > 0");
    // Spot-check expression levels for monotonicity on the first n_cap indices.
    if (levels.is_expression()) {
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= solver.n_cap; ++n) {
            const double z = levels.at(n)->score;
            if (!(z > prev)) throw ParseError("level expression is not strictly increasing at n = " + std::to_string(n));
            prev = z;
        }
    }
}

}  // namespace rsde
