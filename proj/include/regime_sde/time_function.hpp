#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <nlohmann/json_fwd.hpp>

namespace rsde {

/// Node kinds of a closed-form time function.
enum class Op { Const, Time, Index, Add, Mul, Pow, Exp, Log, Affine };

/// Immutable closed-form scalar function of time, optionally parametric in a
/// regime index n.
///
/// The representation is an expression tree over constants, the identity t,
/// the free symbol n, sums, products, real powers, exp, log and affine
/// composition f(a·t + b). Builders fold subtrees free of both t and n into
/// constants, so a regime coefficient such as √(2n) collapses to a single
/// constant once the index is bound.
///
/// Derivatives are structural and always available. Antiderivatives exist for
/// the subset covered by the rules in antiderivative(); callers fall back to
/// adaptive quadrature otherwise.
class TimeFunction {
public:
    struct Node;

    /// The zero function.
    TimeFunction();

    static TimeFunction constant(double value);
    static TimeFunction time();
    static TimeFunction index();
    static TimeFunction sum(const TimeFunction& a, const TimeFunction& b);
    static TimeFunction product(const TimeFunction& a, const TimeFunction& b);
    static TimeFunction power(const TimeFunction& base, const TimeFunction& exponent);
    static TimeFunction exponential(const TimeFunction& arg);
    static TimeFunction logarithm(const TimeFunction& arg);
    /// inner(scale·t + shift)
    static TimeFunction affine(double scale, double shift, const TimeFunction& inner);

    /// Evaluates a function that does not depend on n. Throws ModeError if it does.
    double operator()(double t) const;
    double eval(double t, double n) const;

    TimeFunction derivative() const;
    std::optional<TimeFunction> antiderivative() const;

    /// Substitutes n and folds every subtree that becomes constant.
    TimeFunction bind_index(double n) const;

    bool depends_on_time() const noexcept;
    bool depends_on_index() const noexcept;
    /// Value when the function is free of both t and n.
    std::optional<double> constant_value() const noexcept;
    /// (slope, intercept) when the function is affine in t and free of n.
    std::optional<std::pair<double, double>> linear_form() const;

    Op op() const noexcept;

    nlohmann::json to_json() const;
    static TimeFunction from_json(const nlohmann::json& j);
    std::string str() const;

private:
    explicit TimeFunction(std::shared_ptr<const Node> node);
    double eval_impl(double t, const double* n) const;

    std::shared_ptr<const Node> node_;
};

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator-(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator-(const TimeFunction& a);
TimeFunction operator*(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator/(const TimeFunction& a, const TimeFunction& b);
TimeFunction operator+(const TimeFunction& a, double b);
TimeFunction operator+(double a, const TimeFunction& b);
TimeFunction operator-(const TimeFunction& a, double b);
TimeFunction operator-(double a, const TimeFunction& b);
TimeFunction operator*(double a, const TimeFunction& b);
TimeFunction operator*(const TimeFunction& a, double b);
TimeFunction operator/(const TimeFunction& a, double b);
TimeFunction operator/(double a, const TimeFunction& b);

TimeFunction exp(const TimeFunction& f);
TimeFunction log(const TimeFunction& f);
TimeFunction pow(const TimeFunction& f, double exponent);
TimeFunction pow(const TimeFunction& f, const TimeFunction& exponent);
TimeFunction sqrt(const TimeFunction& f);

}  // namespace rsde
