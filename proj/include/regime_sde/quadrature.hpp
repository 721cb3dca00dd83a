#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "regime_sde/errors.hpp"

namespace rsde {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 48;
};

namespace detail {

// 15-point Kronrod nodes / weights and the embedded 7-point Gauss weights.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
    double value;
    double error;
    double abs_value;
};

template <class F>
Estimate gauss_kronrod_15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        kronrod += kKronrodWeights[j] * (f1 + f2);
        abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half), abs_sum * std::abs(half)};
}

template <class F>
double adaptive_step(const F& f, double a, double b, double tol, int depth, const QuadratureOptions& opt) {
    const Estimate est = gauss_kronrod_15(f, a, b);
    if (!std::isfinite(est.value)) {
        throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * est.abs_value;
    if (est.error <= tol || est.error <= roundoff) return est.value;
    if (depth >= opt.max_depth) {
        throw QuadratureError("adaptive quadrature exceeded depth " + std::to_string(opt.max_depth) + " on [" +
                              std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    const double mid = 0.5 * (a + b);
    return adaptive_step(f, a, mid, 0.5 * tol, depth + 1, opt) +
           adaptive_step(f, mid, b, 0.5 * tol, depth + 1, opt);
}

}  // namespace detail

/// Adaptive Gauss–Kronrod (7/15) integration with an absolute tolerance.
/// Throws QuadratureError once refinement exceeds opt.max_depth.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, opt);
    return detail::adaptive_step(f, a, b, opt.abs_tol, 0, opt);
}

}  // namespace rsde
