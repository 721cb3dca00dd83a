#include "regime_sde/grid.hpp"

#include <algorithm>
#include <cmath>

#include "regime_sde/errors.hpp"

namespace rsde {

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw RangeError("linspace needs at least two points");
    std::vector<double> out(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

std::vector<double> check_grid(double t0, double t1, const GridPolicy& policy) {
    if (!(t1 >= t0)) throw RangeError("check_grid requires t0 <= t1");
    if (t1 == t0) return {t0};
    const double dense_end = std::min(t1, t0 + policy.dense_span);
    const auto wanted = static_cast<std::size_t>(std::ceil(policy.density * (dense_end - t0))) + 1;
    const std::size_t dense_n = std::clamp<std::size_t>(wanted, 2, policy.max_dense_points);
    std::vector<double> grid = linspace(t0, dense_end, dense_n);
    if (dense_end < t1 && std::isfinite(t1)) {
        const double ratio = std::pow((t1 - t0) / (dense_end - t0), 1.0 / static_cast<double>(policy.tail_points));
        double span = dense_end - t0;
        for (std::size_t i = 0; i < policy.tail_points; ++i) {
            span *= ratio;
            grid.push_back(std::min(t1, t0 + span));
        }
        grid.back() = t1;
    }
    return grid;
}

}  // namespace rsde
