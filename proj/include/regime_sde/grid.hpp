#pragma once

#include <cstddef>
#include <vector>

namespace rsde {

/// Sampling policy for "for all t" conditions. Conditions are only ever
/// checked on these points; reports say so.
struct GridPolicy {
    double density = 2048.0;        // points per unit time on the dense part
    double dense_span = 64.0;       // length of the uniformly sampled prefix
    std::size_t tail_points = 2048; // geometrically spaced points beyond the prefix
    std::size_t max_dense_points = std::size_t{1} << 17;
};

/// Uniform points on [t0, min(t1, t0 + dense_span)] followed by geometrically
/// spaced points out to t1. Both endpoints are always included.
std::vector<double> check_grid(double t0, double t1, const GridPolicy& policy = {});

/// n points uniformly spaced on [a, b], endpoints included (n >= 2).
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace rsde
