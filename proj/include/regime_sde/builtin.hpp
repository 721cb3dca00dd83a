#pragma once

#include <vector>

#include "regime_sde/problem.hpp"

namespace rsde::builtin {

/// Gaussian SDE: σ₂ = c, b = (c'/c)x + a/c with c(t) = 1 + (1 − e^{−t})/2 and
/// a = −0.4c², so β_n = a/c² = −0.4 for every n. α ∈ {1, 1.2, 1.1, 1.25}.
ProblemSpec gaussian();
/// Linear SDE: σ₁ = 1, b(t, x) = b(t)x with b(t) = 0.1 + 0.05e^{−t}, so
/// β_n = b − α_n²/2. α_n = 1 + 0.1n up to n = 5, x₀ ~ LogNormal(0, 1).
ProblemSpec linear();
/// Log drift: σ₁ = c = e^{−t}, b = (c'/c)x log(cx), β_n = c'/c² − α_n²c/2,
/// r = exp(t − e^{−2t}) so that ρ(t) = −e^{−t}.
ProblemSpec logdrift();
/// Linear SDE with b = 0.9, α₁ = 2, α₂ = 1 and the single level ½:
/// β₁ = −1.1 lies strictly in the up band, β₂ = 0.4 strictly in the down band.
ProblemSpec oscillation();

/// Geometric-Brownian explosion family: α_n = √(2n), β_n = −n, ρ ≡ 0,
/// x₀ ~ LogNormal(0, 1).
ProblemSpec explosion(LevelSet levels);
/// Scores z_n = F(t_n)/√(1 + 2F(t_n)) with F(t_n) = Σ_{k≤n} k(t_k − t_{k−1});
/// t_0 = 0 is implicit.
std::vector<double> explosion_scores(const std::vector<double>& t);
/// t_n = n/(n+1), n = 1..count.
std::vector<double> finite_times(std::size_t count);
/// t_n = n, n = 1..count.
std::vector<double> global_times(std::size_t count);
/// z_n for t_n = n in closed form: (n(n+1)/2)/√(1 + n(n+1)).
TimeFunction global_score_expression();

}  // namespace rsde::builtin
