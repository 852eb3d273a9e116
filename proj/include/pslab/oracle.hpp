#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pslab/series.hpp"

namespace pslab {

/// Monte Carlo average of prod |zeta_i|^{2 gamma_i} with its standard error.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  std::size_t samples = 0;
  // |estimate - closed_form| / std_error; 0 when both the error and the gap vanish.
  double z_score() const;
};

/// Samples are drawn in batches of kBatchSize. Batch b uses std::mt19937_64 seeded with
/// splitmix64(seed + b), so results depend only on (seed, samples), never on thread count.
inline constexpr std::size_t kBatchSize = std::size_t{1} << 15;

std::uint64_t splitmix64(std::uint64_t x);

/// Gamma(n) prod Gamma(g_i + 1) / Gamma(sum g_i + n): sphere moment of the normalized surface measure.
double sphere_moment_closed_form(std::span<const double> gamma);
/// Gamma(n + 1) prod Gamma(g_i + 1) / Gamma(sum g_i + n + 1): normalized volume moment of the ball.
double ball_moment_closed_form(std::span<const double> gamma);

/// Uniform points on the unit sphere of C^n from normalized complex Gaussians.
McEstimate mc_sphere_moment(std::span<const double> gamma, std::size_t samples, std::uint64_t seed);
/// Uniform points in the unit ball: sphere direction times U^{1/(2n)}.
McEstimate mc_ball_moment(std::span<const double> gamma, std::size_t samples, std::uint64_t seed);

/// Several exponent vectors (all of dimension n) evaluated on one shared sample stream.
std::vector<McEstimate> mc_sphere_moments(const std::vector<std::vector<double>>& gammas, std::size_t samples,
                                          std::uint64_t seed);
std::vector<McEstimate> mc_ball_moments(const std::vector<std::vector<double>>& gammas, std::size_t samples,
                                        std::uint64_t seed);

/// prod R_i^{2 l_i}: the moment of |z^L|^2 under the uniform measure on the torus |z_i| = R_i.
double torus_moment(std::span<const double> radii, const MultiIndex& L);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double closed_form = 0.0;
};

/// int_0^inf r^alpha e^{-c r} dr by double-exponential quadrature, against Gamma(alpha+1)/c^{alpha+1}.
QuadratureResult radial_weight_quadrature(double alpha, double c);

}  // namespace pslab
