#include "pslab/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "pslab/errors.hpp"
#include "pslab/parallel.hpp"

namespace pslab {

double McEstimate::z_score() const {
  const double gap = std::abs(estimate - closed_form);
  if (std_error == 0.0) return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return gap / std_error;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

void check_gamma(std::span<const double> gamma) {
  if (gamma.empty()) throw InputError("exponent vector is empty");
  for (double g : gamma)
    if (!(g > -1.0) || !std::isfinite(g)) throw InputError("moment exponents must be finite and > -1");
}

double moment_closed_form(std::span<const double> gamma, double shift) {
  check_gamma(gamma);
  const double n = static_cast<double>(gamma.size());
  double s = 0.0, acc = std::lgamma(n + shift);
  for (double g : gamma) {
    s += g;
    acc += std::lgamma(g + 1.0);
  }
  return std::exp(acc - std::lgamma(s + n + shift));
}

// Uniform double in (0, 1] from the top 53 bits; the library distributions are not
// specified bit-for-bit across standard libraries, so they are avoided here.
double uniform_open0(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53; }

struct Welford {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.count == 0) return;
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }
};

std::vector<McEstimate> mc_moments(const std::vector<std::vector<double>>& gammas, std::size_t samples,
                                   std::uint64_t seed, bool ball) {
  if (gammas.empty()) return {};
  const std::size_t n = gammas.front().size();
  for (const auto& g : gammas) {
    check_gamma(g);
    if (g.size() != n) throw InputError("exponent vectors must share one dimension");
  }
  if (samples < 1000) throw InputError("Monte Carlo needs at least 1000 samples");

  const std::size_t batches = (samples + kBatchSize - 1) / kBatchSize;
  std::vector<std::vector<Welford>> stats(batches, std::vector<Welford>(gammas.size()));
  parallel_for(batches, [&](std::size_t b) {
    std::mt19937_64 gen(splitmix64(seed + b));
    const std::size_t count = std::min(kBatchSize, samples - b * kBatchSize);
    std::vector<double> mod2(n), logm(n);
    for (std::size_t s = 0; s < count; ++s) {
      double norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        // Box-Muller: one complex standard Gaussian per coordinate.
        const double u1 = uniform_open0(gen), u2 = uniform_open0(gen);
        const double rad2 = -2.0 * std::log(u1);
        const double x = std::sqrt(rad2) * std::cos(2.0 * std::numbers::pi * u2);
        const double y = std::sqrt(rad2) * std::sin(2.0 * std::numbers::pi * u2);
        mod2[i] = x * x + y * y;
        norm2 += mod2[i];
      }
      double radial = 1.0;
      if (ball) radial = std::pow(uniform_open0(gen), 1.0 / static_cast<double>(n));  // |z|^2 = U^{1/n}
      for (std::size_t i = 0; i < n; ++i) logm[i] = std::log(mod2[i] / norm2 * radial);
      for (std::size_t k = 0; k < gammas.size(); ++k) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (gammas[k][i] != 0.0) e += gammas[k][i] * logm[i];
        stats[b][k].add(std::exp(e));
      }
    }
  });

  std::vector<McEstimate> out(gammas.size());
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    Welford total;
    for (std::size_t b = 0; b < batches; ++b) total.merge(stats[b][k]);
    const double var = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
    out[k].estimate = total.mean;
    out[k].std_error = std::sqrt(var / static_cast<double>(total.count));
    out[k].samples = total.count;
    out[k].closed_form = ball ? ball_moment_closed_form(gammas[k]) : sphere_moment_closed_form(gammas[k]);
  }
  return out;
}

}  // namespace

double sphere_moment_closed_form(std::span<const double> gamma) { return moment_closed_form(gamma, 0.0); }
double ball_moment_closed_form(std::span<const double> gamma) { return moment_closed_form(gamma, 1.0); }

McEstimate mc_sphere_moment(std::span<const double> gamma, std::size_t samples, std::uint64_t seed) {
  return mc_moments({std::vector<double>(gamma.begin(), gamma.end())}, samples, seed, false).front();
}

McEstimate mc_ball_moment(std::span<const double> gamma, std::size_t samples, std::uint64_t seed) {
  return mc_moments({std::vector<double>(gamma.begin(), gamma.end())}, samples, seed, true).front();
}

std::vector<McEstimate> mc_sphere_moments(const std::vector<std::vector<double>>& gammas, std::size_t samples,
                                          std::uint64_t seed) {
  return mc_moments(gammas, samples, seed, false);
}

std::vector<McEstimate> mc_ball_moments(const std::vector<std::vector<double>>& gammas, std::size_t samples,
                                        std::uint64_t seed) {
  return mc_moments(gammas, samples, seed, true);
}

double torus_moment(std::span<const double> radii, const MultiIndex& L) {
  if (radii.size() != L.dimension()) throw InputError("radii do not match the multi-index");
  double acc = 1.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw InputError("torus radii must be positive");
    for (int k = 0; k < L[i]; ++k) acc *= radii[i] * radii[i];
  }
  return acc;
}

QuadratureResult radial_weight_quadrature(double alpha, double c) {
  if (!(alpha > -1.0)) throw InputError("alpha must be > -1");
  if (!(c > 0.0)) throw InputError("c must be positive");
  QuadratureResult out;
  out.closed_form = std::exp(std::lgamma(alpha + 1.0) - (alpha + 1.0) * std::log(c));
  if (!std::isfinite(out.closed_form) || out.closed_form == 0.0)
    throw NumericError("radial moment is outside the double range");
  boost::math::quadrature::exp_sinh<double> integrator;
  double l1 = 0.0;
  try {
    out.value = integrator.integrate(
        [&](double r) { return r == 0.0 ? (alpha == 0.0 ? 1.0 : 0.0) : std::exp(alpha * std::log(r) - c * r); }, 0.0,
        std::numeric_limits<double>::infinity(), 1e-14, &out.error_estimate, &l1);
  } catch (const std::exception& e) {  // boost reports singular or overflowing evaluations this way
    throw NumericError(std::string("radial quadrature failed: ") + e.what());
  }
  if (!(out.error_estimate <= 1e-10 * std::abs(out.value))) throw NumericError("radial quadrature did not converge");
  return out;
}

}  // namespace pslab
