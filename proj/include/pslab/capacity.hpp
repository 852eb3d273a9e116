#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "pslab/domains.hpp"
#include "pslab/norms.hpp"

namespace pslab {

/// Per-coordinate support of a product measure: a fixed point zeta (Dirac in that
/// coordinate) or the uniform measure on the circle |z| = radius.
struct CoordinateSupport {
  enum class Kind { Fixed, Circle };
  Kind kind = Kind::Circle;
  std::complex<double> point{1.0, 0.0};
  double radius = 1.0;

  static CoordinateSupport fixed(std::complex<double> z) { return {Kind::Fixed, z, std::abs(z)}; }
  static CoordinateSupport circle(double r) { return {Kind::Circle, {r, 0.0}, r}; }
  double modulus() const { return kind == Kind::Fixed ? std::abs(point) : radius; }
};

struct MeasureComponent {
  double weight = 1.0;
  std::vector<CoordinateSupport> coords;
};

/// Convex combination of product measures on subtori of the closed domain.
struct MeasureSpec {
  std::vector<MeasureComponent> components;
  std::size_t dimension() const { return components.empty() ? 0 : components.front().coords.size(); }
};

/// Throws InputError unless weights are >= 0 with sum 1 and every component sits on the
/// support of the boundary measure (unit torus, vertex tori, or the ellipsoid sphere).
void validate_measure(const MeasureSpec& mu, const DomainSpec& spec);

/// Integral of conj(z^L) against mu.
std::complex<double> moment(const MeasureSpec& mu, const MultiIndex& L);

struct KernelValue {
  std::complex<double> value;
  double tail_estimate = 0.0;  // geometric-majorant bound on the omitted degrees
  int cap = 0;
  bool diverged = false;
};

/// K(z, w) = Sum_{|L| <= cap} z^L conj(w)^L / ||z^L||^2_beta.
KernelValue kernel_eval(const DomainSpec& spec, double beta, std::span<const std::complex<double>> z,
                        std::span<const std::complex<double>> w, int cap);

/// Sum_L z^L moment(mu, L) / ||z^L||^2_{beta = 0}.
KernelValue cauchy_transform(const MeasureSpec& mu, const DomainSpec& spec, std::span<const std::complex<double>> z,
                             int cap);

struct EnergyResult {
  double value = 0.0;  // +inf when divergent
  bool divergent = false;
  double partial = 0.0;
  double tail = 0.0;
  double remainder_bound = 0.0;
  double decay_exponent = 0.0;  // fitted power of the per-degree terms
  std::size_t degrees = 0;
};

/// I_beta[mu] = Sum_L |moment(mu, L)|^2 / ||z^L||^2_beta, summed by total degree with a
/// power-law tail. degree_count = 0 picks a default from the number of free coordinates.
EnergyResult energy(const MeasureSpec& mu, const DomainSpec& spec, double beta, std::size_t degree_count = 0);

/// 1 / energy of the measure; 0 when the energy diverges. A positive value bounds the
/// capacity of the support from below.
double capacity_lower_bound(const MeasureSpec& E, const DomainSpec& spec, double beta);

/// Squared norm of point evaluation at zeta in the closed domain, K(zeta, zeta).
EnergyResult pointeval_bound(const DomainSpec& spec, double beta, std::span<const std::complex<double>> zeta,
                             std::size_t degree_count = 0);

/// S(j) = Sum_{j1 + j2 = j} Gamma(j/p + 1) / (Gamma(j1/p + 1) Gamma(j2/p + 1)) r^{j1/p} (1 - r)^{j2/p}.
double gamma_binomial_sum(double p, double r, int j);

struct SBoundReport {
  double max = 0.0;
  int argmax = 0;
  double first_decile_max = 0.0;
  double last_decile_max = 0.0;
  std::vector<double> values;  // S(0..jmax)
};

SBoundReport s_bound_check(double p, double r, int jmax);

struct LaplaceRatio {
  double lambda = 0.0;
  double integral = 0.0;   // int_0^1 exp(-lambda h) g dy
  double asymptote = 0.0;  // sqrt(2 pi / (lambda h''(r))) g(r)
  double ratio = 0.0;
};

/// h(y) = y log(y/r) + (1-y) log((1-y)/(1-r)).
double laplace_h(double y, double r);

/// Quadrature versus the Laplace asymptote for each lambda. Throws NumericError when the
/// adaptive quadrature does not reach its tolerance.
std::vector<LaplaceRatio> laplace_verify(double r, std::span<const double> lambdas);

}  // namespace pslab
