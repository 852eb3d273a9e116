#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pslab/domains.hpp"
#include "pslab/series.hpp"

namespace pslab {

/// Index of the Dirichlet-type scale: beta = 0 is the Hardy space, beta < 0 weighted
/// Bergman, beta > 0 Dirichlet-type. Related to the Bergman weight by beta = -(alpha + 1).
struct SpaceIndex {
  double beta = 0.0;
  static SpaceIndex from_alpha(double alpha) { return {-(alpha + 1.0)}; }
  double alpha() const { return -(beta + 1.0); }
};

struct NormOptions {
  // Multiply ellipsoid norms by n^{alpha+1} = n^{-beta}, the constant of the integral
  // definition. Off by default; all thresholds are insensitive to it.
  bool ellipsoid_prefactor = false;
};

/// Squared monomial norms ||z^L||^2 for one domain, factored as
///   shape(L) * (graded(L) + n)^beta
/// where shape is the beta-free Gamma ratio (ellipsoid), 1 (polydisk) or C_L (polyhedral).
/// Construction precomputes vertex tori; evaluation is thread-safe.
class MonomialNorm {
 public:
  explicit MonomialNorm(DomainSpec spec, NormOptions options = {});

  const DomainSpec& domain() const noexcept { return spec_; }
  std::size_t dimension() const noexcept { return n_; }
  const std::vector<VertexTorus>& tori() const noexcept { return tori_; }

  double log_shape(std::span<const int> L) const;
  double graded_degree(std::span<const int> L) const;
  double log_norm_sq(std::span<const int> L, double beta) const;
  double norm_sq(std::span<const int> L, double beta) const { return std::exp(log_norm_sq(L, beta)); }

  double log_norm_sq(const MultiIndex& L, double beta) const { return log_norm_sq(L.exponents(), beta); }
  double norm_sq(const MultiIndex& L, double beta) const { return norm_sq(L.exponents(), beta); }

  // True when graded(L) = |L| for every L, so the beta factor depends on |L| alone.
  bool graded_by_total_degree() const noexcept { return graded_is_total_; }

 private:
  DomainSpec spec_;
  NormOptions options_;
  std::size_t n_ = 0;
  // ellipsoid
  std::vector<double> inv_p_;
  double p_mean_ = 1.0;
  double log_gamma_n_ = 0.0;
  bool is_ellipsoid_ = false;
  // polyhedral
  std::vector<VertexTorus> tori_;
  Eigen::MatrixXd log_radii_;  // tori x n
  Eigen::VectorXd log_weights_;
  bool graded_is_total_ = true;
};

double monomial_norm_sq(const DomainSpec& spec, double beta, const MultiIndex& L, NormOptions options = {});

/// Normalized-volume Bergman norm of z^L on the ellipsoid with exponents p.
double bergman_ellipsoid_monomial_norm_sq(std::span<const double> p, const MultiIndex& L);

/// Parseval sum Sum |a_L|^2 ||z^L||^2 with compensated accumulation.
double function_norm_sq(const SparsePoly& f, const MonomialNorm& norms, double beta);
double function_norm_sq(const SparsePoly& f, const DomainSpec& spec, double beta);
double function_norm_sq(const TruncatedSeries& f, const DomainSpec& spec, double beta);

/// Classical weighted Bergman norm on the polydisk: Sum |a_L|^2 prod (l_i + 1)^{-(alpha+1)}.
double classical_polydisk_norm_sq(const SparsePoly& f, double alpha);
/// Anisotropic Dirichlet norm on the bidisk: Sum |a_J|^2 ((j_1 + 1)(j_2 + 1))^s.
double dirichlet_bidisk_norm_sq(const SparsePoly& f, double s);

/// R^{s,t}: rescales the coefficient at L by ||z^L||_source / ||z^L||_target, an isometry
/// from the source space onto the target space.
SparsePoly parameter_shift(const SparsePoly& f, double beta_target, double beta_source, const DomainSpec& spec);

struct PseReport {
  bool exact_case = false;              // polydisk / polyhedral: ratios are powers of (|L| + n)
  int max_degree = 0;
  std::size_t pairs = 0;                // ordered (beta, beta') pairs checked
  double max_identity_error = 0.0;      // max |ratio / (|L|+n)^{beta-beta'} - 1|
  double min_degree_ratio = 1.0;        // range of ratio / (|L|+n)^{beta-beta'}
  double max_degree_ratio = 1.0;
  double min_double_ratio = 1.0;        // range of the shift double ratio (norms, not squares)
  double max_double_ratio = 1.0;
  double comparability_constant = 1.0;  // c with double ratio in [1/c, c]
  bool bounded = true;
};

PseReport pse_check(const DomainSpec& spec, std::span<const double> betas, int max_degree);

/// <f, g> = Sum a_L conj(b_L) ||z^L||^2_{beta = 0}; pairs the beta and -beta spaces.
std::complex<double> duality_pairing(const SparsePoly& f, const SparsePoly& g, const DomainSpec& spec);

/// [4^{-j} C(2j, j) (j+2)^beta] / (j+2)^{beta - 1/2}.
double cf_transfer_ratio(int j, double beta);

/// K^2 = 2 * 2^{beta-1} * Sum_L (|L| + n)^{-beta}; +inf when beta <= n.
double algebra_constant_sq(double beta, std::size_t n);

struct InclusionPartialSums {
  int degree = 0;
  double classical = 0.0;         // Sum_{|L| <= degree} of the classical polydisk norm terms
  double weighted = 0.0;  // same partial sum in the (|L| + 2)^{-(alpha+1)} norm
};

/// Partial sums, over |L| <= degree, of both squared norms of the bidisk series
/// Sum ((l_1 + 1)(l_2 + 1))^{(alpha - eps)/2} z^L. degrees must be increasing.
std::vector<InclusionPartialSums> inclusion_witness_sums(double alpha, double eps, std::span<const int> degrees);

}  // namespace pslab
