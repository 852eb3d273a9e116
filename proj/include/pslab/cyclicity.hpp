#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pslab/capacity.hpp"
#include "pslab/domains.hpp"
#include "pslab/series.hpp"

namespace pslab {

/// Q(r) = ||f / f_r||^2 at one radius.
struct QuotientNorm {
  double r = 0.0;
  double value = 0.0;
  double tail_fraction = 0.0;  // share of Q carried by degrees above 0.9 * cap
  int cap = 0;
  bool converged = false;      // tail_fraction < 1e-3
  bool flagged = false;        // tail_fraction >= 0.1
  bool collapsed = false;      // computed from the one-variable-per-degree form
};

inline constexpr double kConvergedTail = 1e-3;
inline constexpr double kFlaggedTail = 0.1;

/// Generic path: function_norm_sq(poly_mul(f, 1/f_r truncated at cap, cap)).
/// Throws SingularInversionError when f(0) = 0.
QuotientNorm dilation_quotient_norm(const SparsePoly& f, const DomainSpec& spec, double beta, double r, int cap);

/// Default radii r_k = 1 - 2^{-k}, k = 1..12.
std::vector<double> default_r_grid(int kmax = 12);

struct SweepOptions {
  std::vector<double> r_grid = default_r_grid();
  bool allow_collapsed = true;        // use the closed degree-by-degree form for affine f
  int max_generic_cap = 1024;         // generic caps are ceil(8/(1-r)) clipped to this
  int max_collapsed_cap = 1 << 22;    // collapsed caps are ceil(40/(1-r)) clipped to this
  int fixed_cap = 0;                  // > 0 overrides both schedules
};

struct SweepResult {
  std::vector<QuotientNorm> points;
  bool collapsed = false;
};

/// Growth fit of Q against 1/(1-r). The slope is fitted to log |Q_k - Q_{k-1}| over the
/// last converged points, so a bounded sequence gives a negative raw slope.
struct FitResult {
  double exponent = 0.0;   // max(0, raw_slope)
  double raw_slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;   // RMS residual in log space; +inf when too few points
  std::size_t points_used = 0;
  bool plateau = false;    // last relative change of Q below 1e-2
  bool reliable = false;   // residual <= 0.1 with at least three increments
  bool bounded_evidence = false;
};

inline constexpr std::size_t kFitWindow = 6;
inline constexpr double kFitResidualLimit = 0.1;
inline constexpr double kBoundedExponent = 0.05;
inline constexpr double kPlateauChange = 1e-2;

FitResult fit_growth(const SweepResult& sweep);

struct SweepReport {
  SweepResult sweep;
  FitResult fit;
};

SweepReport dilation_sweep(const SparsePoly& f, const DomainSpec& spec, double beta, const SweepOptions& options = {});

struct ZeroWitness {
  std::vector<Complex> point;
  double residual = 0.0;   // |f(point)|
  double defining = 0.0;   // defining_value at |point|
};

/// Grid scan over moduli and angles inside the domain, polished by damped Newton steps on
/// one-coordinate slices. Returns a point with |f| < 1e-12 strictly inside, if one is found.
std::optional<ZeroWitness> interior_zero_scan(const SparsePoly& f, const DomainSpec& spec, int grid_density = 24);

/// Searches the support of the boundary measure (torus, sphere, vertex tori) for a zero
/// of f with |f| < 1e-10.
std::optional<ZeroWitness> find_boundary_zero(const SparsePoly& f, const DomainSpec& spec);

/// Product subtori {z_i = zeta} x circles contained in the zero set of f and in the
/// support of the boundary measure. Polydisk and polyhedral domains only.
std::vector<MeasureSpec> zero_subtori(const SparsePoly& f, const DomainSpec& spec);

enum class VerdictKind {
  NoncyclicInteriorZero,
  NoncyclicPositiveCapacity,
  NoncyclicPointEvaluation,
  CyclicEvidence,
  Inconclusive,
};

std::string verdict_label(VerdictKind kind);

struct Budget {
  int grid_density = 24;
  std::optional<std::vector<Complex>> boundary_zero;  // skips the boundary search when set
  SweepOptions sweep;
  std::size_t energy_degrees = 0;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::string detail;
  std::optional<ZeroWitness> witness;     // interior or boundary zero used
  std::optional<MeasureSpec> measure;     // capacity certificate
  std::optional<EnergyResult> energy;     // energy or point-evaluation sum
  std::optional<SweepReport> sweep;
};

/// Certificates are tried in order: interior zero, positive capacity of a zero subtorus,
/// bounded point evaluation at a boundary zero, bounded dilation sweep. "Cyclic" is never
/// claimed; a bounded sweep is reported as evidence only.
Verdict cyclicity_verdict(const SparsePoly& f, const DomainSpec& spec, double beta, const Budget& budget = {});

}  // namespace pslab
