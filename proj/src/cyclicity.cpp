#include "pslab/cyclicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "pslab/errors.hpp"
#include "pslab/norms.hpp"
#include "pslab/parallel.hpp"
#include "pslab/summation.hpp"

namespace pslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kWindowDepth = 46.0;  // e^{-46} ~ 1e-20 relative to the peak term
constexpr int kFullSumLimit = 2048;
// Scheduled generic caps keep doubling while the tail still carries this share,
// as long as the truncated layout stays under kRefineTerms coefficients.
constexpr double kRefineTail = 1e-10;
constexpr double kRefineTerms = 2e6;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Log-sum-exp of term(i) over i in [lo, hi]. Long ranges are summed over a window around
// the peak, located by hill climbing from hint; the summand is assumed unimodal there.
template <class Term>
double windowed_log_sum(int lo, int hi, int& hint, Term&& term) {
  if (hi - lo <= kFullSumLimit) {
    double best = kNegInf;
    int arg = lo;
    std::vector<double> v(static_cast<std::size_t>(hi - lo) + 1);
    for (int i = lo; i <= hi; ++i) {
      v[i - lo] = term(i);
      if (v[i - lo] > best) {
        best = v[i - lo];
        arg = i;
      }
    }
    hint = arg;
    if (best == kNegInf) return kNegInf;
    KahanSum acc;
    for (double x : v) acc += std::exp(x - best);
    return best + std::log(acc.value());
  }
  int i = std::clamp(hint, lo, hi);
  double here = term(i);
  while (i < hi) {
    const double next = term(i + 1);
    if (next <= here) break;
    here = next;
    ++i;
  }
  while (i > lo) {
    const double prev = term(i - 1);
    if (prev <= here) break;
    here = prev;
    --i;
  }
  hint = i;
  if (here == kNegInf) return kNegInf;
  KahanSum acc;
  acc += 1.0;
  for (int k = i + 1; k <= hi; ++k) {
    const double d = term(k) - here;
    if (d < -kWindowDepth) break;
    acc += std::exp(d);
  }
  for (int k = i - 1; k >= lo; --k) {
    const double d = term(k) - here;
    if (d < -kWindowDepth) break;
    acc += std::exp(d);
  }
  return here + std::log(acc.value());
}

// f = c0 (1 - m) with m = a z_u + b z_v (b possibly absent). Then
//   Q(r) = ||1||^2 + (1-r)^2 Sum_{j>=1} r^{2(j-1)} ||m^j||^2,
// and ||m^j||^2 = G(j) is a one-parameter sum over j1 + j2 = j.
class AffineQuotient {
 public:
  static std::optional<AffineQuotient> detect(const SparsePoly& f, const MonomialNorm& norms, double beta) {
    if (f.degree() > 1) return std::nullopt;
    const Complex c0 = f.constant_term();
    if (c0 == Complex(0)) return std::nullopt;
    std::vector<std::pair<std::size_t, double>> lin;
    for (const auto& [L, c] : f.terms()) {
      if (L.degree() != 1) continue;
      std::size_t i = 0;
      while (L[i] == 0) ++i;
      lin.emplace_back(i, std::abs(c / c0));
    }
    if (lin.size() > 2) return std::nullopt;
    return AffineQuotient(norms, beta, lin);
  }

  QuotientNorm evaluate(double r, int cap) {
    QuotientNorm q;
    q.r = r;
    q.cap = cap;
    q.collapsed = true;
    const std::vector<int> zero(norms_.dimension(), 0);
    const double base = norms_.norm_sq(zero, beta_);
    if (vars_.empty() || r == 0.0) {
      // r = 0: f / f_0 = f, so Q = ||1||^2 + Sum_j G(j) (1)^2 only at j = 1.
      q.value = base + (vars_.empty() ? 0.0 : std::exp(log_g(1)));
      q.converged = true;
      return q;
    }
    const double l1r = 2.0 * std::log1p(-r), lr = 2.0 * std::log(r);
    const int tail_from = static_cast<int>(std::floor(0.9 * cap));
    KahanSum sum, tail;
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= cap; ++j) {
      const double t = std::exp(l1r + (j - 1) * lr + log_g(j));
      if (!std::isfinite(t)) {
        q.value = std::numeric_limits<double>::infinity();
        q.tail_fraction = 1.0;
        q.flagged = true;
        return q;
      }
      sum += t;
      if (j > tail_from) tail += t;
      if (j >= 16 && t < prev && t < 1e-20 * sum.value()) break;
      prev = t;
    }
    q.value = base + sum.value();
    q.tail_fraction = q.value > 0.0 ? tail.value() / q.value : 0.0;
    q.converged = q.tail_fraction < kConvergedTail;
    q.flagged = q.tail_fraction >= kFlaggedTail;
    return q;
  }

 private:
  AffineQuotient(const MonomialNorm& norms, double beta, std::vector<std::pair<std::size_t, double>> lin)
      : norms_(norms), beta_(beta), vars_(std::move(lin)) {
    const DomainSpec& spec = norms_.domain();
    n_ = static_cast<double>(norms_.dimension());
    if (const auto* e = std::get_if<Ellipsoid>(&spec)) {
      ellipsoid_ = true;
      double log_sum = 0.0;
      for (double p : e->p) log_sum += std::log(p);
      p_mean_ = std::exp(log_sum / n_);
      for (const auto& [i, a] : vars_) inv_p_.push_back(1.0 / e->p[i]);
    } else if (const auto* d = std::get_if<PolyhedralReinhardt>(&spec)) {
      for (const auto& t : vertex_tori(*d)) {
        tori_.push_back({std::log(t.weight), {}});
        for (const auto& [i, a] : vars_) tori_.back().second.push_back(std::log(t.radii[i]));
      }
    } else {
      tori_.push_back({0.0, std::vector<double>(vars_.size(), 0.0)});
    }
    for (const auto& [i, a] : vars_) log_a_.push_back(a > 0.0 ? std::log(a) : kNegInf);
    hints_.assign(std::max<std::size_t>(tori_.size(), 1), 0);
    log_g_.push_back(0.0);  // G(0) is never used; keeps indices aligned
  }

  double log_factorial(int k) {
    while (static_cast<int>(log_fact_.size()) <= k) log_fact_.push_back(std::lgamma(static_cast<double>(log_fact_.size()) + 1.0));
    return log_fact_[k];
  }
  double log_gamma_table(std::size_t var, int k) {
    auto& t = lgamma_p_[var];
    while (static_cast<int>(t.size()) <= k) t.push_back(std::lgamma(static_cast<double>(t.size()) * inv_p_[var] + 1.0));
    return t[k];
  }

  double compute_log_g(int j) {
    const double lj = log_factorial(j);
    if (vars_.size() == 1) {
      if (ellipsoid_) {
        return 2.0 * j * log_a_[0] + norms_.log_norm_sq(unit_index(j, 0), beta_);
      }
      double acc = kNegInf;
      for (const auto& [lw, lr] : tori_) acc = log_add(acc, lw + 2.0 * j * lr[0]);
      return 2.0 * j * log_a_[0] + acc + beta_ * std::log(j + n_);
    }
    if (ellipsoid_) {
      (void)log_gamma_table(0, j);
      (void)log_gamma_table(1, j);
      const bool equal_p = inv_p_[0] == inv_p_[1];
      const double lgn = std::lgamma(n_);
      const double common = equal_p ? -std::lgamma(j * inv_p_[0] + n_) + beta_ * std::log(p_mean_ * j * inv_p_[0] + n_) : 0.0;
      auto term = [&](int j1) {
        const int j2 = j - j1;
        double v = 2.0 * (lj - log_fact_[j1] - log_fact_[j2]) + 2.0 * j1 * log_a_[0] + 2.0 * j2 * log_a_[1] + lgn +
                   lgamma_p_[0][j1] + lgamma_p_[1][j2];
        if (equal_p) return v + common;
        const double s = j1 * inv_p_[0] + j2 * inv_p_[1];
        return v - std::lgamma(s + n_) + beta_ * std::log(p_mean_ * s + n_);
      };
      return windowed_log_sum(0, j, hints_[0], term);
    }
    double acc = kNegInf;
    for (std::size_t t = 0; t < tori_.size(); ++t) {
      const double la = log_a_[0] + tori_[t].second[0], lb = log_a_[1] + tori_[t].second[1];
      auto term = [&](int j1) {
        const int j2 = j - j1;
        return 2.0 * (lj - log_fact_[j1] - log_fact_[j2]) + 2.0 * j1 * la + 2.0 * j2 * lb;
      };
      acc = log_add(acc, tori_[t].first + windowed_log_sum(0, j, hints_[t], term));
    }
    return acc + beta_ * std::log(j + n_);
  }

  MultiIndex unit_index(int j, std::size_t var) const {
    return MultiIndex::unit(norms_.dimension(), vars_[var].first, j);
  }

  double log_g(int j) {
    while (static_cast<int>(log_g_.size()) <= j) {
      const int next = static_cast<int>(log_g_.size());
      // Carry the peak location forward in proportion to the degree.
      for (auto& h : hints_) h = static_cast<int>(std::llround(static_cast<double>(h) * next / std::max(next - 1, 1)));
      log_g_.push_back(compute_log_g(next));
    }
    return log_g_[j];
  }

  const MonomialNorm& norms_;
  double beta_;
  std::vector<std::pair<std::size_t, double>> vars_;
  std::vector<double> log_a_;
  double n_ = 1.0;
  bool ellipsoid_ = false;
  double p_mean_ = 1.0;
  std::vector<double> inv_p_;
  std::vector<std::pair<double, std::vector<double>>> tori_;  // (log weight, log radii of u, v)
  std::vector<int> hints_;
  std::vector<double> log_g_;
  std::vector<double> log_fact_;
  std::vector<double> lgamma_p_[2];
};

int schedule_cap(double r, double numerator, int limit) {
  const double c = std::ceil(numerator / (1.0 - r));
  return static_cast<int>(std::min(c, static_cast<double>(limit)));
}

double layout_terms(int cap, std::size_t n) {
  double c = 1.0;
  for (std::size_t i = 1; i <= n; ++i) c = c * (cap + static_cast<double>(i)) / static_cast<double>(i);
  return c;
}

}  // namespace

QuotientNorm dilation_quotient_norm(const SparsePoly& f, const DomainSpec& spec, double beta, double r, int cap) {
  if (cap < 1) throw InputError("truncation cap must be at least 1");
  const MonomialNorm norms(spec);
  if (f.dimension() != norms.dimension()) throw InputError("polynomial dimension does not match the domain");
  const TruncatedSeries q = poly_mul(f, series_reciprocal(dilate(f, r), cap).base(), cap);
  KahanSum total, tail;
  const int tail_from = static_cast<int>(std::floor(0.9 * cap));
  for (const auto& [L, c] : q.base().terms()) {
    const double t = std::norm(c) * norms.norm_sq(L, beta);
    total += t;
    if (L.degree() > tail_from) tail += t;
  }
  QuotientNorm out;
  out.r = r;
  out.cap = cap;
  out.value = total.value();
  out.tail_fraction = out.value > 0.0 ? std::min(1.0, tail.value() / out.value) : 0.0;
  if (!std::isfinite(out.value)) out.tail_fraction = 1.0;
  out.converged = out.tail_fraction < kConvergedTail;
  out.flagged = out.tail_fraction >= kFlaggedTail;
  return out;
}

std::vector<double> default_r_grid(int kmax) {
  if (kmax < 1) throw InputError("grid needs at least one point");
  std::vector<double> g;
  for (int k = 1; k <= kmax; ++k) g.push_back(1.0 - std::ldexp(1.0, -k));
  return g;
}

FitResult fit_growth(const SweepResult& sweep) {
  FitResult fit;
  fit.residual = std::numeric_limits<double>::infinity();
  std::vector<const QuotientNorm*> good;
  for (const auto& p : sweep.points)
    if (p.converged && std::isfinite(p.value)) good.push_back(&p);
  if (good.size() > kFitWindow) good.erase(good.begin(), good.end() - kFitWindow);
  if (good.size() >= 2) {
    const double last = good.back()->value, prev = good[good.size() - 2]->value;
    fit.plateau = std::abs(last - prev) <= kPlateauChange * std::abs(last);
  }
  std::vector<double> xs, ys;
  bool all_flat = good.size() >= 2;
  for (std::size_t k = 1; k < good.size(); ++k) {
    const double dq = good[k]->value - good[k - 1]->value;
    if (std::abs(dq) > 1e-13 * std::abs(good[k]->value)) all_flat = false;
    if (dq == 0.0) continue;
    xs.push_back(-std::log1p(-good[k]->r));
    ys.push_back(std::log(std::abs(dq)));
  }
  fit.points_used = good.size();
  if (all_flat) {
    // Q identical to rounding on every point: nothing grows.
    fit.raw_slope = -std::numeric_limits<double>::infinity();
    fit.exponent = 0.0;
    fit.residual = 0.0;
    fit.reliable = true;
    fit.bounded_evidence = fit.plateau;
    return fit;
  }
  if (xs.size() < 3) return fit;
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd b(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    A(k, 0) = xs[k];
    A(k, 1) = 1.0;
    b[k] = ys[k];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  fit.raw_slope = coef[0];
  fit.intercept = coef[1];
  fit.exponent = std::max(0.0, coef[0]);
  fit.residual = std::sqrt((A * coef - b).squaredNorm() / static_cast<double>(xs.size()));
  fit.reliable = fit.residual <= kFitResidualLimit;
  fit.bounded_evidence = fit.reliable && fit.plateau && fit.exponent <= kBoundedExponent;
  return fit;
}

SweepReport dilation_sweep(const SparsePoly& f, const DomainSpec& spec, double beta, const SweepOptions& options) {
  const auto& grid = options.r_grid;
  if (grid.empty()) throw InputError("r grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0 && grid[k] < 1.0)) throw InputError("r grid values must lie in (0, 1)");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw InputError("r grid must be increasing");
  }
  if (f.constant_term() == Complex(0))
    throw SingularInversionError("dilation quotient needs f(0) != 0");
  const MonomialNorm norms(spec);
  if (f.dimension() != norms.dimension()) throw InputError("polynomial dimension does not match the domain");

  SweepReport rep;
  rep.sweep.points.resize(grid.size());
  std::optional<AffineQuotient> affine =
      options.allow_collapsed ? AffineQuotient::detect(f, norms, beta) : std::optional<AffineQuotient>{};
  if (affine) {
    rep.sweep.collapsed = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const int cap = options.fixed_cap > 0 ? options.fixed_cap : schedule_cap(grid[k], 40.0, options.max_collapsed_cap);
      rep.sweep.points[k] = affine->evaluate(grid[k], cap);
    }
  } else {
    parallel_for(grid.size(), [&](std::size_t k) {
      if (options.fixed_cap > 0) {
        rep.sweep.points[k] = dilation_quotient_norm(f, spec, beta, grid[k], options.fixed_cap);
        return;
      }
      int cap = schedule_cap(grid[k], 8.0, options.max_generic_cap);
      QuotientNorm q = dilation_quotient_norm(f, spec, beta, grid[k], cap);
      while (q.tail_fraction > kRefineTail && cap < options.max_generic_cap) {
        const int next = std::min(2 * cap, options.max_generic_cap);
        if (layout_terms(next, norms.dimension()) > kRefineTerms) break;
        cap = next;
        q = dilation_quotient_norm(f, spec, beta, grid[k], cap);
      }
      rep.sweep.points[k] = q;
    });
  }
  rep.fit = fit_growth(rep.sweep);
  return rep;
}

namespace {

double coefficient_scale(const SparsePoly& f) {
  double s = 0.0;
  for (const auto& [L, c] : f.terms()) s += std::abs(c);
  return s;
}

std::vector<double> moduli_of(const std::vector<Complex>& z) {
  std::vector<double> m(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) m[i] = std::abs(z[i]);
  return m;
}

// Per-coordinate resolution so that res^(2n) stays near the budget.
int per_axis(int wanted, std::size_t n, double budget) {
  const int cap = static_cast<int>(std::floor(std::pow(budget, 1.0 / (2.0 * static_cast<double>(n)))));
  return std::max(2, std::min(wanted, cap));
}

struct Candidate {
  double value;
  std::size_t index;
  std::vector<Complex> point;
  std::vector<double> params;
};

void keep_best(std::vector<Candidate>& best, Candidate c, std::size_t limit) {
  auto cmp = [](const Candidate& a, const Candidate& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  };
  if (best.size() < limit) {
    best.push_back(std::move(c));
    std::push_heap(best.begin(), best.end(), cmp);
  } else if (cmp(c, best.front())) {
    std::pop_heap(best.begin(), best.end(), cmp);
    best.back() = std::move(c);
    std::push_heap(best.begin(), best.end(), cmp);
  }
}

std::vector<Candidate> sorted(std::vector<Candidate> best) {
  std::sort(best.begin(), best.end(), [](const Candidate& a, const Candidate& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  });
  return best;
}

}  // namespace

std::optional<ZeroWitness> interior_zero_scan(const SparsePoly& f, const DomainSpec& spec, int grid_density) {
  const std::size_t n = dimension(spec);
  if (f.dimension() != n) throw InputError("polynomial dimension does not match the domain");
  if (grid_density < 2) throw InputError("grid density must be at least 2");
  const int res = per_axis(grid_density, n, 4e6);
  const double scale = std::max(coefficient_scale(f), 1e-300);

  std::vector<SparsePoly> derivs;
  for (std::size_t i = 0; i < n; ++i) derivs.push_back(partial_derivative(f, i));

  std::vector<Candidate> best;
  std::vector<int> digits(2 * n, 0);  // modulus index and angle index per coordinate
  std::vector<Complex> z(n);
  std::vector<double> rho(n);
  std::size_t index = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) {
      rho[i] = static_cast<double>(digits[2 * i]) / res;
      z[i] = std::polar(rho[i], 2.0 * std::numbers::pi * digits[2 * i + 1] / res);
    }
    if (defining_value(spec, rho) < 1.0) keep_best(best, {std::abs(f(z)) / scale, index, z, {}}, 24);
    ++index;
    std::size_t d = 0;
    while (d < digits.size() && ++digits[d] == res) digits[d++] = 0;
    if (d == digits.size()) break;
  }

  for (const auto& cand : sorted(best)) {
    for (std::size_t i = 0; i < n; ++i) {
      if (derivs[i].is_zero()) continue;
      std::vector<Complex> w = cand.point;
      double fw = std::abs(f(w));
      for (int it = 0; it < 80 && fw > 1e-15 * scale; ++it) {
        const Complex df = derivs[i](w);
        if (df == Complex(0)) break;
        const Complex step = f(w) / df;
        double t = 1.0;
        bool moved = false;
        while (t > 1e-8) {
          std::vector<Complex> trial = w;
          trial[i] -= t * step;
          const double ft = std::abs(f(trial));
          if (ft < fw) {
            w = std::move(trial);
            fw = ft;
            moved = true;
            break;
          }
          t *= 0.5;
        }
        if (!moved) break;
      }
      const double dv = defining_value(spec, moduli_of(w));
      if (fw < 1e-12 && dv < 1.0 - 1e-9) return ZeroWitness{w, fw, dv};
    }
  }
  return std::nullopt;
}

std::optional<ZeroWitness> find_boundary_zero(const SparsePoly& f, const DomainSpec& spec) {
  const std::size_t n = dimension(spec);
  if (f.dimension() != n) throw InputError("polynomial dimension does not match the domain");
  constexpr double kAccept = 1e-10;

  // Boundary pieces: fixed moduli (torus / vertex tori) or a simplex of moduli (ellipsoid).
  std::vector<std::vector<double>> moduli_sets;
  const Ellipsoid* ell = std::get_if<Ellipsoid>(&spec);
  int simplex_steps = 0;
  if (std::holds_alternative<Polydisk>(spec)) {
    moduli_sets.push_back(std::vector<double>(n, 1.0));
  } else if (const auto* d = std::get_if<PolyhedralReinhardt>(&spec)) {
    for (const auto& t : vertex_tori(*d)) moduli_sets.emplace_back(t.radii.data(), t.radii.data() + n);
  } else {
    simplex_steps = n == 2 ? 64 : 12;
  }

  // Parameters: n angles, then n - 1 simplex coordinates t_i (ellipsoid only).
  auto point_from = [&](const std::vector<double>& params, const std::vector<double>& fixed) {
    std::vector<Complex> z(n);
    std::vector<double> rho(n);
    if (ell) {
      double rest = 1.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double t = std::clamp(params[n + i], 0.0, 1.0);
        rho[i] = std::pow(t, 1.0 / (2.0 * ell->p[i]));
        rest -= t;
      }
      rho[n - 1] = std::pow(std::max(rest, 0.0), 1.0 / (2.0 * ell->p[n - 1]));
    } else {
      rho = fixed;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = std::polar(rho[i], params[i]);
    return z;
  };
  auto feasible = [&](const std::vector<double>& params) {
    if (!ell) return true;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (params[n + i] < 0.0) return false;
      s += params[n + i];
    }
    return s <= 1.0;
  };

  const double scale = std::max(coefficient_scale(f), 1e-300);
  std::vector<std::vector<double>> simplex;
  if (ell) {
    std::vector<int> comp(n, 0);
    comp.back() = simplex_steps;
    do {
      std::vector<double> t(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i) t[i] = static_cast<double>(comp[i]) / simplex_steps;
      simplex.push_back(std::move(t));
    } while (GradedLayout::next_in_degree(comp));
    moduli_sets.assign(1, {});
  }
  const double pieces = static_cast<double>(std::max<std::size_t>(simplex.size(), 1) * moduli_sets.size());
  int angles = 4;
  while (std::pow(2.0 * angles, static_cast<double>(n)) * pieces <= 1e6 && angles < 1024) angles *= 2;

  for (const auto& fixed : moduli_sets) {
    std::vector<Candidate> best;
    const std::size_t simplex_count = ell ? simplex.size() : 1;
    std::size_t index = 0;
    for (std::size_t s = 0; s < simplex_count; ++s) {
      std::vector<int> digits(n, 0);
      while (true) {
        std::vector<double> params(n + (ell ? n - 1 : 0));
        for (std::size_t i = 0; i < n; ++i) params[i] = 2.0 * std::numbers::pi * digits[i] / angles;
        if (ell)
          for (std::size_t i = 0; i + 1 < n; ++i) params[n + i] = simplex[s][i];
        const auto z = point_from(params, fixed);
        keep_best(best, {std::abs(f(z)) / scale, index, {}, std::move(params)}, 8);
        ++index;
        std::size_t d = 0;
        while (d < n && ++digits[d] == angles) digits[d++] = 0;
        if (d == n) break;
      }
    }
    for (const auto& cand : sorted(best)) {
      std::vector<double> params = cand.params;
      double fv = std::abs(f(point_from(params, fixed)));
      std::vector<double> step(params.size(), 2.0 * std::numbers::pi / angles);
      for (std::size_t i = n; i < params.size(); ++i) step[i] = 1.0 / simplex_steps;
      for (int it = 0; it < 20000 && fv > 1e-15 * scale; ++it) {
        bool improved = false;
        for (std::size_t i = 0; i < params.size(); ++i)
          for (double sgn : {1.0, -1.0}) {
            std::vector<double> trial = params;
            trial[i] += sgn * step[i];
            if (!feasible(trial)) continue;
            const double ft = std::abs(f(point_from(trial, fixed)));
            if (ft < fv) {
              params = std::move(trial);
              fv = ft;
              improved = true;
            }
          }
        if (!improved) {
          for (double& s : step) s *= 0.5;
          if (*std::max_element(step.begin(), step.end()) < 1e-15) break;
        }
      }
      if (fv < kAccept) {
        const auto z = point_from(params, fixed);
        return ZeroWitness{z, fv, defining_value(spec, moduli_of(z))};
      }
    }
  }
  return std::nullopt;
}

std::vector<MeasureSpec> zero_subtori(const SparsePoly& f, const DomainSpec& spec) {
  const std::size_t n = dimension(spec);
  if (f.dimension() != n) throw InputError("polynomial dimension does not match the domain");
  std::vector<std::vector<double>> radii_sets;
  if (std::holds_alternative<Polydisk>(spec)) {
    radii_sets.push_back(std::vector<double>(n, 1.0));
  } else if (const auto* d = std::get_if<PolyhedralReinhardt>(&spec)) {
    for (const auto& t : vertex_tori(*d)) radii_sets.emplace_back(t.radii.data(), t.radii.data() + n);
  } else {
    return {};
  }
  if (f.is_zero()) return {};
  const double scale = coefficient_scale(f);

  std::vector<MeasureSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    // Coefficient polynomials P_K(z_i), keyed by the exponents of the other variables.
    std::map<std::vector<int>, std::vector<Complex>> groups;
    for (const auto& [L, c] : f.terms()) {
      std::vector<int> key = L.exponents();
      key[i] = 0;
      auto& poly = groups[key];
      if (static_cast<int>(poly.size()) <= L[i]) poly.resize(static_cast<std::size_t>(L[i]) + 1, Complex(0));
      poly[L[i]] += c;
    }
    const std::vector<Complex>* pivot = nullptr;
    bool has_constant = false;
    for (const auto& [key, poly] : groups) {
      if (poly.size() == 1) has_constant = true;
      else if (!pivot || poly.size() < pivot->size()) pivot = &poly;
    }
    if (has_constant || !pivot) continue;
    const int deg = static_cast<int>(pivot->size()) - 1;
    std::vector<Complex> roots;
    const Complex lead = pivot->back();
    if (deg == 1) {
      roots.push_back(-(*pivot)[0] / lead);
    } else {
      Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
      for (int k = 0; k < deg; ++k) C(0, k) = -(*pivot)[deg - 1 - k] / lead;
      for (int k = 1; k < deg; ++k) C(k, k - 1) = 1.0;
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
      if (es.info() != Eigen::Success) throw NumericError("companion matrix eigenvalues did not converge");
      for (int k = 0; k < deg; ++k) roots.push_back(es.eigenvalues()[k]);
    }
    std::vector<double> used_angles;
    for (const Complex& zeta : roots) {
      bool common = true;
      for (const auto& [key, poly] : groups) {
        Complex v = 0.0;
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * zeta + *it;
        if (std::abs(v) > 1e-9 * scale) common = false;
      }
      if (!common) continue;
      const double angle = std::arg(zeta);
      for (const auto& radii : radii_sets) {
        if (std::abs(std::abs(zeta) - radii[i]) > 1e-8) continue;
        bool seen = false;
        for (double a : used_angles) seen = seen || std::abs(std::remainder(a - angle, 2.0 * std::numbers::pi)) < 1e-8;
        if (seen) continue;
        used_angles.push_back(angle);
        MeasureComponent c{1.0, {}};
        for (std::size_t k = 0; k < n; ++k)
          c.coords.push_back(k == i ? CoordinateSupport::fixed(std::polar(radii[i], angle))
                                    : CoordinateSupport::circle(radii[k]));
        out.push_back(MeasureSpec{{c}});
      }
    }
  }
  return out;
}

std::string verdict_label(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::NoncyclicInteriorZero: return "NONCYCLIC(interior zero)";
    case VerdictKind::NoncyclicPositiveCapacity: return "NONCYCLIC(positive capacity)";
    case VerdictKind::NoncyclicPointEvaluation: return "NONCYCLIC(bounded point evaluation)";
    case VerdictKind::CyclicEvidence: return "CYCLIC-EVIDENCE";
    case VerdictKind::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

Verdict cyclicity_verdict(const SparsePoly& f, const DomainSpec& spec, double beta, const Budget& budget) {
  validate(spec);
  const std::size_t n = dimension(spec);
  if (f.dimension() != n) throw InputError("polynomial dimension does not match the domain");
  Verdict v;
  if (f.is_zero()) {
    v.kind = VerdictKind::NoncyclicInteriorZero;
    v.detail = "the zero polynomial vanishes everywhere";
    v.witness = ZeroWitness{std::vector<Complex>(n, 0.0), 0.0, 0.0};
    return v;
  }

  if (auto w = interior_zero_scan(f, spec, budget.grid_density)) {
    v.kind = VerdictKind::NoncyclicInteriorZero;
    v.detail = "f vanishes inside the domain";
    v.witness = std::move(w);
    return v;
  }

  for (const auto& mu : zero_subtori(f, spec)) {
    const EnergyResult e = energy(mu, spec, beta, budget.energy_degrees);
    if (!e.divergent) {
      v.kind = VerdictKind::NoncyclicPositiveCapacity;
      v.detail = "uniform measure on a zero subtorus has finite energy";
      v.measure = mu;
      v.energy = e;
      return v;
    }
  }

  std::optional<ZeroWitness> zero;
  if (budget.boundary_zero) {
    const auto& z = *budget.boundary_zero;
    if (z.size() != n) throw InputError("boundary zero has the wrong dimension");
    const double fz = std::abs(f(z));
    if (fz > 1e-8 * std::max(coefficient_scale(f), 1.0)) throw InputError("supplied boundary point is not a zero of f");
    zero = ZeroWitness{z, fz, defining_value(spec, moduli_of(z))};
  } else {
    zero = find_boundary_zero(f, spec);
  }
  if (zero) {
    const EnergyResult e = pointeval_bound(spec, beta, zero->point, budget.energy_degrees);
    if (!e.divergent) {
      v.kind = VerdictKind::NoncyclicPointEvaluation;
      v.detail = "point evaluation is bounded at a boundary zero";
      v.witness = zero;
      v.energy = e;
      return v;
    }
  }

  SweepReport rep = dilation_sweep(f, spec, beta, budget.sweep);
  if (rep.fit.bounded_evidence) {
    v.kind = VerdictKind::CyclicEvidence;
    v.detail = "dilation quotients stay bounded on the sweep (evidence, not proof)";
  } else {
    v.kind = VerdictKind::Inconclusive;
    v.detail = !rep.fit.reliable ? "growth fit unreliable" : "dilation quotients grow on the sweep";
  }
  v.witness = zero;
  v.sweep = std::move(rep);
  return v;
}

}  // namespace pslab
