#include "pslab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pslab/summation.hpp"

namespace pslab {

MonomialNorm::MonomialNorm(DomainSpec spec, NormOptions options)
    : spec_(std::move(spec)), options_(options), n_(pslab::dimension(spec_)) {
  validate(spec_);
  if (const auto* e = std::get_if<Ellipsoid>(&spec_)) {
    is_ellipsoid_ = true;
    double log_sum = 0.0;
    for (double p : e->p) {
      inv_p_.push_back(1.0 / p);
      log_sum += std::log(p);
    }
    p_mean_ = std::exp(log_sum / static_cast<double>(n_));
    log_gamma_n_ = std::lgamma(static_cast<double>(n_));
    graded_is_total_ = std::all_of(e->p.begin(), e->p.end(), [&](double p) { return p == e->p.front(); });
  } else if (const auto* d = std::get_if<PolyhedralReinhardt>(&spec_)) {
    tori_ = vertex_tori(*d);
    log_radii_.resize(static_cast<Eigen::Index>(tori_.size()), static_cast<Eigen::Index>(n_));
    log_weights_.resize(static_cast<Eigen::Index>(tori_.size()));
    for (std::size_t t = 0; t < tori_.size(); ++t) {
      log_radii_.row(static_cast<Eigen::Index>(t)) = tori_[t].radii.array().log().transpose();
      log_weights_[static_cast<Eigen::Index>(t)] = std::log(tori_[t].weight);
    }
  }
}

double MonomialNorm::log_shape(std::span<const int> L) const {
  if (L.size() != n_) throw InputError("multi-index dimension does not match the domain");
  if (is_ellipsoid_) {
    double s = 0.0, acc = log_gamma_n_;
    for (std::size_t i = 0; i < n_; ++i) {
      const double x = L[i] * inv_p_[i];
      s += x;
      acc += std::lgamma(x + 1.0);
    }
    return acc - std::lgamma(s + static_cast<double>(n_));
  }
  if (tori_.empty()) return 0.0;
  // log C_L = log sum_t w_t prod_i R_{t,i}^{2 l_i}
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(tori_.size());
  for (std::size_t t = 0; t < tori_.size(); ++t) {
    double v = log_weights_[static_cast<Eigen::Index>(t)];
    for (std::size_t i = 0; i < n_; ++i)
      if (L[i] != 0) v += 2.0 * L[i] * log_radii_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
    logs[t] = v;
    best = std::max(best, v);
  }
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - best);
  return best + std::log(acc);
}

double MonomialNorm::graded_degree(std::span<const int> L) const {
  if (is_ellipsoid_) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += L[i] * inv_p_[i];
    return graded_is_total_ ? std::round(p_mean_ * s * 1e12) / 1e12 : p_mean_ * s;
  }
  double d = 0.0;
  for (int l : L) d += l;
  return d;
}

double MonomialNorm::log_norm_sq(std::span<const int> L, double beta) const {
  double v = log_shape(L);
  if (beta != 0.0) v += beta * std::log(graded_degree(L) + static_cast<double>(n_));
  if (is_ellipsoid_ && options_.ellipsoid_prefactor) v -= beta * std::log(static_cast<double>(n_));
  return v;
}

double monomial_norm_sq(const DomainSpec& spec, double beta, const MultiIndex& L, NormOptions options) {
  return MonomialNorm(spec, options).norm_sq(L, beta);
}

double bergman_ellipsoid_monomial_norm_sq(std::span<const double> p, const MultiIndex& L) {
  if (p.size() != L.dimension()) throw InputError("exponent list does not match the multi-index");
  double inv_sum = 0.0, shifted_sum = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 1.0)) throw InputError("ellipsoid exponents must be >= 1");
    inv_sum += 1.0 / p[i];
    shifted_sum += (L[i] + 1.0) / p[i];
    acc += std::lgamma((L[i] + 1.0) / p[i]) - std::lgamma(1.0 / p[i]);
  }
  acc += std::lgamma(inv_sum + 1.0) - std::lgamma(shifted_sum + 1.0);
  return std::exp(acc);
}

double function_norm_sq(const SparsePoly& f, const MonomialNorm& norms, double beta) {
  if (f.dimension() != norms.dimension()) throw InputError("polynomial dimension does not match the domain");
  KahanSum acc;
  for (const auto& [L, c] : f.terms()) acc += std::norm(c) * norms.norm_sq(L, beta);
  return acc.value();
}

double function_norm_sq(const SparsePoly& f, const DomainSpec& spec, double beta) {
  return function_norm_sq(f, MonomialNorm(spec), beta);
}

double function_norm_sq(const TruncatedSeries& f, const DomainSpec& spec, double beta) {
  return function_norm_sq(f.base(), spec, beta);
}

double classical_polydisk_norm_sq(const SparsePoly& f, double alpha) {
  KahanSum acc;
  for (const auto& [L, c] : f.terms()) {
    double w = 0.0;
    for (int l : L.exponents()) w -= (alpha + 1.0) * std::log(l + 1.0);
    acc += std::norm(c) * std::exp(w);
  }
  return acc.value();
}

double dirichlet_bidisk_norm_sq(const SparsePoly& f, double s) {
  if (f.dimension() != 2) throw InputError("the anisotropic Dirichlet norm is defined on the bidisk");
  KahanSum acc;
  for (const auto& [L, c] : f.terms()) acc += std::norm(c) * std::pow((L[0] + 1.0) * (L[1] + 1.0), s);
  return acc.value();
}

SparsePoly parameter_shift(const SparsePoly& f, double beta_target, double beta_source, const DomainSpec& spec) {
  const MonomialNorm norms(spec);
  SparsePoly out(f.dimension());
  for (const auto& [L, c] : f.terms()) {
    const double scale = std::exp(0.5 * (norms.log_norm_sq(L, beta_source) - norms.log_norm_sq(L, beta_target)));
    out.append_sorted(L, c * scale);
  }
  return out;
}

PseReport pse_check(const DomainSpec& spec, std::span<const double> betas, int max_degree) {
  if (betas.size() < 2) throw InputError("PSE check needs at least two indices");
  if (max_degree < 0) throw InputError("maximum degree must be nonnegative");
  const MonomialNorm norms(spec);
  const std::size_t n = norms.dimension();
  PseReport rep;
  rep.exact_case = !std::holds_alternative<Ellipsoid>(spec);
  rep.max_degree = max_degree;
  rep.min_degree_ratio = rep.min_double_ratio = std::numeric_limits<double>::infinity();
  rep.max_degree_ratio = rep.max_double_ratio = 0.0;

  struct Pair {
    std::size_t a, b;
    double diff;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < betas.size(); ++a)
    for (std::size_t b = 0; b < betas.size(); ++b)
      if (a != b) pairs.push_back({a, b, betas[a] - betas[b]});
  rep.pairs = pairs.size();

  GradedLayout layout(n, max_degree);
  std::vector<double> logs(betas.size());
  layout.for_each([&](std::size_t, std::span<const int> L) {
    int deg = 0;
    for (int l : L) deg += l;
    const double log_deg = std::log(deg + static_cast<double>(n));
    for (std::size_t k = 0; k < betas.size(); ++k) logs[k] = norms.log_norm_sq(L, betas[k]);
    for (const auto& p : pairs) {
      const double ratio = std::exp(logs[p.a] - logs[p.b] - p.diff * log_deg);
      rep.max_identity_error = std::max(rep.max_identity_error, std::abs(ratio - 1.0));
      rep.min_degree_ratio = std::min(rep.min_degree_ratio, ratio);
      rep.max_degree_ratio = std::max(rep.max_degree_ratio, ratio);
    }
    for (const auto& p : pairs)
      for (const auto& q : pairs) {
        if (&p == &q || std::abs(p.diff - q.diff) > 1e-12) continue;
        const double dr = std::exp(0.5 * ((logs[p.a] - logs[p.b]) - (logs[q.a] - logs[q.b])));
        rep.min_double_ratio = std::min(rep.min_double_ratio, dr);
        rep.max_double_ratio = std::max(rep.max_double_ratio, dr);
      }
  });
  if (rep.max_double_ratio == 0.0) rep.min_double_ratio = rep.max_double_ratio = 1.0;
  rep.comparability_constant = std::max(rep.max_double_ratio, 1.0 / rep.min_double_ratio);
  rep.bounded = std::isfinite(rep.comparability_constant) && rep.comparability_constant < 1e3;
  return rep;
}

std::complex<double> duality_pairing(const SparsePoly& f, const SparsePoly& g, const DomainSpec& spec) {
  f.check_same(g);
  const MonomialNorm norms(spec);
  if (f.dimension() != norms.dimension()) throw InputError("polynomial dimension does not match the domain");
  KahanSum re, im;
  for (const auto& [L, a] : f.terms()) {
    const Complex b = g.coeff(L);
    if (b == Complex(0)) continue;
    const Complex v = a * std::conj(b) * norms.norm_sq(L, 0.0);
    re += v.real();
    im += v.imag();
  }
  return {re.value(), im.value()};
}

double cf_transfer_ratio(int j, double beta) {
  if (j < 0) throw InputError("transfer index must be nonnegative");
  const double jj = j;
  const double log_central = std::lgamma(2.0 * jj + 1.0) - 2.0 * std::lgamma(jj + 1.0) - 2.0 * jj * std::log(2.0);
  const double log_deg = std::log(jj + 2.0);
  return std::exp(log_central + beta * log_deg - (beta - 0.5) * log_deg);
}

double algebra_constant_sq(double beta, std::size_t n) {
  if (n == 0) throw InputError("dimension must be positive");
  const double dn = static_cast<double>(n);
  auto term = [&](std::size_t d) {
    // C(d + n - 1, n - 1) (d + n)^{-beta}
    const double dd = static_cast<double>(d);
    const double log_count = std::lgamma(dd + dn) - std::lgamma(dd + 1.0) - std::lgamma(dn);
    return std::exp(log_count - beta * std::log(dd + dn));
  };
  const SeriesEstimate s = sum_power_tailed(term, dn, std::size_t{1} << 16);
  if (s.divergent) return std::numeric_limits<double>::infinity();
  return std::pow(2.0, beta) * s.value;
}

std::vector<InclusionPartialSums> inclusion_witness_sums(double alpha, double eps, std::span<const int> degrees) {
  if (degrees.empty()) return {};
  if (!std::is_sorted(degrees.begin(), degrees.end()) || degrees.front() < 0)
    throw InputError("degrees must be nonnegative and increasing");
  const int top = degrees.back();
  std::vector<double> coef_sq(static_cast<std::size_t>(top) + 1), classical_w(coef_sq.size());
  for (int l = 0; l <= top; ++l) {
    coef_sq[l] = std::pow(l + 1.0, alpha - eps);        // |a_L|^2 factor per coordinate
    classical_w[l] = std::pow(l + 1.0, -1.0 - eps);     // times (l + 1)^{-(alpha+1)}
  }
  std::vector<InclusionPartialSums> out;
  KahanSum classical, ps;
  std::size_t next = 0;
  for (int d = 0; d <= top; ++d) {
    double inner_ps = 0.0, inner_cl = 0.0;
    for (int l = 0; l <= d; ++l) {
      inner_ps += coef_sq[l] * coef_sq[d - l];
      inner_cl += classical_w[l] * classical_w[d - l];
    }
    ps += inner_ps * std::pow(d + 2.0, -(alpha + 1.0));
    classical += inner_cl;
    while (next < degrees.size() && degrees[next] == d) {
      out.push_back({d, classical.value(), ps.value()});
      ++next;
    }
  }
  return out;
}

}  // namespace pslab
