#include "pslab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pslab/errors.hpp"
#include "pslab/parallel.hpp"
#include "pslab/summation.hpp"

namespace pslab {

namespace {

constexpr double kSupportTol = 1e-9;

using ComplexTable = std::vector<std::vector<std::complex<double>>>;

// z_i^l for l <= top, by repeated multiplication so values are reproducible.
ComplexTable power_table(std::span<const std::complex<double>> z, int top) {
  ComplexTable out(z.size(), std::vector<std::complex<double>>(static_cast<std::size_t>(top) + 1));
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i][0] = 1.0;
    for (int l = 1; l <= top; ++l) out[i][l] = out[i][l - 1] * z[i];
  }
  return out;
}

// Per-coordinate moment of one component: conj(zeta)^l or [l = 0].
std::complex<double> coordinate_moment(const CoordinateSupport& c, int l) {
  if (l == 0) return 1.0;
  if (c.kind == CoordinateSupport::Kind::Circle) return 0.0;
  const double m = std::abs(c.point);
  if (m == 0.0) return 0.0;
  return std::polar(std::pow(m, l), -l * std::arg(c.point));
}

void check_shape(const MeasureSpec& mu, std::size_t n) {
  if (mu.components.empty()) throw InputError("measure has no components");
  for (const auto& c : mu.components) {
    if (c.coords.size() != n) throw InputError("measure component has the wrong dimension");
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) throw InputError("measure weights must be nonnegative");
    for (const auto& s : c.coords) {
      if (s.kind == CoordinateSupport::Kind::Circle && !(s.radius > 0.0))
        throw InputError("circle radius must be positive");
    }
  }
}

// Moment tables m[c][i][l] for l < count, and the coordinates on which some moment
// of positive order is nonzero.
struct MomentTables {
  std::vector<double> weights;
  std::vector<ComplexTable> tables;
  std::vector<std::size_t> free;
};

MomentTables build_moments(const MeasureSpec& mu, std::size_t n, int top) {
  MomentTables mt;
  for (const auto& c : mu.components) {
    mt.weights.push_back(c.weight);
    ComplexTable t(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i].resize(static_cast<std::size_t>(top) + 1);
      for (int l = 0; l <= top; ++l) t[i][l] = coordinate_moment(c.coords[i], l);
    }
    mt.tables.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (const auto& c : mu.components) {
      const auto& s = c.coords[i];
      any = any || (s.kind == CoordinateSupport::Kind::Fixed && std::abs(s.point) > 0.0);
    }
    if (any) mt.free.push_back(i);
  }
  return mt;
}

std::complex<double> table_moment(const MomentTables& mt, std::span<const int> L) {
  std::complex<double> acc = 0.0;
  for (std::size_t c = 0; c < mt.tables.size(); ++c) {
    std::complex<double> m = mt.weights[c];
    for (std::size_t i = 0; i < L.size() && m != 0.0; ++i) m *= mt.tables[c][i][L[i]];
    acc += m;
  }
  return acc;
}

std::size_t default_degree_count(std::size_t free) {
  switch (free) {
    case 1: return std::size_t{1} << 14;
    case 2: return 4096;
    default: return 384;
  }
}

EnergyResult energy_unchecked(const MeasureSpec& mu, const MonomialNorm& norms, double beta, std::size_t count) {
  const std::size_t n = norms.dimension();
  EnergyResult out;
  // Probe with a tiny table to find the free coordinates before sizing the real one.
  const auto probe = build_moments(mu, n, 1);
  const std::size_t k = probe.free.size();
  if (k == 0) {
    const std::vector<int> zero(n, 0);
    const double m0 = std::norm(table_moment(probe, zero));
    out.value = out.partial = m0 / norms.norm_sq(zero, beta);
    out.degrees = 1;
    out.decay_exponent = std::numeric_limits<double>::infinity();
    return out;
  }
  if (count == 0) count = default_degree_count(k);
  if (count < 8) throw InputError("energy needs at least 8 degrees");
  const auto mt = build_moments(mu, n, static_cast<int>(count));

  std::vector<double> terms(count);
  parallel_for(count, [&](std::size_t d) {
    std::vector<int> sub(k, 0), L(n, 0);
    sub.back() = static_cast<int>(d);
    KahanSum acc;
    do {
      for (std::size_t t = 0; t < k; ++t) L[mt.free[t]] = sub[t];
      const double m = std::norm(table_moment(mt, L));
      if (m != 0.0) acc += std::exp(std::log(m) - norms.log_norm_sq(L, beta));
    } while (GradedLayout::next_in_degree(sub));
    terms[d] = acc.value();
  });
  const SeriesEstimate s =
      sum_power_tailed([&](std::size_t d) { return terms[d]; }, static_cast<double>(n), count);
  out.value = s.value;
  out.divergent = s.divergent;
  out.partial = s.partial;
  out.tail = s.tail;
  out.remainder_bound = s.remainder_bound;
  out.decay_exponent = s.decay_exponent;
  out.degrees = count;
  return out;
}

}  // namespace

void validate_measure(const MeasureSpec& mu, const DomainSpec& spec) {
  const std::size_t n = dimension(spec);
  check_shape(mu, n);
  double total = 0.0;
  for (const auto& c : mu.components) total += c.weight;
  if (std::abs(total - 1.0) > 1e-12) throw InputError("measure weights must sum to 1");

  std::vector<VertexTorus> tori;
  if (const auto* d = std::get_if<PolyhedralReinhardt>(&spec)) tori = vertex_tori(*d);
  for (std::size_t ci = 0; ci < mu.components.size(); ++ci) {
    const auto& c = mu.components[ci];
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = c.coords[i].modulus();
    bool ok = false;
    if (std::holds_alternative<Polydisk>(spec)) {
      ok = std::all_of(rho.begin(), rho.end(), [](double r) { return std::abs(r - 1.0) <= kSupportTol; });
    } else if (const auto* e = std::get_if<Ellipsoid>(&spec)) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::pow(rho[i], 2.0 * e->p[i]);
      ok = std::abs(s - 1.0) <= kSupportTol;
    } else {
      for (const auto& t : tori) {
        bool match = true;
        for (std::size_t i = 0; i < n && match; ++i) match = std::abs(rho[i] - t.radii[i]) <= kSupportTol;
        ok = ok || match;
      }
    }
    if (!ok)
      throw InputError("measure component " + std::to_string(ci) +
                       " does not lie on the support of the boundary measure");
  }
}

std::complex<double> moment(const MeasureSpec& mu, const MultiIndex& L) {
  check_shape(mu, L.dimension());
  std::complex<double> acc = 0.0;
  for (const auto& c : mu.components) {
    std::complex<double> m = c.weight;
    for (std::size_t i = 0; i < L.dimension(); ++i) m *= coordinate_moment(c.coords[i], L[i]);
    acc += m;
  }
  return acc;
}

namespace {

// Shared degree-block summation for kernel sections and Cauchy transforms.
template <class Coefficient>
KernelValue block_sum(const MonomialNorm& norms, double beta, int cap, Coefficient&& coefficient) {
  if (cap < 1) throw InputError("kernel cap must be at least 1");
  const GradedLayout layout(norms.dimension(), cap);
  std::vector<std::complex<double>> block(static_cast<std::size_t>(cap) + 1, 0.0);
  std::vector<double> block_abs(block.size(), 0.0);
  layout.for_each([&](std::size_t, std::span<const int> L) {
    const std::complex<double> c = coefficient(L);
    if (c == 0.0) return;
    int d = 0;
    for (int l : L) d += l;
    const double inv = std::exp(-norms.log_norm_sq(L, beta));
    block[d] += c * inv;
    block_abs[d] += std::abs(c) * inv;
  });
  KernelValue out;
  out.cap = cap;
  std::complex<double> acc = 0.0;
  for (const auto& b : block) acc += b;
  out.value = acc;
  const double a_last = block_abs[cap], a_prev = block_abs[cap - 1];
  if (a_last > 0.0) {
    const double q = a_prev > 0.0 ? a_last / a_prev : std::numeric_limits<double>::infinity();
    out.tail_estimate = q < 1.0 ? a_last * q / (1.0 - q) : std::numeric_limits<double>::infinity();
    out.diverged = !(q < 1.0) || out.tail_estimate >= std::abs(out.value);
  }
  return out;
}

}  // namespace

KernelValue kernel_eval(const DomainSpec& spec, double beta, std::span<const std::complex<double>> z,
                        std::span<const std::complex<double>> w, int cap) {
  const MonomialNorm norms(spec);
  const std::size_t n = norms.dimension();
  if (z.size() != n || w.size() != n) throw InputError("kernel arguments have the wrong dimension");
  std::vector<std::complex<double>> wc(w.begin(), w.end());
  for (auto& x : wc) x = std::conj(x);
  const auto zp = power_table(z, cap), wp = power_table(wc, cap);
  return block_sum(norms, beta, cap, [&](std::span<const int> L) {
    std::complex<double> v = 1.0;
    for (std::size_t i = 0; i < n; ++i) v *= zp[i][L[i]] * wp[i][L[i]];
    return v;
  });
}

KernelValue cauchy_transform(const MeasureSpec& mu, const DomainSpec& spec, std::span<const std::complex<double>> z,
                             int cap) {
  validate_measure(mu, spec);
  const MonomialNorm norms(spec);
  const std::size_t n = norms.dimension();
  if (z.size() != n) throw InputError("evaluation point has the wrong dimension");
  const auto zp = power_table(z, cap);
  const auto mt = build_moments(mu, n, cap);
  return block_sum(norms, 0.0, cap, [&](std::span<const int> L) {
    std::complex<double> v = table_moment(mt, L);
    for (std::size_t i = 0; i < n && v != 0.0; ++i) v *= zp[i][L[i]];
    return v;
  });
}

EnergyResult energy(const MeasureSpec& mu, const DomainSpec& spec, double beta, std::size_t degree_count) {
  validate_measure(mu, spec);
  return energy_unchecked(mu, MonomialNorm(spec), beta, degree_count);
}

double capacity_lower_bound(const MeasureSpec& E, const DomainSpec& spec, double beta) {
  const EnergyResult e = energy(E, spec, beta);
  return e.divergent ? 0.0 : 1.0 / e.value;
}

EnergyResult pointeval_bound(const DomainSpec& spec, double beta, std::span<const std::complex<double>> zeta,
                             std::size_t degree_count) {
  const std::size_t n = dimension(spec);
  if (zeta.size() != n) throw InputError("point has the wrong dimension");
  std::vector<double> moduli(n);
  for (std::size_t i = 0; i < n; ++i) moduli[i] = std::abs(zeta[i]);
  if (defining_value(spec, moduli) > 1.0 + kSupportTol) throw InputError("point lies outside the closed domain");
  MeasureSpec delta{{MeasureComponent{1.0, {}}}};
  for (const auto& z : zeta) delta.components[0].coords.push_back(CoordinateSupport::fixed(z));
  return energy_unchecked(delta, MonomialNorm(spec), beta, degree_count);
}

double gamma_binomial_sum(double p, double r, int j) {
  if (!(p >= 1.0)) throw InputError("exponent p must be >= 1");
  if (!(r >= 0.0 && r <= 1.0)) throw InputError("r must lie in [0, 1]");
  if (j < 0) throw InputError("degree must be nonnegative");
  if (j == 0 || r == 0.0 || r == 1.0) return 1.0;
  const double lg = std::lgamma(j / p + 1.0), lr = std::log(r), ls = std::log1p(-r);
  std::vector<double> logs(static_cast<std::size_t>(j) + 1);
  double best = -std::numeric_limits<double>::infinity();
  for (int j1 = 0; j1 <= j; ++j1) {
    const double a = j1 / p, b = (j - j1) / p;
    logs[j1] = lg - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) + a * lr + b * ls;
    best = std::max(best, logs[j1]);
  }
  KahanSum acc;
  for (double v : logs) acc += std::exp(v - best);
  return std::exp(best) * acc.value();
}

SBoundReport s_bound_check(double p, double r, int jmax) {
  if (jmax < 9) throw InputError("s-bound scan needs jmax >= 9");
  SBoundReport rep;
  rep.values.resize(static_cast<std::size_t>(jmax) + 1);
  parallel_for(rep.values.size(), [&](std::size_t j) { rep.values[j] = gamma_binomial_sum(p, r, static_cast<int>(j)); });
  const std::size_t decile = rep.values.size() / 10;
  for (std::size_t j = 0; j < rep.values.size(); ++j) {
    const double v = rep.values[j];
    if (v > rep.max) {
      rep.max = v;
      rep.argmax = static_cast<int>(j);
    }
    if (j < decile) rep.first_decile_max = std::max(rep.first_decile_max, v);
    if (j >= rep.values.size() - decile) rep.last_decile_max = std::max(rep.last_decile_max, v);
  }
  return rep;
}

double laplace_h(double y, double r) {
  auto xlogx = [](double x, double c) { return x == 0.0 ? 0.0 : x * std::log(x / c); };
  return xlogx(y, r) + xlogx(1.0 - y, 1.0 - r);
}

std::vector<LaplaceRatio> laplace_verify(double r, std::span<const double> lambdas) {
  if (!(r > 0.0 && r < 1.0)) throw InputError("r must lie in (0, 1)");
  using boost::math::quadrature::gauss_kronrod;
  std::vector<LaplaceRatio> out(lambdas.size());
  const double theta_peak = std::asin(std::sqrt(r));
  parallel_for(lambdas.size(), [&](std::size_t k) {
    const double lambda = lambdas[k];
    if (!(lambda > 0.0)) throw InputError("lambda must be positive");
    // y = sin^2(theta) turns g(y) dy into 2 d(theta).
    auto integrand = [&](double theta) {
      const double s = std::sin(theta);
      return 2.0 * std::exp(-lambda * laplace_h(s * s, r));
    };
    // Break points at multiples of the peak width in theta, 1/(2 sqrt(lambda)).
    const double width = 0.5 / std::sqrt(lambda);
    std::vector<double> cuts{0.0, theta_peak, std::numbers::pi / 2};
    for (double m : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
      for (double c : {theta_peak - m * width, theta_peak + m * width})
        if (c > 0.0 && c < std::numbers::pi / 2) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    double integral = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double e = 0.0;
      integral += gauss_kronrod<double, 61>::integrate(integrand, cuts[i], cuts[i + 1], 20, 1e-11, &e);
      err += e;
    }
    if (!(err <= 1e-9 * integral)) throw NumericError("Laplace quadrature did not converge");
    // h''(r) = 1/(r(1-r)) and g(r) = 1/sqrt(r(1-r)), so the asymptote is sqrt(2 pi / lambda).
    const double hpp = 1.0 / (r * (1.0 - r));
    const double asym = std::sqrt(2.0 * std::numbers::pi / (lambda * hpp)) / std::sqrt(r * (1.0 - r));
    out[k] = {lambda, integral, asym, integral / asym};
  });
  return out;
}

}  // namespace pslab
