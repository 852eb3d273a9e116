#include "pslab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pslab/errors.hpp"

namespace pslab {

double hurwitz_scaled(double s, double a, double x0) {
  if (!(s > 1.0)) throw InputError("hurwitz sum needs exponent > 1");
  if (!(a > 0.0)) throw InputError("hurwitz sum needs a positive start");
  constexpr int kDirect = 32;
  KahanSum acc;
  for (int k = 0; k < kDirect; ++k) acc += std::pow(x0 / (a + k), s);
  const double b = a + kDirect;
  const double base = std::pow(x0 / b, s);  // (x0/b)^s
  // int_b^inf (x0/x)^s dx + f(b)/2 - f'(b)/12 + f'''(b)/720 - f^(5)(b)/30240 + f^(7)(b)/1209600
  double em = base * b / (s - 1.0) + 0.5 * base;
  em += base * s / (12.0 * b);
  em -= base * s * (s + 1.0) * (s + 2.0) / (720.0 * b * b * b);
  em += base * s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / (30240.0 * std::pow(b, 5));
  em -= base * s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * (s + 5.0) * (s + 6.0) / (1209600.0 * std::pow(b, 7));
  acc += em;
  return acc.value();
}

namespace {

double fitted_exponent(double ca, double cb, double xa, double xb) {
  if (cb <= 0.0) return std::numeric_limits<double>::infinity();
  if (ca <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(ca / cb) / std::log(xb / xa);
}

double power_tail(double c_last, double x_last, double s) {
  if (c_last <= 0.0 || std::isinf(s)) return 0.0;
  // Sum_{m >= 1} c_last * (x_last / (x_last + m))^s
  return c_last * hurwitz_scaled(s, x_last + 1.0, x_last);
}

}  // namespace

namespace {

struct Tailed {
  double partial = 0.0, tail = 0.0, alt_tail = 0.0, s = 0.0;
  bool vanishing = false;
};

// Partial sum of c[0..count) closed by a power tail fitted on the last half.
Tailed close_series(const std::vector<double>& c, std::size_t count, double shift) {
  Tailed t;
  KahanSum acc;
  for (std::size_t d = 0; d < count; ++d) acc += c[d];
  t.partial = acc.value();
  const std::size_t last = count - 1, half = count / 2, quarter = count / 4;
  const double x_last = static_cast<double>(last) + shift;
  t.s = fitted_exponent(c[half], c[last], static_cast<double>(half) + shift, x_last);
  const double s_quarter = fitted_exponent(c[quarter], c[last], static_cast<double>(quarter) + shift, x_last);
  t.vanishing = c[last] == 0.0 && c[half] == 0.0;
  if (t.vanishing || !(t.s > 1.0 + 1e-9)) return t;
  t.tail = power_tail(c[last], x_last, t.s);
  t.alt_tail = s_quarter > 1.0 + 1e-9 ? power_tail(c[last], x_last, s_quarter) : t.tail;
  return t;
}

}  // namespace

SeriesEstimate sum_power_tailed(const std::function<double(std::size_t)>& term, double shift,
                                std::size_t count) {
  if (count < 8) throw InputError("power-tailed summation needs at least 8 terms");
  std::vector<double> c(count);
  for (std::size_t d = 0; d < count; ++d) {
    c[d] = term(d);
    if (!(c[d] >= 0.0) || std::isinf(c[d])) throw NumericError("series term is not a finite nonnegative number");
  }
  const Tailed full = close_series(c, count, shift);
  SeriesEstimate out;
  out.partial = full.partial;
  out.terms = count;
  out.decay_exponent = full.s;

  if (full.vanishing) {
    out.value = out.partial;
    return out;
  }
  if (!(full.s > 1.0 + 1e-9)) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    out.tail = out.value;
    out.remainder_bound = out.value;
    return out;
  }
  out.tail = full.tail;
  out.remainder_bound = std::abs(full.alt_tail - full.tail);
  out.value = out.partial + out.tail;

  // A pure power tail misses lower-order terms like (d+shift)^{-s-1}; the resulting error
  // scales as count^{-s}, so one Richardson step against the half-length estimate removes it.
  const Tailed half = close_series(c, count / 2, shift);
  if (!half.vanishing && half.s > 1.0 + 1e-9) {
    const double coarse = half.partial + half.tail;
    const double correction = (out.value - coarse) / (std::exp2(full.s) - 1.0);
    out.tail += correction;
    out.value += correction;
    out.remainder_bound = std::max(out.remainder_bound, std::abs(correction));
  }
  return out;
}

}  // namespace pslab
