#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace pslab {

/// Compensated (Neumaier) summation.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sum_{m >= a} (x0 / m)^s for s > 1, a > 0. Direct terms plus an Euler-Maclaurin tail.
double hurwitz_scaled(double s, double a, double x0);

/// Riemann-zeta-style sum Sum_{m >= a} m^{-s}.
inline double hurwitz_zeta(double s, double a) { return hurwitz_scaled(s, a, 1.0); }

/// Outcome of summing a nonnegative sequence c_0, c_1, ... whose terms behave like a
/// power (d + shift)^{-s} for large d.
struct SeriesEstimate {
  double value = 0.0;           // partial sum plus tail; +inf when divergent
  double partial = 0.0;         // sum of the explicitly computed terms
  double tail = 0.0;            // modelled remainder past the last explicit term
  double remainder_bound = 0.0; // spread between two tail models
  double decay_exponent = 0.0;  // fitted s
  bool divergent = false;
  std::size_t terms = 0;
};

/// Sums term(0..count-1) with compensation and closes the series with a power-law tail
/// fitted on the last half of the computed terms. The series is declared divergent when
/// the fitted exponent does not exceed 1 (comparison with the harmonic series).
SeriesEstimate sum_power_tailed(const std::function<double(std::size_t)>& term, double shift,
                                std::size_t count);

}  // namespace pslab
