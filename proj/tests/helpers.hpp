#pragma once

#include <cmath>
#include <random>

#include "pslab/series.hpp"

namespace testing {

// Random polynomial with every total degree <= degree present with probability density.
inline pslab::SparsePoly random_poly(std::mt19937_64& rng, std::size_t n, int degree, double density = 0.6,
                                     bool nonzero_constant = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  pslab::SparsePoly f(n);
  pslab::GradedLayout(n, degree).for_each([&](std::size_t pos, std::span<const int> L) {
    if (pos != 0 && coin(rng) > density) return;
    f.add_term(pslab::MultiIndex(std::vector<int>(L.begin(), L.end())), {u(rng), u(rng)});
  });
  if (nonzero_constant && f.constant_term() == pslab::Complex(0)) f.add_term(pslab::MultiIndex(n), 1.0);
  return f;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
