#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "pslab/errors.hpp"
#include "pslab/norms.hpp"
#include "pslab/parse.hpp"

using namespace pslab;

namespace {

// Direct evaluation of the ellipsoid closed form, no shared code with MonomialNorm.
double ellipsoid_direct(const std::vector<double>& p, const std::vector<int>& L, double beta) {
  const double n = static_cast<double>(p.size());
  double s = 0.0, lg = std::lgamma(n), logp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += L[i] / p[i];
    lg += std::lgamma(L[i] / p[i] + 1.0);
    logp += std::log(p[i]);
  }
  lg -= std::lgamma(s + n);
  const double pbar = std::exp(logp / n);
  return std::exp(lg) * std::pow(pbar * s + n, beta);
}

double omega_direct(int m, int n, double lambda, int k, int l, double beta) {
  return (m * std::pow(lambda, -2.0 * k / m) + n * std::pow(lambda, -2.0 * l / n)) / (m + n) *
         std::pow(k + l + 2.0, beta);
}

}  // namespace

TEST_CASE("monomial norm examples") {
  CHECK(monomial_norm_sq(Polydisk{2}, 1.0, MultiIndex{2, 1}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(monomial_norm_sq(Ellipsoid{{1.0, 1.0}}, 0.0, MultiIndex{1, 1}) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(monomial_norm_sq(omega_lambda(1, 1, 2.0), 0.0, MultiIndex{1, 0}) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(monomial_norm_sq(Polydisk{3}, -2.0, MultiIndex{0, 0, 0}) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("ellipsoid norms match the direct Gamma formula") {
  const std::vector<std::vector<double>> ps{{1.0, 1.0}, {1.0, 2.0}, {3.0, 1.5, 2.0}, {1.0, 1.0, 1.0}};
  for (const auto& p : ps) {
    const MonomialNorm norms(Ellipsoid{p});
    GradedLayout(p.size(), 12).for_each([&](std::size_t, std::span<const int> L) {
      const std::vector<int> l(L.begin(), L.end());
      for (double beta : {-1.5, 0.0, 0.7, 3.0})
        CHECK(testing::rel_err(norms.norm_sq(L, beta), ellipsoid_direct(p, l, beta)) < 1e-12);
    });
  }
}

TEST_CASE("ball norms are the Gamma factor times (|L|+n)^beta") {
  const MonomialNorm ball(Ellipsoid{{1.0, 1.0, 1.0}});
  GradedLayout(3, 10).for_each([&](std::size_t, std::span<const int> L) {
    const int d = L[0] + L[1] + L[2];
    const double gamma = std::exp(std::lgamma(3.0) + std::lgamma(L[0] + 1.0) + std::lgamma(L[1] + 1.0) +
                                  std::lgamma(L[2] + 1.0) - std::lgamma(d + 3.0));
    CHECK(testing::rel_err(ball.norm_sq(L, 2.5), gamma * std::pow(d + 3.0, 2.5)) < 1e-12);
  });
}

TEST_CASE("ellipsoid prefactor multiplies by n^{-beta}") {
  const MultiIndex L{2, 3};
  const double plain = monomial_norm_sq(Ellipsoid{{1.0, 2.0}}, 1.5, L);
  const double scaled = monomial_norm_sq(Ellipsoid{{1.0, 2.0}}, 1.5, L, NormOptions{true});
  CHECK(scaled / plain == doctest::Approx(std::pow(2.0, -1.5)));
  CHECK(monomial_norm_sq(Polydisk{2}, 1.5, L, NormOptions{true}) == monomial_norm_sq(Polydisk{2}, 1.5, L));
}

TEST_CASE("Hardy norms on the sphere and on omega lambda") {
  // beta = 0: sphere moments Gamma(n) prod l_i! / Gamma(|L| + n)
  CHECK(monomial_norm_sq(Ellipsoid{{1.0, 1.0}}, 0.0, MultiIndex{3, 2}) == doctest::Approx(12.0 / 720.0));
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 3; ++n)
      for (double lambda : {2.0, 10.0})
        for (int k = 0; k <= 10; ++k)
          for (int l = 0; l <= 10; ++l)
            for (double beta : {0.0, 1.3})
              CHECK(testing::rel_err(monomial_norm_sq(omega_lambda(m, n, lambda), beta, MultiIndex{k, l}),
                                     omega_direct(m, n, lambda, k, l, beta)) < 1e-12);
}

TEST_CASE("large exponents stay finite in log space") {
  const MonomialNorm omega(omega_lambda(3, 2, 10.0));
  const std::vector<int> L{4000, 3000};
  CHECK(std::isfinite(omega.log_norm_sq(L, 2.0)));
  CHECK(omega.log_norm_sq(L, 2.0) < -1000.0);
  const MonomialNorm ell(Ellipsoid{{2.0, 5.0}});
  CHECK(std::isfinite(ell.log_norm_sq(L, -3.0)));
}

TEST_CASE("polydisk limit of equal-exponent ellipsoids") {
  // The shape factor loses its L dependence only slowly as p grows; the spread of
  // norm / (|L|+n)^beta over |L| <= 20 shrinks toward 1.
  auto spread = [](double p) {
    const MonomialNorm norms(Ellipsoid{{p, p}});
    double lo = 1e300, hi = 0.0;
    GradedLayout(2, 20).for_each([&](std::size_t, std::span<const int> L) {
      const double ratio = norms.norm_sq(L, 1.0) / std::pow(L[0] + L[1] + 2.0, 1.0);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    });
    return lo / hi;
  };
  const double s64 = spread(64.0), s512 = spread(512.0), s2048 = spread(2048.0);
  CHECK(s64 < s512);
  CHECK(s512 < s2048);
  CHECK(s2048 > 0.98);
  CHECK(monomial_norm_sq(Ellipsoid{{1e6, 1e6}}, 0.0, MultiIndex{5, 7}) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Bergman ellipsoid norms") {
  const std::vector<double> ball{1.0, 1.0}, quartic{2.0, 2.0};
  CHECK(bergman_ellipsoid_monomial_norm_sq(ball, MultiIndex{0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(bergman_ellipsoid_monomial_norm_sq(ball, MultiIndex{1, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(bergman_ellipsoid_monomial_norm_sq(quartic, MultiIndex{0, 0}) == doctest::Approx(1.0).epsilon(1e-14));
  // volume moments of the ball: n! prod l_i! / (|L| + n)!
  CHECK(bergman_ellipsoid_monomial_norm_sq(ball, MultiIndex{1, 1}) == doctest::Approx(2.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("function norms") {
  CHECK(function_norm_sq(parse_poly("1", 2), Polydisk{2}, 1.7) == doctest::Approx(std::pow(2.0, 1.7)));
  CHECK(function_norm_sq(parse_poly("1 - z1", 2), Polydisk{2}, 0.0) == doctest::Approx(2.0));
  CHECK(function_norm_sq(parse_poly("1 - (z1+z2)/2"), Polydisk{2}, 1.0) == doctest::Approx(3.5).epsilon(1e-15));
  const TruncatedSeries t(parse_poly("1 + z1 + z2^2", 2), 1);
  CHECK(function_norm_sq(t, Polydisk{2}, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("classical comparison norms") {
  const SparsePoly f = parse_poly("z1*z2");
  CHECK(classical_polydisk_norm_sq(f, -1.0) == doctest::Approx(1.0));
  CHECK(classical_polydisk_norm_sq(f, -3.0) == doctest::Approx(16.0));
  CHECK(dirichlet_bidisk_norm_sq(f, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(dirichlet_bidisk_norm_sq(parse_poly("z1", 3), 1.0), InputError);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const SparsePoly g = testing::random_poly(rng, 2, 5);
    CHECK(dirichlet_bidisk_norm_sq(g, 1.0) <= function_norm_sq(g, Polydisk{2}, 2.0));
  }
}

TEST_CASE("parameter shift") {
  std::mt19937_64 rng(4);
  const SparsePoly f = testing::random_poly(rng, 2, 6);
  CHECK(parameter_shift(f, 1.3, 1.3, Polydisk{2}) == f);
  const SparsePoly z1 = parse_poly("z1", 2);
  CHECK(parameter_shift(z1, 0.0, 2.0, Polydisk{2}).coeff(MultiIndex{1, 0}).real() == doctest::Approx(3.0));
  for (const DomainSpec& spec : {DomainSpec(Polydisk{2}), DomainSpec(omega_lambda(2, 1, 10.0)), DomainSpec(Ellipsoid{{1.0, 2.0}})}) {
    const SparsePoly shifted = parameter_shift(f, -0.5, 2.0, spec);
    CHECK(testing::rel_err(function_norm_sq(shifted, spec, -0.5), function_norm_sq(f, spec, 2.0)) < 1e-12);
  }
}

TEST_CASE("pse identity on exact domains") {
  const std::vector<double> betas{-1.0, 0.0, 0.5, 2.0};
  for (const DomainSpec& spec : {DomainSpec(Polydisk{2}), DomainSpec(omega_lambda(1, 2, 2.0)), DomainSpec(omega_lambda(3, 3, 10.0))}) {
    const PseReport rep = pse_check(spec, betas, 200);
    CHECK(rep.exact_case);
    CHECK(rep.max_identity_error < 1e-12);
    CHECK(rep.bounded);
    CHECK(rep.comparability_constant == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pse double ratio on an ellipsoid is bounded") {
  const std::vector<double> betas{0.0, 1.0, 2.0};
  const PseReport rep = pse_check(Ellipsoid{{1.0, 2.0}}, betas, 200);
  CHECK_FALSE(rep.exact_case);
  CHECK(rep.bounded);
  CHECK(rep.comparability_constant >= 1.0);
  CHECK(rep.comparability_constant < 2.0);
  CHECK(rep.min_double_ratio * rep.comparability_constant >= 1.0 - 1e-12);
  CHECK_THROWS_AS(pse_check(Polydisk{2}, std::vector<double>{1.0}, 5), InputError);
}

TEST_CASE("duality pairing") {
  const DomainSpec bidisk = Polydisk{2};
  CHECK(duality_pairing(parse_poly("1", 2), parse_poly("1", 2), bidisk) == Complex(1.0));
  CHECK(duality_pairing(parse_poly("z1", 2), parse_poly("z1", 2), bidisk) == Complex(1.0));
  std::mt19937_64 rng(13);
  const double beta = 1.5;
  for (int trial = 0; trial < 10; ++trial) {
    const SparsePoly f = testing::random_poly(rng, 2, 6), g = testing::random_poly(rng, 2, 6);
    const double bound = std::sqrt(function_norm_sq(f, bidisk, beta) * function_norm_sq(g, bidisk, -beta));
    CHECK(std::abs(duality_pairing(f, g, bidisk)) <= bound * (1.0 + 1e-12));
    // Cauchy-Schwarz equality: g_L = f_L (|L| + n)^beta
    SparsePoly h(2);
    for (const auto& [L, c] : f.terms()) h.add_term(L, c * std::pow(L.degree() + 2.0, beta));
    const double eq = std::sqrt(function_norm_sq(f, bidisk, beta) * function_norm_sq(h, bidisk, -beta));
    CHECK(std::abs(duality_pairing(f, h, bidisk)) == doctest::Approx(eq).epsilon(1e-12));
  }
}

TEST_CASE("transfer ratio") {
  CHECK(cf_transfer_ratio(0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cf_transfer_ratio(0, -3.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  double lo = 10.0, hi = 0.0;
  for (int j = 0; j <= 10000; ++j) {
    const double v = cf_transfer_ratio(j, 1.5);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 0.5);
  CHECK(hi <= 1.5);
  CHECK(cf_transfer_ratio(1000000, 1.5) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-5));
  // exact value at j = 1: (1/2) sqrt(3)
  CHECK(cf_transfer_ratio(1, 0.2) == doctest::Approx(0.5 * std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("algebra constant and the product inequality") {
  // n = 1: 2^beta * zeta(beta)
  CHECK(algebra_constant_sq(3.0, 1) == doctest::Approx(8.0 * std::riemann_zeta(3.0)).epsilon(1e-9));
  // n = 2: sum_{m >= 2} (m - 1) m^{-beta}
  CHECK(algebra_constant_sq(4.0, 2) ==
        doctest::Approx(16.0 * ((std::riemann_zeta(3.0) - 1.0) - (std::riemann_zeta(4.0) - 1.0))).epsilon(1e-9));
  CHECK(std::isinf(algebra_constant_sq(2.0, 2)));
  CHECK(std::isinf(algebra_constant_sq(1.5, 2)));

  const double k2 = algebra_constant_sq(3.0, 2);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const SparsePoly f = testing::random_poly(rng, 2, 6, 0.5, false), g = testing::random_poly(rng, 2, 6, 0.5, false);
    if (f.is_zero() || g.is_zero()) continue;
    const double lhs = function_norm_sq(f * g, Polydisk{2}, 3.0);
    CHECK(lhs <= k2 * function_norm_sq(f, Polydisk{2}, 3.0) * function_norm_sq(g, Polydisk{2}, 3.0));
  }
}

TEST_CASE("inclusion witness partial sums") {
  const std::vector<int> degrees{10, 1000, 5000, 10000};
  const auto sums = inclusion_witness_sums(2.0, 1.0, degrees);
  REQUIRE(sums.size() == 4);
  // classical terms are ((l1+1)(l2+1))^{-2}: the full sum is zeta(2)^2
  const double limit = std::pow(std::numbers::pi, 4) / 36.0;
  CHECK(sums[3].classical < limit);
  CHECK(sums[3].classical == doctest::Approx(limit).epsilon(1e-3));
  CHECK(std::abs(sums[3].classical - sums[2].classical) / sums[3].classical < 5e-4);
  // weighted terms: degree d contributes (d+1)(d+2)(d+3)/6 * (d+2)^{-3}, about 1/6 each
  double direct = 0.0;
  for (int d = 0; d <= 10; ++d)
    for (int l = 0; l <= d; ++l) direct += (l + 1.0) * (d - l + 1.0) * std::pow(d + 2.0, -3.0);
  CHECK(sums[0].weighted == doctest::Approx(direct).epsilon(1e-14));
  CHECK(sums[3].weighted > 5.0 * sums[1].weighted);
  CHECK_THROWS_AS(inclusion_witness_sums(2.0, 1.0, std::vector<int>{5, 3}), InputError);
}
