#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "pslab/errors.hpp"
#include "pslab/parse.hpp"
#include "pslab/series.hpp"

using namespace pslab;

namespace {

double binom(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;  // exact while the values stay small
  return c;
}

}  // namespace

TEST_CASE("graded layout rank inverts index") {
  for (std::size_t n : {1u, 2u, 3u, 4u}) {
    GradedLayout layout(n, 9);
    std::size_t count = 0;
    layout.for_each([&](std::size_t pos, std::span<const int> L) {
      CHECK(layout.rank(L) == pos);
      CHECK(layout.index(pos).exponents() == std::vector<int>(L.begin(), L.end()));
      ++count;
    });
    CHECK(count == layout.size());
    // C(9 + n, n) indices of total degree <= 9
    CHECK(static_cast<double>(count) == doctest::Approx(binom(9 + static_cast<int>(n), static_cast<int>(n))));
  }
}

TEST_CASE("poly_mul small products") {
  const SparsePoly a = parse_poly("1 + z1", 2), b = parse_poly("1 - z1", 2);
  CHECK(poly_mul(a, b, 2).base() == parse_poly("1 - z1^2", 2));
  CHECK(poly_mul(a, b, 1).base() == parse_poly("1", 2));

  std::mt19937_64 rng(7);
  const SparsePoly f = testing::random_poly(rng, 3, 4);
  CHECK(poly_mul(f, SparsePoly::constant(3, 1.0), 4).base() == f);

  SparsePoly s = parse_poly("z1 + z2");
  SparsePoly cube = poly_mul(poly_mul(s, s, 3).base(), s, 3).base();
  for (int k = 0; k <= 3; ++k) CHECK(cube.coeff(MultiIndex{k, 3 - k}).real() == binom(3, k));
  CHECK(cube.size() == 4);
}

TEST_CASE("poly_mul rejects mismatched dimensions and negative caps") {
  CHECK_THROWS_AS(poly_mul(SparsePoly::constant(2, 1.0), SparsePoly::constant(3, 1.0), 3), InputError);
  CHECK_THROWS_AS(poly_mul(SparsePoly::constant(2, 1.0), SparsePoly::constant(2, 1.0), -1), InputError);
}

TEST_CASE("poly_mul dense and sparse paths agree and commute") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const SparsePoly a = testing::random_poly(rng, 2, 12), b = testing::random_poly(rng, 2, 12);
    const SparsePoly c = testing::random_poly(rng, 2, 6);
    const SparsePoly ab = poly_mul(a, b, 15).base(), ba = poly_mul(b, a, 15).base();
    // operator* never truncates and always takes the sparse route
    const SparsePoly full = a * b;
    for (const auto& [L, v] : full.terms()) {
      if (L.degree() > 15) continue;
      CHECK(std::abs(ab.coeff(L) - v) <= 1e-12 * (1.0 + std::abs(v)));
      CHECK(std::abs(ba.coeff(L) - v) <= 1e-12 * (1.0 + std::abs(v)));
    }
    const SparsePoly left = poly_mul(poly_mul(a, b, 10).base(), c, 10).base();
    const SparsePoly right = poly_mul(a, poly_mul(b, c, 10).base(), 10).base();
    for (const auto& [L, v] : left.terms()) CHECK(std::abs(right.coeff(L) - v) <= 1e-11 * (1.0 + std::abs(v)));
  }
}

TEST_CASE("zero coefficients vanish exactly") {
  SparsePoly f = parse_poly("z1 - z1 + z2", 2);
  CHECK(f.size() == 1);
  CHECK(f.coeff(MultiIndex{1, 0}) == Complex(0));
  f.add_term(MultiIndex{0, 1}, -1.0);
  CHECK(f.is_zero());
  CHECK(f.degree() == -1);
}

TEST_CASE("series_reciprocal of a geometric factor") {
  const TruncatedSeries h = series_reciprocal(parse_poly("1 - z1"), 5);
  CHECK(h.base().size() == 6);
  for (int k = 0; k <= 5; ++k) CHECK(h.base().coeff(MultiIndex{k}) == Complex(1));
  CHECK(series_reciprocal(SparsePoly::constant(2, 1.0), 7).base() == SparsePoly::constant(2, 1.0));
}

TEST_CASE("series_reciprocal of 1 - (z1+z2)/2") {
  const SparsePoly f = parse_poly("1 - (z1+z2)/2");
  const TruncatedSeries h = series_reciprocal(f, 4);
  for (int j = 0; j <= 4; ++j)
    for (int j1 = 0; j1 <= j; ++j1)
      CHECK(h.base().coeff(MultiIndex{j1, j - j1}).real() == doctest::Approx(std::ldexp(binom(j, j1), -j)).epsilon(1e-14));
  const SparsePoly one = poly_mul(f, h.base(), 4).base();
  CHECK(one == SparsePoly::constant(2, 1.0));
}

TEST_CASE("series_reciprocal multiply-back is the Kronecker delta") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 3u}) {
    for (int trial = 0; trial < 4; ++trial) {
      SparsePoly f = testing::random_poly(rng, n, 4);
      f.add_term(MultiIndex(n), 3.0);  // keep the reciprocal series tame
      const int cap = n == 3 ? 12 : 30;
      const TruncatedSeries h = series_reciprocal(f, cap);
      const SparsePoly prod = poly_mul(f, h.base(), cap).base();
      double scale = 0.0;
      for (const auto& [L, c] : h.base().terms()) scale = std::max(scale, std::abs(c));
      for (const auto& [L, c] : prod.terms()) {
        const Complex want = L.degree() == 0 ? Complex(1) : Complex(0);
        CHECK(std::abs(c - want) <= 1e-12 * std::max(1.0, scale));
      }
    }
  }
}

TEST_CASE("series_reciprocal needs a nonzero constant term") {
  CHECK_THROWS_AS(series_reciprocal(parse_poly("z1 + z2"), 3), SingularInversionError);
  CHECK_THROWS_AS(series_reciprocal(parse_poly("z1 + z2"), 3), InputError);
}

TEST_CASE("dilate scales by r^|L|") {
  std::mt19937_64 rng(5);
  const SparsePoly f = testing::random_poly(rng, 2, 5);
  CHECK(dilate(f, 1.0) == f);
  CHECK(dilate(parse_poly("1 - z1"), 0.0) == parse_poly("1 + 0*z1"));
  CHECK(dilate(parse_poly("z1*z2"), 0.5) == parse_poly("0.25*z1*z2"));
  CHECK_THROWS_AS(dilate(f, 1.5), InputError);
  CHECK_THROWS_AS(dilate(f, -0.1), InputError);
}

TEST_CASE("dilate is multiplicative") {
  std::mt19937_64 rng(9);
  for (double r : {0.0, 0.3, 0.77, 1.0}) {
    const SparsePoly f = testing::random_poly(rng, 2, 5), g = testing::random_poly(rng, 2, 4);
    const SparsePoly lhs = dilate(f * g, r);
    const SparsePoly rhs = poly_mul(dilate(f, r), dilate(g, r), 9).base();
    for (const auto& [L, c] : lhs.terms()) CHECK(std::abs(rhs.coeff(L) - c) <= 1e-13 * (1.0 + std::abs(c)));
    for (const auto& [L, c] : rhs.terms()) CHECK(std::abs(lhs.coeff(L) - c) <= 1e-13 * (1.0 + std::abs(c)));
  }
}

TEST_CASE("truncated series drops terms above the cap") {
  const TruncatedSeries t(parse_poly("1 + z1 + z1*z2 + z2^3", 2), 2);
  CHECK(t.base().size() == 3);
  CHECK(t.base().degree() == 2);
  CHECK_THROWS_AS(TruncatedSeries(parse_poly("1"), -1), InputError);
}

TEST_CASE("partial derivative") {
  const SparsePoly d = partial_derivative(parse_poly("z1^3*z2 + 2*z2 - z1"), 0);
  CHECK(d == parse_poly("3*z1^2*z2 - 1"));
}
