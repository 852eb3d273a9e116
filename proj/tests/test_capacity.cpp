#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "pslab/capacity.hpp"
#include "pslab/errors.hpp"
#include "pslab/parse.hpp"

using namespace pslab;

namespace {

const DomainSpec kBidisk = Polydisk{2};
const double kEnergyBeta2 = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;

std::vector<Complex> pt(std::initializer_list<Complex> z) { return z; }

}  // namespace

TEST_CASE("kernel at w = 0 is 1/||1||^2") {
  const auto z = pt({{0.3, 0.2}, {-0.1, 0.4}}), w = pt({0.0, 0.0});
  const KernelValue k = kernel_eval(kBidisk, 1.5, z, w, 20);
  CHECK(k.value.real() == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(k.value.imag() == 0.0);
  CHECK_FALSE(k.diverged);
}

TEST_CASE("Hardy kernel on the diagonal axis is geometric") {
  for (double s : {0.2, 0.5, 0.8}) {
    const auto z = pt({s, 0.0});
    const KernelValue k = kernel_eval(kBidisk, 0.0, z, z, 400);
    CHECK(k.value.real() == doctest::Approx(1.0 / (1.0 - s * s)).epsilon(1e-12));
    CHECK(k.tail_estimate < 1e-12);
  }
}

TEST_CASE("kernel is Hermitian") {
  const auto z = pt({{0.3, 0.2}, {-0.1, 0.4}}), w = pt({{0.5, -0.3}, {0.2, 0.1}});
  for (const DomainSpec& spec : {kBidisk, DomainSpec(Ellipsoid{{1.0, 2.0}}), DomainSpec(omega_lambda(1, 2, 2.0))}) {
    const Complex a = kernel_eval(spec, 1.0, z, w, 60).value, b = kernel_eval(spec, 1.0, w, z, 60).value;
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("kernel sections reproduce polynomials") {
  std::mt19937_64 rng(8);
  const int cap = 8;
  const auto w = pt({{0.4, 0.1}, {-0.3, 0.2}});
  for (const DomainSpec& spec : {kBidisk, DomainSpec(Ellipsoid{{1.0, 1.0}}), DomainSpec(omega_lambda(2, 1, 10.0))}) {
    const MonomialNorm norms(spec);
    const double beta = 0.8;
    // K_w(z) = sum conj(w)^L z^L / ||z^L||^2 truncated at cap
    SparsePoly kw(2);
    GradedLayout(2, cap).for_each([&](std::size_t, std::span<const int> L) {
      const Complex c = std::pow(std::conj(w[0]), L[0]) * std::pow(std::conj(w[1]), L[1]);
      kw.add_term(MultiIndex(std::vector<int>(L.begin(), L.end())), c / norms.norm_sq(L, beta));
    });
    const SparsePoly f = testing::random_poly(rng, 2, cap);
    Complex pairing = 0.0;
    for (const auto& [L, a] : f.terms()) pairing += a * std::conj(kw.coeff(L)) * norms.norm_sq(L, beta);
    CHECK(std::abs(pairing - f(w)) <= 1e-12 * (1.0 + std::abs(f(w))));
    // <K_w, K_w> = K(w, w)
    const double self = function_norm_sq(kw, norms, beta);
    CHECK(self == doctest::Approx(kernel_eval(spec, beta, w, w, cap).value.real()).epsilon(1e-12));
  }
}

TEST_CASE("kernel divergence is flagged") {
  const auto z = pt({1.0, 1.0});
  const KernelValue k = kernel_eval(kBidisk, 0.0, z, z, 50);
  CHECK(k.diverged);
}

TEST_CASE("Cauchy transforms") {
  const MeasureSpec torus = parse_measure("circle(1)xcircle(1)");
  const auto z = pt({{0.3, 0.1}, {0.2, -0.5}});
  CHECK(cauchy_transform(torus, kBidisk, z, 30).value.real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cauchy_transform(torus, Polydisk{2}, z, 30).value.imag() == 0.0);

  const MeasureSpec edge = parse_measure("fix(1)xcircle(1)");
  for (double s : {0.3, 0.6}) {
    const auto zs = pt({s, 0.0});
    CHECK(cauchy_transform(edge, kBidisk, zs, 200).value.real() == doctest::Approx(1.0 / (1.0 - s)).epsilon(1e-12));
  }
  const MeasureSpec mix = parse_measure("0.25*fix(1)xcircle(1)+0.75*circle(1)xfix(i)");
  const MeasureSpec other = parse_measure("circle(1)xfix(i)");
  const Complex lhs = cauchy_transform(mix, kBidisk, z, 80).value;
  const Complex rhs = 0.25 * cauchy_transform(edge, kBidisk, z, 80).value + 0.75 * cauchy_transform(other, kBidisk, z, 80).value;
  CHECK(std::abs(lhs - rhs) < 1e-13);
}

TEST_CASE("moments") {
  const MeasureSpec mu = parse_measure("fix(0.6+0.8i)xcircle(1)");
  CHECK(std::abs(moment(mu, MultiIndex{2, 0}) - std::pow(Complex(0.6, -0.8), 2)) < 1e-15);
  CHECK(moment(mu, MultiIndex{2, 1}) == Complex(0.0));
  CHECK(moment(mu, MultiIndex{0, 0}) == Complex(1.0));
}

TEST_CASE("energy of the uniform measure on {1} x T") {
  const MeasureSpec mu = parse_measure("fix(1)xcircle(1)");
  const EnergyResult e2 = energy(mu, kBidisk, 2.0);
  CHECK_FALSE(e2.divergent);
  CHECK(std::abs(e2.value - kEnergyBeta2) < 1e-9);
  CHECK(e2.remainder_bound < 1e-9);
  const EnergyResult e1 = energy(mu, kBidisk, 1.0);
  CHECK(e1.divergent);
  CHECK(std::isinf(e1.value));
  // beta = 3: zeta(3) - 1
  CHECK(std::abs(energy(mu, kBidisk, 3.0).value - (std::riemann_zeta(3.0) - 1.0)) < 1e-10);
}

TEST_CASE("energy of the full torus is 1/||1||^2") {
  const MeasureSpec mu = parse_measure("circle(1)xcircle(1)");
  for (double beta : {-1.0, 0.0, 2.0, 5.0}) CHECK(energy(mu, kBidisk, beta).value == doctest::Approx(std::pow(2.0, -beta)));
}

TEST_CASE("energy is rotation invariant and nonincreasing in beta") {
  const double e = energy(parse_measure("fix(1)xcircle(1)"), kBidisk, 2.5).value;
  CHECK(energy(parse_measure("fix(0.6+0.8i)xcircle(1)"), kBidisk, 2.5).value == doctest::Approx(e).epsilon(1e-14));
  CHECK(energy(parse_measure("fix(-1)xcircle(1)"), kBidisk, 2.5).value == doctest::Approx(e).epsilon(1e-14));
  const MeasureSpec mu = parse_measure("0.5*fix(1)xcircle(1)+0.5*circle(1)xfix(-1)");
  double last = std::numeric_limits<double>::infinity();
  for (double beta : {1.2, 1.5, 2.0, 3.0, 4.5}) {
    const EnergyResult r = energy(mu, kBidisk, beta);
    CHECK_FALSE(r.divergent);
    CHECK(r.value <= last);
    last = r.value;
  }
}

TEST_CASE("capacity lower bounds") {
  const MeasureSpec edge = parse_measure("fix(1)xcircle(1)");
  CHECK(capacity_lower_bound(edge, kBidisk, 2.0) == doctest::Approx(1.0 / kEnergyBeta2).epsilon(1e-9));
  CHECK(capacity_lower_bound(edge, kBidisk, 1.0) == 0.0);
  // single point: sum_j (j+1)(j+2)^{-2.5} = zeta(1.5) - zeta(2.5)
  const MeasureSpec point = parse_measure("fix(1)xfix(1)");
  const double want = std::riemann_zeta(1.5) - std::riemann_zeta(2.5);
  CHECK(capacity_lower_bound(point, kBidisk, 2.5) == doctest::Approx(1.0 / want).epsilon(1e-6));
}

TEST_CASE("measures must sit on the boundary support") {
  CHECK_THROWS_AS(energy(parse_measure("fix(0.5)xcircle(1)"), kBidisk, 2.0), InputError);
  CHECK_THROWS_AS(energy(parse_measure("0.3*fix(1)xcircle(1)+0.3*circle(1)xfix(1)"), kBidisk, 2.0), InputError);
  CHECK_THROWS_AS(energy(parse_measure("fix(1)"), kBidisk, 2.0), InputError);
  // vertex torus of omega lambda: (1/4, 1)
  CHECK_NOTHROW(energy(parse_measure("fix(0.25)xcircle(1)"), omega_lambda(1, 1, 4.0), 2.0));
  CHECK_THROWS_AS(energy(parse_measure("fix(1)xcircle(1)"), omega_lambda(1, 1, 4.0), 2.0), InputError);
  CHECK_NOTHROW(energy(parse_measure("fix(0.6)xfix(0.8)"), Ellipsoid{{1.0, 1.0}}, 3.0));
}

TEST_CASE("point evaluation on the bidisk") {
  const auto one = pt({1.0, 1.0});
  const EnergyResult e3 = pointeval_bound(kBidisk, 3.0, one);
  CHECK_FALSE(e3.divergent);
  CHECK(e3.value == doctest::Approx(std::riemann_zeta(2.0) - std::riemann_zeta(3.0)).epsilon(1e-7));
  CHECK(pointeval_bound(kBidisk, 2.0, one).divergent);
  for (double beta : {1.5, 1.9, 2.0})
    CHECK(pointeval_bound(kBidisk, beta, one).divergent);
  for (double beta : {2.1, 2.5, 4.0})
    CHECK_FALSE(pointeval_bound(kBidisk, beta, one).divergent);
  CHECK_THROWS_AS(pointeval_bound(kBidisk, 3.0, pt({1.1, 0.0})), InputError);
}

TEST_CASE("point evaluation on an ellipsoid edge point") {
  // p = (2,2), zeta = (1, 0): S(j) = 1, and the kernel diagonal is sum (j/2 + 1)(j+2)^{-beta}
  const auto edge = pt({1.0, 0.0});
  const EnergyResult e = pointeval_bound(Ellipsoid{{2.0, 2.0}}, 4.0, edge);
  CHECK(e.value == doctest::Approx(0.5 * (std::riemann_zeta(3.0) - 1.0)).epsilon(1e-8));
  CHECK(pointeval_bound(Ellipsoid{{2.0, 2.0}}, 2.0, edge).divergent);
}

TEST_CASE("Gamma-binomial sums") {
  for (int j : {0, 1, 7, 200}) CHECK(gamma_binomial_sum(2.0, 0.0, j) == 1.0);
  for (double r : {0.1, 0.5, 0.9}) CHECK(gamma_binomial_sum(3.0, r, 0) == 1.0);
  // p = 1 is the binomial theorem
  CHECK(gamma_binomial_sum(1.0, 0.3, 17) == doctest::Approx(1.0).epsilon(1e-13));
  // direct sum for a small case
  const double p = 2.0, r = 0.5;
  double direct = 0.0;
  for (int j1 = 0; j1 <= 5; ++j1)
    direct += std::tgamma(2.5 + 1.0) / (std::tgamma(j1 / p + 1.0) * std::tgamma((5 - j1) / p + 1.0)) *
              std::pow(r, j1 / p) * std::pow(1.0 - r, (5 - j1) / p);
  CHECK(gamma_binomial_sum(p, r, 5) == doctest::Approx(direct).epsilon(1e-13));
  const SBoundReport rep = s_bound_check(2.0, 0.5, 2000);
  CHECK(rep.values.size() == 2001);
  CHECK(rep.values[0] == 1.0);
  CHECK(rep.max < 2.01);
  CHECK(rep.last_decile_max <= rep.first_decile_max * 1.01);
  CHECK_THROWS_AS(s_bound_check(2.0, 0.5, 5), InputError);
}

TEST_CASE("Laplace asymptotics") {
  for (double r : {0.2, 0.5, 0.8}) {
    CHECK(laplace_h(r, r) == doctest::Approx(0.0));
    // central difference for h'(r)
    const double d = 1e-6;
    CHECK(std::abs(laplace_h(r + d, r) - laplace_h(r - d, r)) / (2 * d) < 1e-8);
  }
  const std::vector<double> lambdas{50.0, 200.0, 500.0};
  for (double r : {0.3, 0.5, 0.7}) {
    const auto ratios = laplace_verify(r, lambdas);
    REQUIRE(ratios.size() == 3);
    CHECK(std::abs(ratios[2].ratio - 1.0) < 0.05);
    CHECK(std::abs(ratios[1].ratio - 1.0) < std::abs(ratios[0].ratio - 1.0));
    CHECK(std::abs(ratios[2].ratio - 1.0) < std::abs(ratios[1].ratio - 1.0));
  }
  CHECK_THROWS_AS(laplace_verify(1.0, lambdas), InputError);
}
