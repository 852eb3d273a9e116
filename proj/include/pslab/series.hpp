#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pslab/errors.hpp"

namespace pslab {

/// Exponent vector L = (l_1, ..., l_n) with nonnegative entries.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dimension) : exps_(dimension, 0) {}
  MultiIndex(std::initializer_list<int> exps) : MultiIndex(std::vector<int>(exps)) {}
  explicit MultiIndex(std::vector<int> exps);

  static MultiIndex unit(std::size_t dimension, std::size_t i, int power = 1);

  std::size_t dimension() const noexcept { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  void set(std::size_t i, int value);
  int degree() const noexcept { return degree_; }
  const std::vector<int>& exponents() const noexcept { return exps_; }

  // Componentwise order: true iff every entry of *this is <= the matching entry of other.
  bool divides(const MultiIndex& other) const;
  MultiIndex operator+(const MultiIndex& other) const;
  MultiIndex operator-(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.exps_ == b.exps_; }

  std::string to_string() const;

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Total degree first, then ascending lexicographic order of the exponent vector.
struct GradedOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.exponents() < b.exponents();
  }
};

/// Dense enumeration of all multi-indices of a fixed dimension with |L| <= cap,
/// in graded order. rank() is the inverse of index().
class GradedLayout {
 public:
  GradedLayout(std::size_t dimension, int cap);

  std::size_t dimension() const noexcept { return dim_; }
  int cap() const noexcept { return cap_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t degree_offset(int d) const;  // number of indices with |L| < d
  std::size_t rank(std::span<const int> exps) const;
  std::size_t rank(const MultiIndex& L) const { return rank(L.exponents()); }
  // Writes the exponents of the pos-th index into out (size = dimension).
  void index(std::size_t pos, std::span<int> out) const;
  MultiIndex index(std::size_t pos) const;

  // Advances exps to the next composition of the same degree; false when exhausted.
  static bool next_in_degree(std::span<int> exps);

  // Visits every index in graded order as fn(pos, exps).
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<int> exps(dim_);
    std::size_t pos = 0;
    for (int d = 0; d <= cap_; ++d) {
      std::fill(exps.begin(), exps.end(), 0);
      exps.back() = d;
      do {
        fn(pos++, std::span<const int>(exps));
      } while (next_in_degree(exps));
    }
  }

 private:
  std::uint64_t binom(int m, int k) const;

  std::size_t dim_;
  int cap_;
  std::size_t size_;
  std::vector<std::uint64_t> table_;  // C(m, k) for m <= cap + dim, k <= dim
};

/// Finite-support multivariate polynomial with coefficients in Scalar.
/// Zero coefficients are never stored; pruning is by exact zero only.
template <class Scalar>
class BasicSparsePoly {
 public:
  using scalar_type = Scalar;
  using Terms = std::map<MultiIndex, Scalar, GradedOrder>;

  explicit BasicSparsePoly(std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) throw InputError("polynomial dimension must be positive");
  }

  static BasicSparsePoly constant(std::size_t dimension, Scalar c) {
    BasicSparsePoly p(dimension);
    p.add_term(MultiIndex(dimension), c);
    return p;
  }
  static BasicSparsePoly monomial(const MultiIndex& L, Scalar c = Scalar(1)) {
    BasicSparsePoly p(L.dimension());
    p.add_term(L, c);
    return p;
  }
  static BasicSparsePoly variable(std::size_t dimension, std::size_t i) {
    return monomial(MultiIndex::unit(dimension, i));
  }

  std::size_t dimension() const noexcept { return dim_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  Scalar coeff(const MultiIndex& L) const {
    auto it = terms_.find(L);
    return it == terms_.end() ? Scalar(0) : it->second;
  }
  Scalar constant_term() const { return coeff(MultiIndex(dim_)); }

  // Highest total degree; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first.degree(); }

  void add_term(const MultiIndex& L, Scalar c) {
    check_dimension(L);
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.try_emplace(L, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }

  // Appends a term known to sort after every stored key. Used by dense-to-sparse conversion.
  void append_sorted(const MultiIndex& L, Scalar c) {
    if (c != Scalar(0)) terms_.emplace_hint(terms_.end(), L, c);
  }

  Scalar operator()(std::span<const Scalar> z) const {
    if (z.size() != dim_) throw InputError("evaluation point has wrong dimension");
    Scalar acc(0);
    for (const auto& [L, c] : terms_) {
      Scalar m = c;
      for (std::size_t i = 0; i < dim_; ++i)
        if (L[i] != 0) m *= std::pow(z[i], L[i]);
      acc += m;
    }
    return acc;
  }

  BasicSparsePoly& operator+=(const BasicSparsePoly& o) {
    check_same(o);
    for (const auto& [L, c] : o.terms_) add_term(L, c);
    return *this;
  }
  BasicSparsePoly& operator-=(const BasicSparsePoly& o) {
    check_same(o);
    for (const auto& [L, c] : o.terms_) add_term(L, -c);
    return *this;
  }
  BasicSparsePoly& operator*=(Scalar s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = it->second == Scalar(0) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend BasicSparsePoly operator+(BasicSparsePoly a, const BasicSparsePoly& b) { return a += b; }
  friend BasicSparsePoly operator-(BasicSparsePoly a, const BasicSparsePoly& b) { return a -= b; }
  friend BasicSparsePoly operator-(BasicSparsePoly a) { return a *= Scalar(-1); }
  friend BasicSparsePoly operator*(BasicSparsePoly a, Scalar s) { return a *= s; }
  friend BasicSparsePoly operator*(Scalar s, BasicSparsePoly a) { return a *= s; }
  friend BasicSparsePoly operator*(const BasicSparsePoly& a, const BasicSparsePoly& b) {
    a.check_same(b);
    BasicSparsePoly out(a.dim_);
    for (const auto& [La, ca] : a.terms_)
      for (const auto& [Lb, cb] : b.terms_) out.add_term(La + Lb, ca * cb);
    return out;
  }
  friend bool operator==(const BasicSparsePoly& a, const BasicSparsePoly& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }

  void check_same(const BasicSparsePoly& o) const {
    if (o.dim_ != dim_) throw InputError("polynomial dimension mismatch");
  }

 private:
  void check_dimension(const MultiIndex& L) const {
    if (L.dimension() != dim_) throw InputError("multi-index dimension mismatch");
  }

  std::size_t dim_;
  Terms terms_;
};

/// Power series known through total degree cap. Every stored term has |L| <= cap.
template <class Scalar>
class BasicTruncatedSeries {
 public:
  BasicTruncatedSeries(BasicSparsePoly<Scalar> base, int cap) : base_(base.dimension()), cap_(cap) {
    if (cap < 0) throw InputError("truncation cap must be nonnegative");
    for (const auto& [L, c] : base.terms())
      if (L.degree() <= cap) base_.append_sorted(L, c);
  }

  const BasicSparsePoly<Scalar>& base() const noexcept { return base_; }
  int cap() const noexcept { return cap_; }
  std::size_t dimension() const noexcept { return base_.dimension(); }

 private:
  BasicSparsePoly<Scalar> base_;
  int cap_;
};

using Complex = std::complex<double>;
using SparsePoly = BasicSparsePoly<Complex>;
using TruncatedSeries = BasicTruncatedSeries<Complex>;

namespace detail {
// Dense accumulation pays off while the layout stays below this many slots.
inline constexpr std::size_t kDenseLayoutLimit = std::size_t{1} << 23;

template <class Scalar>
BasicSparsePoly<Scalar> dense_to_sparse(const GradedLayout& layout, const std::vector<Scalar>& dense) {
  BasicSparsePoly<Scalar> out(layout.dimension());
  layout.for_each([&](std::size_t pos, std::span<const int> exps) {
    if (dense[pos] != Scalar(0)) out.append_sorted(MultiIndex(std::vector<int>(exps.begin(), exps.end())), dense[pos]);
  });
  return out;
}
}  // namespace detail

/// Product of a and b with every term of total degree > cap discarded.
template <class Scalar>
BasicTruncatedSeries<Scalar> poly_mul(const BasicSparsePoly<Scalar>& a, const BasicSparsePoly<Scalar>& b,
                                      int cap) {
  a.check_same(b);
  if (cap < 0) throw InputError("truncation cap must be nonnegative");
  const std::size_t dim = a.dimension();
  const double slots = std::pow(static_cast<double>(cap) + 1.0, static_cast<double>(dim));
  if (slots > static_cast<double>(detail::kDenseLayoutLimit) || a.size() * b.size() < 64) {
    BasicSparsePoly<Scalar> out(dim);
    for (const auto& [La, ca] : a.terms()) {
      if (La.degree() > cap) break;
      for (const auto& [Lb, cb] : b.terms()) {
        if (La.degree() + Lb.degree() > cap) break;
        out.add_term(La + Lb, ca * cb);
      }
    }
    return BasicTruncatedSeries<Scalar>(std::move(out), cap);
  }
  GradedLayout layout(dim, cap);
  std::vector<Scalar> dense(layout.size(), Scalar(0));
  std::vector<int> sum(dim);
  for (const auto& [La, ca] : a.terms()) {
    if (La.degree() > cap) break;
    for (const auto& [Lb, cb] : b.terms()) {
      if (La.degree() + Lb.degree() > cap) break;
      for (std::size_t i = 0; i < dim; ++i) sum[i] = La[i] + Lb[i];
      dense[layout.rank(sum)] += ca * cb;
    }
  }
  return BasicTruncatedSeries<Scalar>(detail::dense_to_sparse(layout, dense), cap);
}

template <class Scalar>
BasicTruncatedSeries<Scalar> poly_mul(const BasicTruncatedSeries<Scalar>& a, const BasicTruncatedSeries<Scalar>& b,
                                      int cap) {
  return poly_mul(a.base(), b.base(), std::min({cap, a.cap(), b.cap()}));
}

/// Coefficients h of 1/f through total degree cap, by the triangular recursion
/// h_L = -(1/f_0) * sum_{K != 0} f_K h_{L-K}, visited in graded order.
template <class Scalar>
BasicTruncatedSeries<Scalar> series_reciprocal(const BasicSparsePoly<Scalar>& f, int cap) {
  if (cap < 0) throw InputError("truncation cap must be nonnegative");
  const Scalar f0 = f.constant_term();
  if (f0 == Scalar(0)) throw SingularInversionError("cannot invert a series with zero constant term");
  const std::size_t dim = f.dimension();

  std::vector<std::pair<std::vector<int>, Scalar>> tail;
  for (const auto& [K, c] : f.terms())
    if (K.degree() > 0 && K.degree() <= cap) tail.emplace_back(K.exponents(), c);

  GradedLayout layout(dim, cap);
  std::vector<Scalar> h(layout.size(), Scalar(0));
  const Scalar inv0 = Scalar(1) / f0;
  h[0] = inv0;
  std::vector<int> diff(dim);
  layout.for_each([&](std::size_t pos, std::span<const int> L) {
    if (pos == 0) return;
    Scalar acc(0);
    for (const auto& [K, c] : tail) {
      bool fits = true;
      for (std::size_t i = 0; i < dim && fits; ++i) {
        diff[i] = L[i] - K[i];
        fits = diff[i] >= 0;
      }
      if (fits) acc += c * h[layout.rank(diff)];
    }
    h[pos] = -acc * inv0;
  });
  return BasicTruncatedSeries<Scalar>(detail::dense_to_sparse(layout, h), cap);
}

/// f_r(z) = f(rz): the coefficient at L is scaled by r^{|L|}.
template <class Scalar>
BasicSparsePoly<Scalar> dilate(const BasicSparsePoly<Scalar>& f, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw InputError("dilation radius must lie in [0, 1]");
  BasicSparsePoly<Scalar> out(f.dimension());
  for (const auto& [L, c] : f.terms()) out.append_sorted(L, c * Scalar(std::pow(r, L.degree())));
  return out;
}

template <class Scalar>
BasicSparsePoly<Scalar> partial_derivative(const BasicSparsePoly<Scalar>& f, std::size_t i) {
  BasicSparsePoly<Scalar> out(f.dimension());
  for (const auto& [L, c] : f.terms()) {
    if (L[i] == 0) continue;
    MultiIndex K = L;
    K.set(i, L[i] - 1);
    out.add_term(K, c * Scalar(L[i]));
  }
  return out;
}

}  // namespace pslab
