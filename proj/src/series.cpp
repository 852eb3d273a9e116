#include "pslab/series.hpp"

#include <numeric>
#include <sstream>

namespace pslab {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw InputError("multi-index entries must be nonnegative");
    degree_ += e;
  }
}

MultiIndex MultiIndex::unit(std::size_t dimension, std::size_t i, int power) {
  MultiIndex L(dimension);
  L.set(i, power);
  return L;
}

void MultiIndex::set(std::size_t i, int value) {
  if (value < 0) throw InputError("multi-index entries must be nonnegative");
  degree_ += value - exps_.at(i);
  exps_[i] = value;
}

bool MultiIndex::divides(const MultiIndex& other) const {
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (exps_[i] > other.exps_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.dimension() != dimension()) throw InputError("multi-index dimension mismatch");
  MultiIndex out = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) out.exps_[i] += other.exps_[i];
  out.degree_ += other.degree_;
  return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (other.dimension() != dimension()) throw InputError("multi-index dimension mismatch");
  std::vector<int> out(exps_.size());
  for (std::size_t i = 0; i < exps_.size(); ++i) out[i] = exps_[i] - other.exps_[i];
  return MultiIndex(std::move(out));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < exps_.size(); ++i) os << (i ? "," : "") << exps_[i];
  os << ')';
  return os.str();
}

GradedLayout::GradedLayout(std::size_t dimension, int cap) : dim_(dimension), cap_(cap) {
  if (dimension == 0) throw InputError("layout dimension must be positive");
  if (cap < 0) throw InputError("truncation cap must be nonnegative");
  const int rows = cap + static_cast<int>(dim_) + 1;
  table_.assign(static_cast<std::size_t>(rows) * (dim_ + 1), 0);
  for (int m = 0; m < rows; ++m) {
    table_[static_cast<std::size_t>(m) * (dim_ + 1)] = 1;
    for (std::size_t k = 1; k <= dim_ && k <= static_cast<std::size_t>(m); ++k) {
      const std::size_t up = static_cast<std::size_t>(m - 1) * (dim_ + 1);
      table_[static_cast<std::size_t>(m) * (dim_ + 1) + k] = table_[up + k - 1] + table_[up + k];
    }
  }
  size_ = degree_offset(cap + 1);
}

std::uint64_t GradedLayout::binom(int m, int k) const {
  if (m < 0 || k < 0 || k > m) return 0;
  return table_[static_cast<std::size_t>(m) * (dim_ + 1) + static_cast<std::size_t>(k)];
}

std::size_t GradedLayout::degree_offset(int d) const {
  // #{L : |L| < d} = C(d - 1 + n, n)
  if (d <= 0) return 0;
  return binom(d - 1 + static_cast<int>(dim_), static_cast<int>(dim_));
}

std::size_t GradedLayout::rank(std::span<const int> exps) const {
  int d = 0;
  for (int e : exps) d += e;
  std::size_t r = degree_offset(d);
  int rem = d;
  // Compositions smaller in ascending lex order: hockey-stick sums per coordinate.
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const int k = static_cast<int>(dim_ - i - 1);
    r += binom(rem + k, k) - binom(rem - exps[i] + k, k);
    rem -= exps[i];
  }
  return r;
}

bool GradedLayout::next_in_degree(std::span<int> exps) {
  const std::size_t n = exps.size();
  int suffix = 0;
  for (std::size_t i = n - 1; i-- > 0;) {
    suffix += exps[i + 1];
    if (suffix > 0) {
      ++exps[i];
      for (std::size_t t = i + 1; t + 1 < n; ++t) exps[t] = 0;
      exps[n - 1] = suffix - 1;
      return true;
    }
  }
  return false;
}

void GradedLayout::index(std::size_t pos, std::span<int> out) const {
  int d = 0;
  while (degree_offset(d + 1) <= pos) ++d;
  std::size_t r = pos - degree_offset(d);
  int rem = d;
  for (std::size_t i = 0; i + 1 < dim_; ++i) {
    const int k = static_cast<int>(dim_ - i - 1);
    // Find the smallest v such that the block of compositions starting with v contains r.
    int v = 0;
    while (true) {
      const std::uint64_t block = binom(rem - v + k - 1, k - 1);
      if (r < block) break;
      r -= block;
      ++v;
    }
    out[i] = v;
    rem -= v;
  }
  out[dim_ - 1] = rem;
}

MultiIndex GradedLayout::index(std::size_t pos) const {
  std::vector<int> exps(dim_);
  index(pos, exps);
  return MultiIndex(std::move(exps));
}

}  // namespace pslab
