#include "pslab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "pslab/errors.hpp"

namespace pslab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Calls fn on every k-subset of {0, ..., m-1} in lexicographic order.
void for_each_subset(std::size_t m, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t t = i; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

Eigen::MatrixXd exponent_matrix(const PolyhedralReinhardt& spec, std::span<const std::size_t> faces) {
  Eigen::MatrixXd B(faces.size(), spec.n);
  for (std::size_t r = 0; r < faces.size(); ++r) B.row(r) = spec.faces[faces[r]].beta.transpose();
  return B;
}

}  // namespace

std::size_t dimension(const DomainSpec& spec) {
  return std::visit([](const auto& d) { return d.dimension(); }, spec);
}

std::string kind_name(const DomainSpec& spec) {
  return std::visit(Overloaded{[](const Ellipsoid&) { return std::string("ellipsoid"); },
                               [](const Polydisk&) { return std::string("polydisk"); },
                               [](const PolyhedralReinhardt&) { return std::string("polyhedral"); }},
                    spec);
}

void validate(const DomainSpec& spec) {
  std::visit(Overloaded{
                 [](const Ellipsoid& e) {
                   if (e.p.empty()) throw InputError("ellipsoid needs at least one exponent");
                   for (double p : e.p)
                     if (!std::isfinite(p) || p < 1.0) throw InputError("ellipsoid exponents must be finite and >= 1");
                 },
                 [](const Polydisk& d) {
                   if (d.n == 0) throw InputError("polydisk dimension must be positive");
                 },
                 [](const PolyhedralReinhardt& d) {
                   if (d.n == 0) throw InputError("polyhedral domain dimension must be positive");
                   if (d.faces.size() < d.n) throw InputError("polyhedral domain needs at least n faces");
                   for (const Face& f : d.faces) {
                     if (!std::isfinite(f.lambda) || f.lambda < 1.0) throw InputError("face lambda must be >= 1");
                     if (static_cast<std::size_t>(f.beta.size()) != d.n)
                       throw InputError("face exponent row has the wrong length");
                     if ((f.beta.array() < 0.0).any()) throw InputError("face exponents must be nonnegative");
                     if (std::abs(f.beta.sum() - 1.0) > 1e-12)
                       throw InputError("face exponent row must sum to 1 (normalize it explicitly)");
                   }
                   (void)vertex_tori(d);
                 }},
             spec);
}

Face normalized_face(double lambda, const Eigen::VectorXd& beta) {
  const double total = beta.sum();
  if (!(total > 0.0)) throw InputError("face exponent row must have a positive sum");
  return Face{std::pow(lambda, 1.0 / total), beta / total};
}

PolyhedralReinhardt polydisk_faces(std::size_t n) {
  PolyhedralReinhardt d{n, {}};
  for (std::size_t i = 0; i < n; ++i) d.faces.push_back(Face{1.0, Eigen::VectorXd::Unit(n, i)});
  return d;
}

PolyhedralReinhardt omega_lambda(int m, int n, double lambda) {
  if (m < 1 || n < 1) throw InputError("omega_lambda exponents must be positive");
  PolyhedralReinhardt d = polydisk_faces(2);
  d.faces.push_back(normalized_face(lambda, Eigen::Vector2d(m, n)));
  return d;
}

Eigen::VectorXd vertex_log_radii(const PolyhedralReinhardt& spec, std::span<const std::size_t> faces, double level) {
  if (faces.size() != spec.n) throw InputError("a vertex needs exactly n faces");
  const Eigen::MatrixXd B = exponent_matrix(spec, faces);
  Eigen::VectorXd rhs(spec.n);
  for (std::size_t r = 0; r < faces.size(); ++r) rhs[r] = level - std::log(spec.faces[faces[r]].lambda);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!lu.isInvertible()) throw InputError("singular exponent matrix at vertex");
  return lu.solve(rhs);
}

std::vector<VertexTorus> vertex_tori(const PolyhedralReinhardt& spec) {
  if (spec.faces.size() < spec.n) throw InputError("polyhedral domain needs at least n faces");
  std::vector<VertexTorus> out;
  std::vector<Eigen::VectorXd> logs;
  bool any_nonsingular = false;
  for_each_subset(spec.faces.size(), spec.n, [&](const std::vector<std::size_t>& subset) {
    const Eigen::MatrixXd B = exponent_matrix(spec, subset);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    const double det = lu.determinant();
    if (std::abs(det) < 1e-12) return;
    any_nonsingular = true;
    const Eigen::VectorXd x = vertex_log_radii(spec, subset, 0.0);
    for (const Face& f : spec.faces)
      if (f.beta.dot(x) + std::log(f.lambda) > kVertexTolerance) return;
    if ((x.array() > kVertexTolerance).any())
      throw InputError("polyhedral domain is not contained in the unit polydisk");
    for (std::size_t t = 0; t < out.size(); ++t) {
      if ((logs[t] - x).cwiseAbs().maxCoeff() < 1e-9) {
        out[t].weight += std::abs(det);
        for (std::size_t f : subset)
          if (std::find(out[t].faces.begin(), out[t].faces.end(), f) == out[t].faces.end()) out[t].faces.push_back(f);
        return;
      }
    }
    logs.push_back(x);
    out.push_back(VertexTorus{x.array().exp().min(1.0).matrix(), std::abs(det), subset});
  });
  if (!any_nonsingular) throw DegenerateDomainError("every exponent matrix of the polyhedral domain is singular");
  if (out.empty()) throw DegenerateDomainError("no admissible vertex found");
  double total = 0.0;
  for (const auto& t : out) total += t.weight;
  for (auto& t : out) {
    t.weight /= total;
    std::sort(t.faces.begin(), t.faces.end());
  }
  return out;
}

double defining_value(const DomainSpec& spec, std::span<const double> moduli) {
  if (moduli.size() != dimension(spec)) throw InputError("point has the wrong dimension");
  return std::visit(Overloaded{[&](const Ellipsoid& e) {
                                 double s = 0.0;
                                 for (std::size_t i = 0; i < moduli.size(); ++i) s += std::pow(moduli[i], 2.0 * e.p[i]);
                                 return s;
                               },
                               [&](const Polydisk&) { return *std::max_element(moduli.begin(), moduli.end()); },
                               [&](const PolyhedralReinhardt& d) {
                                 double best = 0.0;
                                 for (const Face& f : d.faces) {
                                   double v = f.lambda;
                                   for (std::size_t i = 0; i < moduli.size(); ++i)
                                     if (f.beta[i] != 0.0) v *= std::pow(moduli[i], f.beta[i]);
                                   best = std::max(best, v);
                                 }
                                 return best;
                               }},
                    spec);
}

namespace {

// Vertices of {v in simplex : d_j . v <= 0}; empty when infeasible.
std::vector<Eigen::VectorXd> feasible_normal_vertices(const std::vector<Eigen::VectorXd>& directions, std::size_t n) {
  // Inequalities a . v <= 0: first -e_t (nonnegativity), then the sample directions.
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t t = 0; t < n; ++t) rows.push_back(-Eigen::VectorXd::Unit(n, t));
  for (const auto& d : directions) rows.push_back(d);
  constexpr double kFeasTol = 1e-12;
  std::vector<Eigen::VectorXd> vertices;
  for_each_subset(rows.size(), n - 1, [&](const std::vector<std::size_t>& active) {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    A.row(0).setOnes();
    b[0] = 1.0;
    for (std::size_t r = 0; r < active.size(); ++r) A.row(r + 1) = rows[active[r]].transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd v = lu.solve(b);
    for (const auto& a : rows)
      if (a.dot(v) > kFeasTol * std::max(1.0, a.cwiseAbs().maxCoeff())) return;
    for (const auto& w : vertices)
      if ((w - v).cwiseAbs().maxCoeff() < 1e-12) return;
    vertices.push_back(v);
  });
  return vertices;
}

}  // namespace

ReinhardtApproximation approximate_reinhardt(const std::vector<Eigen::VectorXd>& samples, int k) {
  if (samples.empty()) throw InputError("approximation needs at least one boundary sample");
  if (k < 0 || static_cast<std::size_t>(k) > samples.size())
    throw InputError("number of faces must lie between 0 and the number of samples");
  const std::size_t n = static_cast<std::size_t>(samples.front().size());
  if (n == 0) throw InputError("samples must have positive dimension");
  for (const auto& x : samples) {
    if (static_cast<std::size_t>(x.size()) != n) throw InputError("samples have inconsistent dimensions");
    if ((x.array() > kVertexTolerance).any()) throw InputError("samples must lie in the closed negative orthant");
  }

  ReinhardtApproximation out{polydisk_faces(n), {}, {}};
  auto current = [&](const Eigen::VectorXd& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Face& f : out.domain.faces) best = std::max(best, f.beta.dot(x) + std::log(f.lambda));
    return best;
  };

  int added = 0;
  for (std::size_t i = 0; i < samples.size() && added < k; ++i) {
    const Eigen::VectorXd& xi = samples[i];
    if (current(xi) >= -1e-12) continue;  // already on the boundary of the approximation
    std::vector<Eigen::VectorXd> dirs;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (j == i) continue;
      Eigen::VectorXd d = samples[j] - xi;
      if (d.cwiseAbs().maxCoeff() > 1e-14) dirs.push_back(std::move(d));
    }
    const auto vertices = feasible_normal_vertices(dirs, n);
    if (vertices.empty()) {
      out.warnings.push_back("sample " + std::to_string(i) +
                             " has no supporting simplex-normal hyperplane; skipped as interior");
      continue;
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (const auto& w : vertices) v += w;
    v /= static_cast<double>(vertices.size());
    v = v.cwiseMax(0.0);
    v /= v.sum();
    out.domain.faces.push_back(Face{std::exp(-v.dot(xi)), v});
    out.used_samples.push_back(i);
    ++added;
  }
  return out;
}

}  // namespace pslab
