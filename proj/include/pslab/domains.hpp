#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pslab {

/// {z : sum |z_i|^{2 p_i} < 1}; p_i = 1 for every i is the unit ball.
struct Ellipsoid {
  std::vector<double> p;
  std::size_t dimension() const { return p.size(); }
};

struct Polydisk {
  std::size_t n = 0;
  std::size_t dimension() const { return n; }
};

/// One defining inequality lambda * prod |z_i|^{beta_i} < 1 with sum beta_i = 1.
struct Face {
  double lambda = 1.0;
  Eigen::VectorXd beta;
};

/// Polyhedral Reinhardt domain with exhaustion u = log max_j p_j.
struct PolyhedralReinhardt {
  std::size_t n = 0;
  std::vector<Face> faces;
  std::size_t dimension() const { return n; }
};

using DomainSpec = std::variant<Ellipsoid, Polydisk, PolyhedralReinhardt>;

std::size_t dimension(const DomainSpec& spec);
std::string kind_name(const DomainSpec& spec);

/// Throws InputError when the domain description is inconsistent.
void validate(const DomainSpec& spec);

/// (lambda, beta) -> (lambda^{1/sum beta}, beta / sum beta). The defining inequality is unchanged.
Face normalized_face(double lambda, const Eigen::VectorXd& beta);

/// Faces |z_1| < 1, |z_2| < 1, lambda |z_1^m z_2^n| < 1, already normalized.
PolyhedralReinhardt omega_lambda(int m, int n, double lambda);
PolyhedralReinhardt polydisk_faces(std::size_t n);

/// A support component of the boundary measure: the torus |z_i| = radii_i carrying
/// probability mass weight. faces lists the active faces of the vertex.
struct VertexTorus {
  Eigen::VectorXd radii;
  double weight = 0.0;
  std::vector<std::size_t> faces;
};

/// Tolerance for "no other face cuts the vertex off", in log coordinates.
inline constexpr double kVertexTolerance = 1e-10;

/// Solves beta^{faces} . x = level - log lambda for the log-radii x of a vertex.
/// Because each row sums to one, x(level) = x(0) + level.
Eigen::VectorXd vertex_log_radii(const PolyhedralReinhardt& spec, std::span<const std::size_t> faces,
                                 double level = 0.0);

/// Support tori and weights of the boundary measure. Weights are proportional to
/// |det| of the active exponent matrix and normalized to total mass one; vertices
/// reached from several face subsets are merged.
std::vector<VertexTorus> vertex_tori(const PolyhedralReinhardt& spec);

/// max over the defining functions at |z|; the domain is {value < 1}.
double defining_value(const DomainSpec& spec, std::span<const double> moduli);

/// Result of the supporting-hyperplane refinement of a log-convex Reinhardt domain.
struct ReinhardtApproximation {
  PolyhedralReinhardt domain;
  std::vector<std::size_t> used_samples;
  std::vector<std::string> warnings;
};

/// Starts from the polydisk faces and adds up to k faces x.v + c <= 0, one per boundary
/// sample (log coordinates), with v in the unit simplex supporting the sample hull.
ReinhardtApproximation approximate_reinhardt(const std::vector<Eigen::VectorXd>& boundary_samples, int k);

}  // namespace pslab
