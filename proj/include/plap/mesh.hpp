#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace plap {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Point = Eigen::Vector2d;

enum class DomainKind { interval, rectangle, radial_ball };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(std::string_view name);

/// One quadrature point of the piecewise-constant discrete gradient.
///
/// Component k of the gradient is (u[plus[k]] - u[minus[k]]) / h.  The energy
/// density at the sample is integrated with `weight`.
struct GradientSample {
  double weight = 0.0;
  int components = 1;
  std::array<Index, 2> plus{0, 0};
  std::array<Index, 2> minus{0, 0};
};

class Domain;
using DomainPtr = std::shared_ptr<const Domain>;

/// Uniform grid on an interval, a rectangle, or the radial section [0, R] of
/// an N-dimensional ball.  Boundary nodes carry the homogeneous Dirichlet
/// condition; the radial origin is an interior node where u'(0) = 0 holds
/// through the vanishing r^{N-1} weight.
class Domain {
 public:
  static DomainPtr interval(double length, Index cells);
  /// ny is derived from ly / h with h = lx / nx; the lengths must be commensurate.
  static DomainPtr rectangle(double lx, double ly, Index nx);
  static DomainPtr radial_ball(double radius, int dimension, Index cells);

  DomainKind kind() const { return kind_; }
  int ambient_dimension() const { return ambient_dimension_; }
  /// Number of grid axes: 2 for rectangles, 1 otherwise.
  int grid_dimension() const { return kind_ == DomainKind::rectangle ? 2 : 1; }
  double h() const { return h_; }
  Index size() const { return static_cast<Index>(boundary_.size()); }
  Index cells_x() const { return nx_; }
  Index cells_y() const { return ny_; }
  /// Interval length, rectangle side lengths, or ball radius.
  const std::vector<double>& extents() const { return extents_; }

  bool is_boundary(Index node) const { return boundary_[static_cast<std::size_t>(node)]; }
  const std::vector<Index>& interior() const { return interior_; }
  /// (x, y) for rectangles, (x, 0) for intervals, (r, 0) for the ball.
  Point coordinates(Index node) const;
  /// Node index of grid point (i, j); j is ignored for one-axis grids.
  Index node(Index i, Index j = 0) const { return j * (nx_ + 1) + i; }

  /// Lumped mass (dual-cell measure) of every node.
  const Vector& mass() const { return mass_; }
  const std::vector<GradientSample>& gradient_samples() const { return samples_; }

  std::string describe() const;

 private:
  Domain() = default;
  void finalize();

  DomainKind kind_ = DomainKind::interval;
  int ambient_dimension_ = 1;
  double h_ = 0.0;
  Index nx_ = 0;
  Index ny_ = 0;
  std::vector<double> extents_;
  std::vector<bool> boundary_;
  std::vector<Index> interior_;
  Vector mass_;
  std::vector<GradientSample> samples_;
};

/// Nodal values on a Domain.  When the Dirichlet flag is set the boundary
/// values are exactly zero.  Values are always finite.
class ScalarField {
 public:
  ScalarField(DomainPtr domain, Vector values, bool dirichlet);

  static ScalarField zeros(DomainPtr domain, bool dirichlet = true);
  /// Samples fn(x, y) at every node; boundary nodes are zeroed when `dirichlet`.
  static ScalarField sample(DomainPtr domain, const std::function<double(const Point&)>& fn,
                            bool dirichlet);

  const Domain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  const Vector& values() const { return values_; }
  bool dirichlet() const { return dirichlet_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

  ScalarField scaled(double k) const;

 private:
  DomainPtr domain_;
  Vector values_;
  bool dirichlet_;
};

/// Nonnegative, not identically zero, sampled coefficient.
class Weight {
 public:
  explicit Weight(ScalarField field);
  static Weight constant(DomainPtr domain, double value);

  const ScalarField& field() const { return field_; }
  const Vector& values() const { return field_.values(); }
  const Domain& domain() const { return field_.domain(); }
  double max() const { return field_.values().maxCoeff(); }

  Weight scaled(double c) const;
  /// Nodewise maximum of two weights on the same domain.
  static Weight max(const Weight& a, const Weight& b);

 private:
  ScalarField field_;
};

double sup_norm(const ScalarField& f);

/// Nodal magnitude of the discrete gradient: centered differences at interior
/// nodes, second-order one-sided differences on boundary nodes, zero at the
/// radial origin.
ScalarField grad_magnitude(const ScalarField& f);

/// Per-sample gradient components of nodal values `u` (cell-level quantity).
Eigen::Matrix2Xd cell_gradients(const Domain& domain, const Vector& u);

enum class ResidualMode {
  absolute,  ///< max |r_i|
  sub,       ///< max r_i; <= 0 certifies a sub-solution
  super      ///< max -r_i; <= 0 certifies a super-solution
};

/// r_i = ∫|∇u|^{p-2}∇u·∇φ_i - ∫ rhs φ_i over the interior hat functions φ_i
/// (boundary entries are zero).  `delta` regularizes |∇u| as sqrt(|∇u|²+δ²).
Vector nodal_residual(const ScalarField& u, const Vector& rhs, double p, double delta = 0.0);

/// Weak residual of -Δ_p u = rhs graded over the interior hat functions.
double weak_residual(const ScalarField& u, const ScalarField& rhs, double p,
                     ResidualMode mode = ResidualMode::absolute);
double weak_residual(const ScalarField& u, const Vector& rhs, double p,
                     ResidualMode mode = ResidualMode::absolute);

/// ∂/∂u_i of (1/p) Σ w_s (|g_s|² + δ²)^{p/2}: the discrete flux divergence
/// tested against each hat function, all nodes.
Vector flux_divergence(const Domain& domain, const Vector& u, double p, double delta);

/// (1/p) Σ w_s (|g_s|² + δ²)^{p/2}.
double gradient_energy(const Domain& domain, const Vector& u, double p, double delta);

}  // namespace plap
