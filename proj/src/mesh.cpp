#include "plap/mesh.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace plap {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval:
      return "interval";
    case DomainKind::rectangle:
      return "rectangle";
    case DomainKind::radial_ball:
      return "ball";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(std::string_view name) {
  if (name == "interval") return DomainKind::interval;
  if (name == "rectangle" || name == "square") return DomainKind::rectangle;
  if (name == "ball" || name == "radial-ball" || name == "radial_ball") return DomainKind::radial_ball;
  throw std::invalid_argument("unknown domain kind '" + std::string(name) + "'");
}

DomainPtr Domain::interval(double length, Index cells) {
  if (!(length > 0.0) || cells < 2)
    throw std::invalid_argument("interval needs length > 0 and at least 2 cells");
  auto d = std::shared_ptr<Domain>(new Domain());
  d->kind_ = DomainKind::interval;
  d->ambient_dimension_ = 1;
  d->extents_ = {length};
  d->nx_ = cells;
  d->h_ = length / static_cast<double>(cells);
  d->finalize();
  return d;
}

DomainPtr Domain::rectangle(double lx, double ly, Index nx) {
  if (!(lx > 0.0) || !(ly > 0.0) || nx < 2)
    throw std::invalid_argument("rectangle needs positive sides and at least 2 cells per axis");
  const double h = lx / static_cast<double>(nx);
  const double ny_real = ly / h;
  const auto ny = static_cast<Index>(std::llround(ny_real));
  if (ny < 2 || std::abs(ny_real - static_cast<double>(ny)) > 1e-9 * ny_real)
    throw std::invalid_argument("rectangle sides are not commensurate with a uniform spacing");
  auto d = std::shared_ptr<Domain>(new Domain());
  d->kind_ = DomainKind::rectangle;
  d->ambient_dimension_ = 2;
  d->extents_ = {lx, ly};
  d->nx_ = nx;
  d->ny_ = ny;
  d->h_ = h;
  d->finalize();
  return d;
}

DomainPtr Domain::radial_ball(double radius, int dimension, Index cells) {
  if (!(radius > 0.0) || dimension < 1 || cells < 2)
    throw std::invalid_argument("ball needs radius > 0, dimension >= 1 and at least 2 cells");
  auto d = std::shared_ptr<Domain>(new Domain());
  d->kind_ = DomainKind::radial_ball;
  d->ambient_dimension_ = dimension;
  d->extents_ = {radius};
  d->nx_ = cells;
  d->h_ = radius / static_cast<double>(cells);
  d->finalize();
  return d;
}

void Domain::finalize() {
  const Index nxn = nx_ + 1;
  const Index nyn = ny_ + 1;
  const Index n = nxn * nyn;
  boundary_.assign(static_cast<std::size_t>(n), false);
  mass_ = Vector::Zero(n);
  samples_.clear();
  const double h = h_;

  switch (kind_) {
    case DomainKind::interval: {
      boundary_.front() = boundary_.back() = true;
      mass_.setConstant(h);
      mass_[0] = mass_[nx_] = 0.5 * h;
      for (Index i = 0; i < nx_; ++i) {
        GradientSample s;
        s.weight = h;
        s.plus[0] = i + 1;
        s.minus[0] = i;
        samples_.push_back(s);
      }
      break;
    }
    case DomainKind::radial_ball: {
      boundary_.back() = true;
      const double dim = ambient_dimension_;
      const auto shell = [dim](double a, double b) {
        return (std::pow(b, dim) - std::pow(a, dim)) / dim;
      };
      const double radius = extents_[0];
      for (Index i = 0; i <= nx_; ++i) {
        const double r = static_cast<double>(i) * h;
        mass_[i] = shell(std::max(0.0, r - 0.5 * h), std::min(radius, r + 0.5 * h));
      }
      for (Index i = 0; i < nx_; ++i) {
        GradientSample s;
        s.weight = shell(static_cast<double>(i) * h, static_cast<double>(i + 1) * h);
        s.plus[0] = i + 1;
        s.minus[0] = i;
        samples_.push_back(s);
      }
      break;
    }
    case DomainKind::rectangle: {
      for (Index j = 0; j < nyn; ++j) {
        for (Index i = 0; i < nxn; ++i) {
          const bool bx = (i == 0 || i == nx_);
          const bool by = (j == 0 || j == ny_);
          boundary_[static_cast<std::size_t>(node(i, j))] = bx || by;
          mass_[node(i, j)] = h * h * (bx ? 0.5 : 1.0) * (by ? 0.5 : 1.0);
        }
      }
      // Each cell contributes four corner gradients built from its edge
      // differences; for p = 2 this reproduces the five-point Laplacian.
      for (Index j = 0; j < ny_; ++j) {
        for (Index i = 0; i < nx_; ++i) {
          const Index n00 = node(i, j), n10 = node(i + 1, j);
          const Index n01 = node(i, j + 1), n11 = node(i + 1, j + 1);
          const std::array<std::array<Index, 2>, 2> xedges{{{n10, n00}, {n11, n01}}};
          const std::array<std::array<Index, 2>, 2> yedges{{{n01, n00}, {n11, n10}}};
          for (const auto& xe : xedges) {
            for (const auto& ye : yedges) {
              GradientSample s;
              s.weight = 0.25 * h * h;
              s.components = 2;
              s.plus = {xe[0], ye[0]};
              s.minus = {xe[1], ye[1]};
              samples_.push_back(s);
            }
          }
        }
      }
      break;
    }
  }

  interior_.clear();
  for (Index i = 0; i < n; ++i)
    if (!boundary_[static_cast<std::size_t>(i)]) interior_.push_back(i);
}

Point Domain::coordinates(Index node_index) const {
  const Index i = node_index % (nx_ + 1);
  const Index j = node_index / (nx_ + 1);
  return {static_cast<double>(i) * h_, static_cast<double>(j) * h_};
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(";
  for (std::size_t k = 0; k < extents_.size(); ++k) os << (k ? "x" : "") << extents_[k];
  if (kind_ == DomainKind::radial_ball) os << ", N=" << ambient_dimension_;
  os << ", h=" << h_ << ")";
  return os.str();
}

ScalarField::ScalarField(DomainPtr domain, Vector values, bool dirichlet)
    : domain_(std::move(domain)), values_(std::move(values)), dirichlet_(dirichlet) {
  if (!domain_) throw std::invalid_argument("field without a domain");
  if (values_.size() != domain_->size())
    throw std::invalid_argument("field size does not match the domain");
  if (!values_.allFinite()) throw std::invalid_argument("field has non-finite values");
  if (dirichlet_) {
    for (Index i = 0; i < values_.size(); ++i)
      if (domain_->is_boundary(i) && values_[i] != 0.0)
        throw std::invalid_argument("Dirichlet field with nonzero boundary value");
  }
}

ScalarField ScalarField::zeros(DomainPtr domain, bool dirichlet) {
  const Index n = domain->size();
  return ScalarField(std::move(domain), Vector::Zero(n), dirichlet);
}

ScalarField ScalarField::sample(DomainPtr domain, const std::function<double(const Point&)>& fn,
                                bool dirichlet) {
  Vector v(domain->size());
  for (Index i = 0; i < v.size(); ++i)
    v[i] = (dirichlet && domain->is_boundary(i)) ? 0.0 : fn(domain->coordinates(i));
  return ScalarField(std::move(domain), std::move(v), dirichlet);
}

ScalarField ScalarField::scaled(double k) const {
  return ScalarField(domain_, k * values_, dirichlet_);
}

Weight::Weight(ScalarField field) : field_(std::move(field)) {
  if (field_.values().minCoeff() < 0.0) throw std::invalid_argument("weight has negative values");
  if (!(field_.values().maxCoeff() > 0.0)) throw std::invalid_argument("weight is identically zero");
}

Weight Weight::constant(DomainPtr domain, double value) {
  const Index n = domain->size();
  return Weight(ScalarField(std::move(domain), Vector::Constant(n, value), false));
}

Weight Weight::scaled(double c) const { return Weight(field_.scaled(c)); }

Weight Weight::max(const Weight& a, const Weight& b) {
  if (&a.domain() != &b.domain()) throw std::invalid_argument("weights live on different domains");
  return Weight(ScalarField(a.field().domain_ptr(), a.values().cwiseMax(b.values()), false));
}

double sup_norm(const ScalarField& f) {
  return f.size() == 0 ? 0.0 : f.values().cwiseAbs().maxCoeff();
}

namespace {

// Derivative along one grid axis at position i of n+1 points spaced by h.
double axis_derivative(const Vector& u, Index base, Index stride, Index i, Index n, double h) {
  const auto at = [&](Index k) { return u[base + k * stride]; };
  if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (i == n) return (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) / (2.0 * h);
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

}  // namespace

ScalarField grad_magnitude(const ScalarField& f) {
  const Domain& d = f.domain();
  const Vector& u = f.values();
  Vector g(d.size());
  const double h = d.h();
  const Index nx = d.cells_x();
  switch (d.kind()) {
    case DomainKind::interval:
      for (Index i = 0; i <= nx; ++i) g[i] = std::abs(axis_derivative(u, 0, 1, i, nx, h));
      break;
    case DomainKind::radial_ball:
      g[0] = 0.0;
      for (Index i = 1; i <= nx; ++i) g[i] = std::abs(axis_derivative(u, 0, 1, i, nx, h));
      break;
    case DomainKind::rectangle: {
      const Index ny = d.cells_y();
      for (Index j = 0; j <= ny; ++j) {
        for (Index i = 0; i <= nx; ++i) {
          const double gx = axis_derivative(u, d.node(0, j), 1, i, nx, h);
          const double gy = axis_derivative(u, d.node(i, 0), nx + 1, j, ny, h);
          g[d.node(i, j)] = std::hypot(gx, gy);
        }
      }
      break;
    }
  }
  return ScalarField(f.domain_ptr(), std::move(g), false);
}

Eigen::Matrix2Xd cell_gradients(const Domain& domain, const Vector& u) {
  const auto& samples = domain.gradient_samples();
  Eigen::Matrix2Xd g = Eigen::Matrix2Xd::Zero(2, static_cast<Index>(samples.size()));
  const double inv_h = 1.0 / domain.h();
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& smp = samples[s];
    for (int k = 0; k < smp.components; ++k)
      g(k, static_cast<Index>(s)) = (u[smp.plus[k]] - u[smp.minus[k]]) * inv_h;
  }
  return g;
}

Vector flux_divergence(const Domain& domain, const Vector& u, double p, double delta) {
  Vector out = Vector::Zero(domain.size());
  const double inv_h = 1.0 / domain.h();
  const double d2 = delta * delta;
  for (const auto& smp : domain.gradient_samples()) {
    double g[2] = {0.0, 0.0};
    double norm2 = d2;
    for (int k = 0; k < smp.components; ++k) {
      g[k] = (u[smp.plus[k]] - u[smp.minus[k]]) * inv_h;
      norm2 += g[k] * g[k];
    }
    if (norm2 == 0.0) continue;
    const double s = smp.weight * std::pow(norm2, 0.5 * (p - 2.0)) * inv_h;
    for (int k = 0; k < smp.components; ++k) {
      out[smp.plus[k]] += s * g[k];
      out[smp.minus[k]] -= s * g[k];
    }
  }
  return out;
}

double gradient_energy(const Domain& domain, const Vector& u, double p, double delta) {
  const double inv_h = 1.0 / domain.h();
  const double d2 = delta * delta;
  double e = 0.0;
  for (const auto& smp : domain.gradient_samples()) {
    double norm2 = d2;
    for (int k = 0; k < smp.components; ++k) {
      const double g = (u[smp.plus[k]] - u[smp.minus[k]]) * inv_h;
      norm2 += g * g;
    }
    e += smp.weight * std::pow(norm2, 0.5 * p);
  }
  return e / p;
}

Vector nodal_residual(const ScalarField& u, const Vector& rhs, double p, double delta) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const Domain& d = u.domain();
  if (rhs.size() != d.size()) throw std::invalid_argument("right-hand side size mismatch");
  Vector r = flux_divergence(d, u.values(), p, delta) - d.mass().cwiseProduct(rhs);
  for (Index i = 0; i < r.size(); ++i)
    if (d.is_boundary(i)) r[i] = 0.0;
  return r;
}

double weak_residual(const ScalarField& u, const Vector& rhs, double p, ResidualMode mode) {
  const Vector r = nodal_residual(u, rhs, p);
  double worst = mode == ResidualMode::absolute ? 0.0 : -std::numeric_limits<double>::infinity();
  for (Index i : u.domain().interior()) {
    switch (mode) {
      case ResidualMode::absolute:
        worst = std::max(worst, std::abs(r[i]));
        break;
      case ResidualMode::sub:
        worst = std::max(worst, r[i]);
        break;
      case ResidualMode::super:
        worst = std::max(worst, -r[i]);
        break;
    }
  }
  return worst;
}

double weak_residual(const ScalarField& u, const ScalarField& rhs, double p, ResidualMode mode) {
  return weak_residual(u, rhs.values(), p, mode);
}

}  // namespace plap
