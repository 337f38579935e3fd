#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mmfem/mesh1d.hpp"

namespace mmfem {

/// Quadrature on the canonical interval [-1, 1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre rule with q points (1 <= q <= 20), exact to degree 2q-1.
QuadratureRule gauss_rule(int q);

struct BasisEvaluation {
  std::vector<double> values;
  std::vector<double> derivatives;  // with respect to the canonical coordinate
};

/// Degree-p Lagrange basis on [-1, 1] with p+1 uniform nodes, evaluated at t.
BasisEvaluation lagrange_basis(int degree, double t);

/// Lagrange basis tabulated at the points of a Gauss rule. Shared, immutable.
class ReferenceElement {
 public:
  ReferenceElement(int degree, int quad_points);

  int degree() const { return degree_; }
  std::size_t num_points() const { return rule_.size(); }
  double point(std::size_t q) const { return rule_.points[q]; }
  double weight(std::size_t q) const { return rule_.weights[q]; }
  std::span<const double> values(std::size_t q) const {
    return {values_.data() + q * (degree_ + 1), static_cast<std::size_t>(degree_ + 1)};
  }
  std::span<const double> derivatives(std::size_t q) const {
    return {derivs_.data() + q * (degree_ + 1), static_cast<std::size_t>(degree_ + 1)};
  }

 private:
  int degree_;
  QuadratureRule rule_;
  std::vector<double> values_;
  std::vector<double> derivs_;
};

/// Cached tables; the returned reference stays valid for the program lifetime.
const ReferenceElement& reference_element(int degree, int quad_points);

/**
 * Square band matrix with `lower` sub- and `upper` super-diagonals.
 * Entries outside the band read as zero and must not be written.
 */
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper);

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }
  bool in_band(std::size_t i, std::size_t j) const {
    return j + kl_ >= i && j <= i + ku_;
  }

  double operator()(std::size_t i, std::size_t j) const {
    return in_band(i, j) ? data_[i * width() + (j + kl_ - i)] : 0.0;
  }
  double& at(std::size_t i, std::size_t j) { return data_[i * width() + (j + kl_ - i)]; }
  void add(std::size_t i, std::size_t j, double v) { at(i, j) += v; }

  std::vector<double> multiply(std::span<const double> x) const;
  double max_abs() const;

 private:
  std::size_t width() const { return kl_ + ku_ + 1; }
  std::size_t n_, kl_, ku_;
  std::vector<double> data_;
};

struct DirichletConstraint {
  std::size_t dof;
  double value;
};
using ConstraintSet = std::vector<DirichletConstraint>;

/// Solves A x = b with the constrained DOFs fixed to their values by
/// symmetric elimination, then banded LU with partial pivoting inside the
/// band. Throws SingularSystemError naming the DOF of a vanishing pivot.
std::vector<double> solve_banded(BandedMatrix A, std::vector<double> b,
                                 const ConstraintSet& constraints = {});

/// Continuous degree-p Lagrange space over a run of mesh elements.
class TestSpace {
 public:
  TestSpace(PhaseView view, int degree, ConstraintSet constraints = {});
  TestSpace(const Mesh1D& mesh, ConstraintSet constraints = {})
      : TestSpace(mesh.whole(), mesh.degree(), std::move(constraints)) {}
  // The space views the mesh coordinates; a temporary mesh would dangle.
  TestSpace(Mesh1D&&, ConstraintSet = {}) = delete;

  std::span<const double> vertices() const { return view_.vertices; }
  const PhaseView& view() const { return view_; }
  int degree() const { return degree_; }
  std::size_t num_elements() const { return view_.num_elements(); }
  std::size_t num_dofs() const { return num_elements() * degree_ + 1; }
  std::size_t first_dof(std::size_t e) const { return e * degree_; }
  std::size_t last_dof() const { return num_dofs() - 1; }
  double element_length(std::size_t e) const {
    return view_.vertices[e + 1] - view_.vertices[e];
  }
  double domain_length() const { return view_.length(); }
  const ConstraintSet& constraints() const { return constraints_; }

  /// Index of the element containing x (clamped to the end elements).
  std::size_t locate(double x) const;

 private:
  PhaseView view_;
  int degree_;
  ConstraintSet constraints_;
};

/// Quadrature-point context handed to assembly integrands.
struct QuadraturePoint {
  std::size_t element;
  std::size_t first_dof;
  double x;
  double weight;                  // physical weight, jacobian included
  std::span<const double> basis;  // w_j at x, local j = 0..p
  std::span<const double> grad;   // physical derivatives w_j'(x)

  double value(std::span<const double> coeffs) const {
    double s = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j) s += coeffs[first_dof + j] * basis[j];
    return s;
  }
  double gradient(std::span<const double> coeffs) const {
    double s = 0.0;
    for (std::size_t j = 0; j < grad.size(); ++j) s += coeffs[first_dof + j] * grad[j];
    return s;
  }
};

inline constexpr int kMaxDegree = 8;

/// Visits every quadrature point of every element of the space.
template <class Visitor>
void for_each_quadrature_point(const TestSpace& space, int quad_points, Visitor&& visit) {
  const ReferenceElement& ref = reference_element(space.degree(), quad_points);
  const std::size_t nb = static_cast<std::size_t>(space.degree()) + 1;
  std::array<double, kMaxDegree + 1> grad{};
  const auto verts = space.vertices();
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const double a = verts[e], h = verts[e + 1] - verts[e];
    const double jac = 0.5 * h, inv_jac = 2.0 / h;
    for (std::size_t q = 0; q < ref.num_points(); ++q) {
      const auto dref = ref.derivatives(q);
      for (std::size_t j = 0; j < nb; ++j) grad[j] = dref[j] * inv_jac;
      visit(QuadraturePoint{e, space.first_dof(e), a + jac * (ref.point(q) + 1.0),
                            ref.weight(q) * jac, ref.values(q),
                            std::span<const double>(grad.data(), nb)});
    }
  }
}

/// Quadrature rule size used for the linear forms: exact for degree 2p+3.
inline int default_quadrature(int degree) { return degree + 2; }

BandedMatrix assemble_mass(const TestSpace& space, int quad_points = 0);

/// Entries int a(x) w_i' w_j'; `weight` maps a QuadraturePoint to a(x).
template <class Weight>
BandedMatrix assemble_weighted_stiffness(const TestSpace& space, Weight&& weight,
                                         int quad_points = 0) {
  const int q = quad_points > 0 ? quad_points : default_quadrature(space.degree());
  const std::size_t p = space.degree();
  BandedMatrix K(space.num_dofs(), p, p);
  for_each_quadrature_point(space, q, [&](const QuadraturePoint& qp) {
    const double aw = weight(qp) * qp.weight;
    for (std::size_t i = 0; i <= p; ++i)
      for (std::size_t j = 0; j <= p; ++j)
        K.add(qp.first_dof + i, qp.first_dof + j, aw * qp.grad[i] * qp.grad[j]);
  });
  return K;
}

BandedMatrix assemble_stiffness(const TestSpace& space, int quad_points = 0);

/// v_i = int w_i f, with f given pointwise by `integrand(qp)`.
template <class Integrand>
std::vector<double> assemble_functional(const TestSpace& space, Integrand&& integrand,
                                        int quad_points = 0) {
  const int q = quad_points > 0 ? quad_points : default_quadrature(space.degree());
  std::vector<double> v(space.num_dofs(), 0.0);
  for_each_quadrature_point(space, q, [&](const QuadraturePoint& qp) {
    const double fw = integrand(qp) * qp.weight;
    for (std::size_t j = 0; j < qp.basis.size(); ++j) v[qp.first_dof + j] += fw * qp.basis[j];
  });
  return v;
}

/// v_i = int w_i' g.
template <class Integrand>
std::vector<double> assemble_derivative_functional(const TestSpace& space, Integrand&& integrand,
                                                   int quad_points = 0) {
  const int q = quad_points > 0 ? quad_points : default_quadrature(space.degree());
  std::vector<double> v(space.num_dofs(), 0.0);
  for_each_quadrature_point(space, q, [&](const QuadraturePoint& qp) {
    const double gw = integrand(qp) * qp.weight;
    for (std::size_t j = 0; j < qp.grad.size(); ++j) v[qp.first_dof + j] += gw * qp.grad[j];
  });
  return v;
}

/// Coefficients of a continuous Lagrange field on a TestSpace.
struct ScalarField {
  std::vector<double> coefficients;
};

/// Interpolant at the DOF points.
template <class Function>
ScalarField interpolate(const TestSpace& space, Function&& f) {
  const auto pts = dof_points(space.vertices(), space.degree());
  ScalarField u{std::vector<double>(pts.size())};
  std::transform(pts.begin(), pts.end(), u.coefficients.begin(), f);
  return u;
}

/// Value and derivative of the element-e polynomial at x (x may lie at or
/// slightly beyond the element ends; the polynomial is extended).
double element_value(const TestSpace& space, std::span<const double> coeffs, std::size_t e,
                     double x);
double element_gradient(const TestSpace& space, std::span<const double> coeffs, std::size_t e,
                        double x);

/// Point evaluation with element location by binary search.
double evaluate(const TestSpace& space, std::span<const double> coeffs, double x);

}  // namespace mmfem
