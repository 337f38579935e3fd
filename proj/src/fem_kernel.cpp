#include "mmfem/fem_kernel.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

#include "mmfem/errors.hpp"

namespace mmfem {

QuadratureRule gauss_rule(int q) {
  if (q < 1 || q > 20) throw InvalidArgument("gauss_rule: point count must lie in [1, 20]");
  QuadratureRule rule;
  rule.points.resize(q);
  rule.weights.resize(q);
  // Newton iteration on P_q from the Chebyshev-like initial guesses; roots
  // are symmetric so only half are computed.
  const int half = (q + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[q - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) rule.points[q / 2] = 0.0;
  return rule;
}

BasisEvaluation lagrange_basis(int degree, double t) {
  if (degree < 1) throw InvalidArgument("lagrange_basis: degree must be >= 1");
  const int n = degree + 1;
  std::vector<double> nodes(n);
  for (int j = 0; j < n; ++j) nodes[j] = -1.0 + 2.0 * j / degree;
  BasisEvaluation out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int j = 0; j < n; ++j) {
    double denom = 1.0, value = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      denom *= nodes[j] - nodes[k];
      value *= t - nodes[k];
    }
    double deriv = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m == j) continue;
      double prod = 1.0;
      for (int k = 0; k < n; ++k)
        if (k != j && k != m) prod *= t - nodes[k];
      deriv += prod;
    }
    out.values[j] = value / denom;
    out.derivatives[j] = deriv / denom;
  }
  return out;
}

ReferenceElement::ReferenceElement(int degree, int quad_points)
    : degree_(degree), rule_(gauss_rule(quad_points)) {
  if (degree < 1 || degree > kMaxDegree)
    throw InvalidArgument("ReferenceElement: unsupported degree");
  const std::size_t nb = degree + 1;
  values_.resize(nb * rule_.size());
  derivs_.resize(nb * rule_.size());
  for (std::size_t q = 0; q < rule_.size(); ++q) {
    const auto b = lagrange_basis(degree, rule_.points[q]);
    std::copy(b.values.begin(), b.values.end(), values_.begin() + q * nb);
    std::copy(b.derivatives.begin(), b.derivatives.end(), derivs_.begin() + q * nb);
  }
}

const ReferenceElement& reference_element(int degree, int quad_points) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<ReferenceElement>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{degree, quad_points}];
  if (!slot) slot = std::make_unique<ReferenceElement>(degree, quad_points);
  return *slot;
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t lower, std::size_t upper)
    : n_(n), kl_(lower), ku_(upper), data_(n * (lower + upper + 1), 0.0) {}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double BandedMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> solve_banded(BandedMatrix A, std::vector<double> b,
                                 const ConstraintSet& constraints) {
  const std::size_t n = A.size();
  if (b.size() != n) throw InvalidArgument("solve_banded: right-hand side size mismatch");
  const std::size_t kl = A.lower(), ku = A.upper();

  for (const auto& c : constraints) {
    if (c.dof >= n) throw InvalidArgument("solve_banded: constraint DOF out of range");
    const std::size_t i0 = c.dof > ku ? c.dof - ku : 0;
    const std::size_t i1 = std::min(n - 1, c.dof + kl);
    for (std::size_t i = i0; i <= i1; ++i) {
      if (i == c.dof) continue;
      b[i] -= A(i, c.dof) * c.value;
      A.at(i, c.dof) = 0.0;
    }
  }
  for (const auto& c : constraints) {
    const std::size_t j0 = c.dof > kl ? c.dof - kl : 0;
    const std::size_t j1 = std::min(n - 1, c.dof + ku);
    for (std::size_t j = j0; j <= j1; ++j) A.at(c.dof, j) = 0.0;
    A.at(c.dof, c.dof) = 1.0;
    b[c.dof] = c.value;
  }

  // Working band with kl extra super-diagonals for pivoting fill.
  const std::size_t wu = ku + kl;
  const std::size_t width = kl + wu + 1;
  std::vector<double> w(n * width, 0.0);
  auto W = [&](std::size_t i, std::size_t j) -> double& { return w[i * width + (j + kl - i)]; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > kl ? i - kl : 0;
    const std::size_t j1 = std::min(n - 1, i + ku);
    for (std::size_t j = j0; j <= j1; ++j) W(i, j) = A(i, j);
  }
  const double tol = 1e-12 * std::max(A.max_abs(), 1.0e-300);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t rmax = std::min(n - 1, k + kl);
    std::size_t piv = k;
    for (std::size_t r = k + 1; r <= rmax; ++r)
      if (std::abs(W(r, k)) > std::abs(W(piv, k))) piv = r;
    if (!(std::abs(W(piv, k)) > tol)) {
      std::ostringstream msg;
      msg << "solve_banded: singular system (vanishing pivot at DOF " << k << ")";
      throw SingularSystemError(k, msg.str());
    }
    const std::size_t jmax = std::min(n - 1, k + wu);
    if (piv != k) {
      for (std::size_t j = k; j <= jmax; ++j) std::swap(W(k, j), W(piv, j));
      std::swap(b[k], b[piv]);
    }
    const double inv = 1.0 / W(k, k);
    for (std::size_t r = k + 1; r <= rmax; ++r) {
      const double l = W(r, k) * inv;
      if (l == 0.0) continue;
      W(r, k) = 0.0;
      for (std::size_t j = k + 1; j <= jmax; ++j) W(r, j) -= l * W(k, j);
      b[r] -= l * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t jmax = std::min(n - 1, k + wu);
    double s = b[k];
    for (std::size_t j = k + 1; j <= jmax; ++j) s -= W(k, j) * b[j];
    b[k] = s / W(k, k);
  }
  return b;
}

TestSpace::TestSpace(PhaseView view, int degree, ConstraintSet constraints)
    : view_(view), degree_(degree), constraints_(std::move(constraints)) {
  if (degree < 1 || degree > kMaxDegree) throw InvalidArgument("TestSpace: unsupported degree");
  if (view_.vertices.size() < 2) throw InvalidArgument("TestSpace: empty element run");
  for (const auto& c : constraints_)
    if (c.dof >= num_dofs()) throw InvalidArgument("TestSpace: constraint DOF out of range");
}

std::size_t TestSpace::locate(double x) const {
  const auto v = view_.vertices;
  auto it = std::upper_bound(v.begin() + 1, v.end() - 1, x);
  return static_cast<std::size_t>(it - v.begin()) - 1;
}

BandedMatrix assemble_mass(const TestSpace& space, int quad_points) {
  const int q = quad_points > 0 ? quad_points : default_quadrature(space.degree());
  const std::size_t p = space.degree();
  BandedMatrix M(space.num_dofs(), p, p);
  for_each_quadrature_point(space, q, [&](const QuadraturePoint& qp) {
    for (std::size_t i = 0; i <= p; ++i)
      for (std::size_t j = 0; j <= p; ++j)
        M.add(qp.first_dof + i, qp.first_dof + j, qp.weight * qp.basis[i] * qp.basis[j]);
  });
  return M;
}

BandedMatrix assemble_stiffness(const TestSpace& space, int quad_points) {
  return assemble_weighted_stiffness(space, [](const QuadraturePoint&) { return 1.0; },
                                     quad_points);
}

namespace {

double canonical(const TestSpace& space, std::size_t e, double x) {
  const auto v = space.vertices();
  return 2.0 * (x - v[e]) / (v[e + 1] - v[e]) - 1.0;
}

}  // namespace

double element_value(const TestSpace& space, std::span<const double> coeffs, std::size_t e,
                     double x) {
  const auto b = lagrange_basis(space.degree(), canonical(space, e, x));
  double s = 0.0;
  for (std::size_t j = 0; j < b.values.size(); ++j) s += coeffs[space.first_dof(e) + j] * b.values[j];
  return s;
}

double element_gradient(const TestSpace& space, std::span<const double> coeffs, std::size_t e,
                        double x) {
  const auto b = lagrange_basis(space.degree(), canonical(space, e, x));
  double s = 0.0;
  for (std::size_t j = 0; j < b.derivatives.size(); ++j)
    s += coeffs[space.first_dof(e) + j] * b.derivatives[j];
  return s * 2.0 / space.element_length(e);
}

double evaluate(const TestSpace& space, std::span<const double> coeffs, double x) {
  return element_value(space, coeffs, space.locate(x), x);
}

}  // namespace mmfem
