#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mmfem/errors.hpp"
#include "mmfem/fem_kernel.hpp"

using namespace mmfem;

TEST_CASE("gauss rules") {
  const auto g1 = gauss_rule(1);
  REQUIRE(g1.size() == 1);
  CHECK(g1.points[0] == doctest::Approx(0.0));
  CHECK(g1.weights[0] == doctest::Approx(2.0));

  const auto g2 = gauss_rule(2);
  REQUIRE(g2.size() == 2);
  CHECK(std::abs(g2.points[0]) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(g2.points[0] == doctest::Approx(-g2.points[1]).epsilon(1e-15));
  CHECK(g2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));

  const auto g3 = gauss_rule(3);
  double s = 0.0;
  for (std::size_t i = 0; i < g3.size(); ++i) s += g3.weights[i] * std::pow(g3.points[i], 4);
  CHECK(std::abs(s - 0.4) <= 1e-15);

  CHECK_THROWS_AS(gauss_rule(0), InvalidArgument);
  CHECK_THROWS_AS(gauss_rule(21), InvalidArgument);
}

TEST_CASE("lagrange basis") {
  const auto b1 = lagrange_basis(1, -1.0);
  CHECK(b1.values == std::vector<double>{1.0, 0.0});

  for (int p = 1; p <= 6; ++p)
    for (double t : {-1.0, -0.77, -0.1, 0.0, 0.3, 0.91, 1.0}) {
      const auto b = lagrange_basis(p, t);
      CHECK(std::abs(std::accumulate(b.values.begin(), b.values.end(), 0.0) - 1.0) <= 1e-14);
      CHECK(std::abs(std::accumulate(b.derivatives.begin(), b.derivatives.end(), 0.0)) <= 1e-12);
    }

  const auto b2 = lagrange_basis(2, 0.0);
  CHECK(b2.values[0] == doctest::Approx(0.0));
  CHECK(b2.values[1] == doctest::Approx(1.0));
  CHECK(b2.values[2] == doctest::Approx(0.0));
  const double eps = 1e-6;
  for (int p = 1; p <= 4; ++p)
    for (double t : {-0.6, 0.0, 0.45}) {
      const auto c = lagrange_basis(p, t), hi = lagrange_basis(p, t + eps),
                 lo = lagrange_basis(p, t - eps);
      for (int j = 0; j <= p; ++j)
        CHECK(c.derivatives[j] == doctest::Approx((hi.values[j] - lo.values[j]) / (2 * eps)).epsilon(1e-7));
    }
}

TEST_CASE("mass matrix") {
  const double h = 0.3;
  const Mesh1D one({0.0, h}, 1);
  const auto M = assemble_mass(TestSpace(one));
  CHECK(M(0, 0) == doctest::Approx(h / 3));
  CHECK(M(0, 1) == doctest::Approx(h / 6));
  CHECK(M(1, 0) == doctest::Approx(h / 6));
  CHECK(M(1, 1) == doctest::Approx(h / 3));

  const Mesh1D two({0.0, h, 2 * h}, 1);
  CHECK(assemble_mass(TestSpace(two))(1, 1) == doctest::Approx(2 * h / 3));

  const Mesh1D m({0.0, 0.2, 0.5, 1.1}, 3);
  const TestSpace space(m);
  const auto Mm = assemble_mass(space);
  const auto ones = std::vector<double>(space.num_dofs(), 1.0);
  const auto rows = Mm.multiply(ones);
  const auto integrals = assemble_functional(space, [](const QuadraturePoint&) { return 1.0; });
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == doctest::Approx(integrals[i]).epsilon(1e-13));
}

TEST_CASE("stiffness matrix") {
  const double h = 0.25;
  const Mesh1D one_mesh = Mesh1D({0.0, h}, 1);
  const TestSpace one(one_mesh);
  const auto K = assemble_stiffness(one);
  CHECK(K(0, 0) == doctest::Approx(1 / h));
  CHECK(K(0, 1) == doctest::Approx(-1 / h));
  CHECK(K(1, 1) == doctest::Approx(1 / h));

  const Mesh1D space_mesh = Mesh1D({0.0, 0.1, 0.4, 0.5, 1.0}, 4);
  const TestSpace space(space_mesh);
  const auto K4 = assemble_stiffness(space);
  for (double v : K4.multiply(std::vector<double>(space.num_dofs(), 1.0))) CHECK(std::abs(v) <= 1e-13 * K4.max_abs());

  const double c = 2.5;
  const ScalarField u = interpolate(space, [&](double) { return c; });
  const auto Kc = assemble_weighted_stiffness(space, [&](const QuadraturePoint& qp) { return qp.value(u.coefficients); });
  for (std::size_t i = 0; i < space.num_dofs(); ++i)
    for (std::size_t j = 0; j < space.num_dofs(); ++j)
      CHECK(std::abs(Kc(i, j) - c * K4(i, j)) <= 1e-12 * K4.max_abs());
}

TEST_CASE("load functionals") {
  const Mesh1D space_mesh = build_uniform(0.0, 2.0, 5, 2);
  const TestSpace space(space_mesh);
  const auto v = assemble_functional(space, [](const QuadraturePoint&) { return 1.0; });
  CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(2.0).epsilon(1e-14));

  const Mesh1D unit_mesh = Mesh1D({0.0, 1.0}, 1);
  const TestSpace unit(unit_mesh);
  const ScalarField x = interpolate(unit, [](double s) { return s; });
  const auto vx = assemble_functional(unit, [&](const QuadraturePoint& qp) { return qp.value(x.coefficients); });
  CHECK(vx[0] == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(vx[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));

  const ScalarField lin = interpolate(space, [](double s) { return 3.0 * s - 1.0; });
  const auto vd = assemble_functional(space, [&](const QuadraturePoint& qp) { return qp.gradient(lin.coefficients); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(vd[i] == doctest::Approx(3.0 * v[i]).epsilon(1e-13));
}

TEST_CASE("banded solve") {
  BandedMatrix I(4, 1, 1);
  for (std::size_t i = 0; i < 4; ++i) I.at(i, i) = 1.0;
  const std::vector<double> b{1.0, -2.0, 3.5, 0.25};
  CHECK(solve_banded(I, b) == b);

  const Mesh1D space_mesh = build_uniform(0.0, 1.0, 6, 3);
  const TestSpace space(space_mesh);
  const auto M = assemble_mass(space);
  std::vector<double> x0(space.num_dofs());
  for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = std::sin(1.0 + i);
  const auto x = solve_banded(M, M.multiply(x0));
  for (std::size_t i = 0; i < x0.size(); ++i) CHECK(std::abs(x[i] - x0[i]) <= 1e-12);

  CHECK_THROWS_AS(solve_banded(assemble_stiffness(space), std::vector<double>(space.num_dofs(), 0.0)),
                  SingularSystemError);
  const auto K = assemble_stiffness(space);
  const auto pinned = solve_banded(K, std::vector<double>(space.num_dofs(), 0.0), {{0, 1.5}});
  for (double v : pinned) CHECK(v == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("point evaluation") {
  const Mesh1D space_mesh = Mesh1D({0.0, 0.3, 0.7, 1.0}, 3);
  const TestSpace space(space_mesh);
  const auto f = [](double x) { return 1.0 - 2.0 * x + x * x * x; };
  const ScalarField u = interpolate(space, f);
  for (double x : {0.0, 0.1, 0.3, 0.55, 0.99, 1.0}) {
    CHECK(evaluate(space, u.coefficients, x) == doctest::Approx(f(x)).epsilon(1e-13));
    const auto e = space.locate(x);
    CHECK(element_gradient(space, u.coefficients, e, x) == doctest::Approx(-2.0 + 3 * x * x).epsilon(1e-12));
  }
  CHECK(space.locate(-1.0) == 0);
  CHECK(space.locate(2.0) == 2);
}
