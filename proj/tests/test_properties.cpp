#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mmfem/engine.hpp"
#include "mmfem/errors.hpp"

using namespace mmfem;

namespace {

std::vector<double> random_vertices(std::mt19937_64& rng, double a, double b, std::size_t n) {
  std::uniform_real_distribution<double> u(0.3, 1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> v{a};
  for (double x : w) v.push_back(v.back() + (b - a) * x / total);
  v.back() = b;
  return v;
}

struct Case {
  const char* name;
  ProblemSpec spec;
  Mesh1D mesh;
};

std::vector<Case> problem_cases(int p) {
  const auto st = make_stefan();
  const double s0 = StefanSolution(st.stefan).interface(st.t_start);
  const auto pme = make_pme_similarity(1);
  const auto pb = pme.initial_breakpoints();
  const auto pme2 = make_pme_similarity(2);
  const auto pb2 = pme2.initial_breakpoints();
  return {{"stefan", st, build_stefan_bisection(p, 0, s0)},
          {"cg", make_crank_gupta(), build_uniform(0.0, 1.0, 9, p)},
          {"pme", pme, build_uniform(pb[0], pb[1], 8, p)},
          {"pme m=2", pme2, build_uniform(pb2[0], pb2[1], 8, p)},
          {"pmecos", make_pme_cosine(1), build_uniform(-0.5, 0.5, 8, p)}};
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("quadrature exactness") {
  for (int q = 1; q <= 20; ++q) {
    const auto rule = gauss_rule(q);
    for (int d = 0; d <= 2 * q - 1; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * std::pow(rule.points[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(s - exact) <= 1e-14);
    }
  }
}

TEST_CASE("partition of unity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(-1.0, 1.0);
  for (int p = 1; p <= kMaxDegree; ++p)
    for (int i = 0; i < 25; ++i) {
      const auto b = lagrange_basis(p, t(rng));
      CHECK(std::abs(std::accumulate(b.values.begin(), b.values.end(), 0.0) - 1.0) <= 1e-13);
    }
}

TEST_CASE("mass matrix round trip") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int p = 1; p <= 4; ++p) {
    const Mesh1D mesh(random_vertices(rng, -0.3, 0.9, 13), p);
    const TestSpace space(mesh);
    ScalarField u{std::vector<double>(space.num_dofs())};
    for (auto& x : u.coefficients) x = g(rng);
    const auto back = recover_solution(space, assemble_masses(space, u));
    for (std::size_t i = 0; i < u.coefficients.size(); ++i)
      CHECK(std::abs(back.coefficients[i] - u.coefficients[i]) <= 1e-12);
  }
}

TEST_CASE("constant shifts of the potential") {
  for (int p = 1; p <= 3; ++p)
    for (const auto& c : problem_cases(p)) {
      CAPTURE(c.name);
      CAPTURE(p);
      const MovingMeshModel model(c.spec, p, c.mesh.interface_index());
      const auto tr = model.trace(model.initial_state(c.mesh));
      std::vector<PotentialPiece> pieces, shifted;
      std::size_t offset = 0;
      for (std::size_t k = 0; k < tr.potentials.size(); ++k) {
        pieces.push_back({offset, tr.potentials[k].potential});
        auto moved = tr.potentials[k].potential;
        for (double& v : moved.field.coefficients) v += 0.5;
        shifted.push_back({offset, moved});
        offset += c.mesh.phase(k).num_elements();
      }
      std::vector<VelocityConstraint> fixed;
      if (c.mesh.interface_index())
        fixed = {{0, 0.0}, {*c.mesh.interface_index(), *tr.front_speed}, {c.mesh.num_vertices() - 1, 0.0}};
      else if (c.spec.kind == ProblemKind::CrankGupta)
        fixed = {{0, 0.0}};
      for (auto variant : {VelocityRecovery::Interpolation, VelocityRecovery::Projection}) {
        const auto a = recover_velocity(c.mesh, pieces, fixed, variant);
        const auto b = recover_velocity(c.mesh, shifted, fixed, variant);
        if (variant == VelocityRecovery::Interpolation)
          for (std::size_t i = 0; i < a.vertex_values.size(); ++i)
            CHECK(a.vertex_values[i] == doctest::Approx(tr.velocity.vertex_values[i]).epsilon(1e-14));
        double scale = 1.0;
        for (double v : a.vertex_values) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < a.vertex_values.size(); ++i)
          CHECK(std::abs(a.vertex_values[i] - b.vertex_values[i]) <= 1e-13 * scale);
      }
    }
}

TEST_CASE("gauge invariance under pin shifts") {
  for (int p = 1; p <= 4; ++p)
    for (const auto& c : problem_cases(p)) {
      CAPTURE(c.name);
      CAPTURE(p);
      const MovingMeshModel model(c.spec, p, c.mesh.interface_index());
      const auto state = model.initial_state(c.mesh);
      const auto a = model.trace(state, 0.0);
      const auto b = model.trace(state, -2.75);
      double scale = 1.0;
      for (double v : a.velocity.vertex_values) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < a.velocity.vertex_values.size(); ++i)
        CHECK(std::abs(a.velocity.vertex_values[i] - b.velocity.vertex_values[i]) <= 1e-13 * scale);
      CHECK(b.potentials[0].potential.field.coefficients[0] == -2.75);
    }
}

TEST_CASE("total mass rate matches the monitor rate") {
  for (int p = 1; p <= 3; ++p)
    for (const auto& c : problem_cases(p)) {
      CAPTURE(c.name);
      CAPTURE(p);
      const MovingMeshModel model(c.spec, p, c.mesh.interface_index());
      const auto tr = model.trace(model.initial_state(c.mesh));
      for (std::size_t k = 0; k < tr.rate.mass_rates.size(); ++k) {
        const auto& r = tr.rate.mass_rates[k];
        const double total = std::accumulate(r.begin(), r.end(), 0.0);
        double scale = 1.0;
        for (double v : r) scale = std::max(scale, std::abs(v));
        double expected = 0.0;
        if (c.spec.kind == ProblemKind::CrankGupta) {
          expected = tr.potentials[k].theta_dot;
        } else if (c.spec.kind == ProblemKind::Stefan) {
          const Mesh1D m = model.mesh(model.initial_state(c.mesh));
          expected = operator_total(model.forms()[k], model.phase_space(m, k), tr.solution[k],
                                    c.spec.t_start);
        }
        CHECK(std::abs(total - expected) <= 1e-12 * scale);
      }
    }
}

TEST_CASE("vertex velocities agree with the recovered field") {
  for (int p = 1; p <= 3; ++p)
    for (const auto& c : problem_cases(p)) {
      CAPTURE(c.name);
      const MovingMeshModel model(c.spec, p, c.mesh.interface_index());
      const auto tr = model.trace(model.initial_state(c.mesh));
      const Mesh1D m = c.mesh;
      const TestSpace vs(m.whole(), tr.velocity.recovered_degree);
      for (std::size_t i = 0; i < m.num_vertices(); ++i) {
        if (m.interface_index() && i == *m.interface_index()) continue;
        CHECK(tr.velocity.vertex_values[i] ==
              doctest::Approx(evaluate(vs, tr.velocity.recovered.coefficients, m.vertices()[i])).epsilon(1e-12));
      }
      if (p == 1) {
        const MovingMeshModel proj(c.spec, p, c.mesh.interface_index(), VelocityRecovery::Projection);
        const auto pr = proj.trace(proj.initial_state(c.mesh));
        for (std::size_t i = 0; i < m.num_vertices(); ++i)
          CHECK(std::abs(pr.velocity.vertex_values[i] - tr.velocity.vertex_values[i]) <= 1e-12);
      }
    }
}

TEST_CASE("tangling aborts the step") {
  const auto cg = make_crank_gupta();
  const MovingMeshModel model(cg, 2, std::nullopt);
  const Mesh1D mesh = build_uniform(0.0, 1.0, 4, 2);
  const auto state = model.initial_state(mesh);
  const RhsEvaluator rhs = [&](const SystemState& s) {
    auto r = model.evaluate(s);
    r.vertex_velocities[2] = 1e3;
    return r;
  };
  CHECK_THROWS_AS(ssp_rk_step(state, rhs, 1e-3, 3), TanglingError);
  CHECK_NOTHROW(ssp_rk_step(state, [&](const SystemState& s) { return model.evaluate(s); }, 1e-5, 3));
}

}  // TEST_SUITE
