#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mmfem/engine.hpp"
#include "mmfem/errors.hpp"

using namespace mmfem;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double stefan_s0() { return StefanSolution(StefanParameters{}).interface(0.0012); }

SystemState scalar_state(double y) { return SystemState{0.0, {0.0, 1.0}, {MassDistribution{{y}}}}; }

}  // namespace

TEST_CASE("solution recovery") {
  const Mesh1D mesh({0.0, 0.2, 0.45, 1.0}, 3);
  const TestSpace space(mesh);
  const ScalarField c = interpolate(space, [](double) { return 1.7; });
  for (double v : recover_solution(space, assemble_masses(space, c)).coefficients)
    CHECK(v == doctest::Approx(1.7).epsilon(1e-13));

  const ScalarField poly = interpolate(space, [](double x) { return 2.0 - x + 4.0 * x * x * x; });
  const auto back = recover_solution(space, assemble_masses(space, poly));
  for (std::size_t i = 0; i < back.coefficients.size(); ++i)
    CHECK(std::abs(back.coefficients[i] - poly.coefficients[i]) <= 1e-12);

  const MovingMeshModel model(make_stefan(), 2, 2);
  const Mesh1D sm = build_stefan_bisection(2, 0, stefan_s0());
  const auto state = model.initial_state(sm);
  const auto u = model.recover(state);
  CHECK(u[0].coefficients.back() == 0.0);
  CHECK(u[1].coefficients.front() == 0.0);
  CHECK(u[0].coefficients.front() == -20.0);
}

TEST_CASE("monitor distribution") {
  const std::size_t n = 8;
  const Mesh1D mesh = build_uniform(0.0, 2.0, n, 1);
  const TestSpace space(mesh);
  const auto area = monitor_distribution(space, ScalarField{}, MonitorKind::Area);
  CHECK(area.c.front() == doctest::Approx(1.0 / (2 * n)));
  CHECK(area.c.back() == doctest::Approx(1.0 / (2 * n)));
  for (std::size_t i = 1; i < n; ++i) CHECK(area.c[i] == doctest::Approx(1.0 / n));
  CHECK(area.theta == doctest::Approx(2.0));

  const auto flat = monitor_distribution(space, interpolate(space, [](double) { return 3.0; }),
                                         MonitorKind::Mass);
  for (std::size_t i = 0; i <= n; ++i) CHECK(flat.c[i] == doctest::Approx(area.c[i]).epsilon(1e-14));

  const Mesh1D m3({0.0, 0.3, 0.35, 1.0}, 3);
  const TestSpace s3(m3);
  const auto mass = monitor_distribution(s3, interpolate(s3, [](double x) { return 1.0 + x * x; }),
                                         MonitorKind::Mass);
  CHECK(std::abs(sum(mass.c) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(monitor_distribution(s3, interpolate(s3, [](double) { return 0.0; }), MonitorKind::Mass),
                  DegenerateMonitorError);
}

TEST_CASE("mass-monitor potential") {
  const Mesh1D pm = build_uniform(-0.5, 0.5, 10, 2);
  const TestSpace ps(pm);
  const auto pme = make_pme_cosine(1);
  const auto form = problem_weak_forms(pme)[0];
  const auto u = interpolate(ps, [](double x) { return std::cos(3.14159265358979 * x) + 0.1; });
  const auto sol = solve_potential_mass(ps, u, nullptr, form, true, 0.0);
  CHECK(sol.theta_dot == 0.0);

  // Crank-Gupta at t = 0: int (Lu)_h = -u_x(0, 0) - |Omega| with the exact
  // Neumann datum, so theta' = (1 - 1/e) - 1.
  const auto cg = make_crank_gupta();
  const MovingMeshModel model(cg, 2, std::nullopt);
  const Mesh1D cm = build_uniform(0.0, 1.0, 10, 2);
  const auto tr = model.trace(model.initial_state(cm));
  const double flux_term = -cg_neumann_gradient(0.0);
  const double sink_term = -1.0;
  CHECK(tr.potentials[0].theta_dot == doctest::Approx(flux_term + sink_term).epsilon(1e-14));
  CHECK(tr.potentials[0].theta_dot == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));

  const auto shifted = model.trace(model.initial_state(cm), 0.37);
  for (std::size_t i = 0; i < tr.velocity.vertex_values.size(); ++i)
    CHECK(std::abs(shifted.velocity.vertex_values[i] - tr.velocity.vertex_values[i]) <= 1e-13);
  CHECK(shifted.potentials[0].potential.field.coefficients[3] ==
        doctest::Approx(tr.potentials[0].potential.field.coefficients[3] + 0.37).epsilon(1e-12));
}

TEST_CASE("area-monitor potential") {
  const Mesh1D mesh({0.0, 0.1, 0.25, 0.5, 1.0}, 2);
  const TestSpace space(mesh);
  const auto still = solve_potential_area(space, 0.0, 0.0, 0.2);
  for (double v : still.potential.field.coefficients) CHECK(v == doctest::Approx(0.2).epsilon(1e-14));

  const double vl = -0.3, vr = 0.8;
  const auto sol = solve_potential_area(space, vl, vr);
  CHECK(sol.theta_dot == doctest::Approx(vl + vr));
  const auto area = monitor_distribution(space, ScalarField{}, MonitorKind::Area);
  std::vector<double> b(space.num_dofs());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = -area.c[i] * sol.theta_dot;
  b.front() += vl;
  b.back() += vr;
  CHECK(std::abs(sum(b)) <= 1e-14);
  const auto Kphi = assemble_stiffness(space).multiply(sol.potential.field.coefficients);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(Kphi[i] == doctest::Approx(b[i]).epsilon(1e-12));

  const auto st = make_stefan();
  const StefanSolution exact(st.stefan);
  const MovingMeshModel model(st, 2, 2);
  const double target = exact.interface_speed(st.t_start);
  double previous = 0.0;
  for (int r = 0; r < 3; ++r) {
    const Mesh1D m = build_stefan_bisection(2, r, stefan_s0());
    const MovingMeshModel mr(st, 2, m.interface_index());
    const auto tr = mr.trace(mr.initial_state(m));
    const double err = std::abs(*tr.front_speed - target);
    CHECK(err <= 0.05 * target);
    CHECK(tr.velocity.vertex_values[*m.interface_index()] == *tr.front_speed);
    CHECK(tr.potentials[0].theta_dot == doctest::Approx(*tr.front_speed));
    CHECK(tr.potentials[1].theta_dot == doctest::Approx(-*tr.front_speed));
    if (r > 0) CHECK(err < 0.35 * previous);
    previous = err;
  }
}

TEST_CASE("velocity recovery") {
  const Mesh1D mesh({0.0, 0.2, 0.3, 0.7, 1.0}, 3);
  const TestSpace space(mesh);
  const PotentialField linear{interpolate(space, [](double x) { return 1.0 + 2.5 * x; }), 0, 1.0};
  const std::vector<PotentialPiece> pieces{{0, linear}};
  for (auto variant : {VelocityRecovery::Interpolation, VelocityRecovery::Projection}) {
    const auto v = recover_velocity(mesh, pieces, {}, variant);
    for (double x : v.vertex_values) CHECK(x == doctest::Approx(2.5).epsilon(1e-12));
    for (double x : v.recovered.coefficients) CHECK(x == doctest::Approx(2.5).epsilon(1e-12));
    const std::vector<VelocityConstraint> fixed{{0, 0.0}};
    CHECK(recover_velocity(mesh, pieces, fixed, variant).vertex_values.front() == 0.0);
  }

  const Mesh1D one({0.0, 0.5}, 2);
  const TestSpace os(one);
  const PotentialField quad{interpolate(os, [](double x) { return x * x - x; }), 0, 0.0};
  const std::vector<PotentialPiece> qp{{0, quad}};
  const auto v = recover_velocity(one, qp, {}, VelocityRecovery::Interpolation);
  CHECK(v.recovered_degree == 2);
  for (double x : {0.0, 0.1, 0.25, 0.5})
    CHECK(evaluate(os, v.recovered.coefficients, x) == doctest::Approx(2 * x - 1).epsilon(1e-12));
}

TEST_CASE("ale rate") {
  const auto pme = make_pme_similarity(1);
  const MovingMeshModel model(pme, 2, std::nullopt);
  const auto b = pme.initial_breakpoints();
  const Mesh1D m = build_uniform(b[0], b[1], 10, 2);
  const auto rate = model.evaluate(model.initial_state(m));
  CHECK(std::abs(sum(rate.mass_rates[0])) <= 1e-12);
  // Boundary speed x0 lambda' = x0 lambda / ((2 + m) t) at t0.
  const PmeSimilarity sim{1, 0.5};
  const double speed = sim.x0 / (3.0 * sim.t0());
  CHECK(rate.vertex_velocities.back() == doctest::Approx(speed).epsilon(0.02));
  CHECK(rate.vertex_velocities.front() == doctest::Approx(-speed).epsilon(0.02));

  const auto cg = make_crank_gupta();
  const MovingMeshModel cm(cg, 3, std::nullopt);
  const Mesh1D mesh = build_uniform(0.0, 1.0, 7, 3);
  const auto tr = cm.trace(cm.initial_state(mesh));
  CHECK(sum(tr.rate.mass_rates[0]) == doctest::Approx(tr.potentials[0].theta_dot).epsilon(1e-12));
  CHECK(tr.rate.vertex_velocities.front() == 0.0);

  // u_xx with u linear and a still mesh: the stiffness term cancels the
  // endpoint fluxes exactly.
  PhaseForm heat{1.0, 0, 0.0, {EndpointKind::FixedDirichlet, 0.0, {}},
                 {EndpointKind::FixedDirichlet, 0.0, {}}};
  const Mesh1D lm = build_uniform(0.0, 1.0, 4, 2);
  const TestSpace ls(lm);
  const auto lin = interpolate(ls, [](double x) { return 3.0 * x - 1.0; });
  CHECK(endpoint_flux(heat, ls, lin, false, 0.0) == doctest::Approx(-3.0));
  CHECK(endpoint_flux(heat, ls, lin, true, 0.0) == doctest::Approx(3.0));
  const std::vector<double> zero(5, 0.0);
  for (double r : ale_rate(ls, heat, lin, zero, 0.0)) CHECK(std::abs(r) <= 1e-13);
}

TEST_CASE("ssp runge-kutta on a scalar surrogate") {
  const RhsEvaluator decay = [](const SystemState& s) {
    return SystemRate{{0.0, 0.0}, {{-s.masses[0].mu[0]}}};
  };
  CHECK(ssp_rk_step(scalar_state(1.0), decay, 0.1, 1).masses[0].mu[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(ssp_rk_step(scalar_state(1.0), decay, 0.1, 2).masses[0].mu[0] == doctest::Approx(0.905).epsilon(1e-15));
  CHECK(ssp_rk_step(scalar_state(1.0), decay, 0.1, 3).masses[0].mu[0] ==
        doctest::Approx(1 - 0.1 + 0.005 - 0.1 * 0.1 * 0.1 / 6).epsilon(1e-15));

  const RhsEvaluator frozen = [](const SystemState&) { return SystemRate{{0.0, 0.0}, {{0.0}}}; };
  const auto held = ssp_rk_step(scalar_state(0.42), frozen, 0.3, 3);
  CHECK(held.masses[0].mu[0] == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(held.vertices == std::vector<double>{0.0, 1.0});
  CHECK(held.time == doctest::Approx(0.3));

  const RhsEvaluator crush = [](const SystemState&) { return SystemRate{{0.0, -20.0}, {{0.0}}}; };
  CHECK_THROWS_AS(ssp_rk_step(scalar_state(1.0), crush, 0.1, 2), TanglingError);
  CHECK_THROWS_AS(ssp_rk_step(scalar_state(1.0), frozen, 0.1, 4), InvalidArgument);
}

TEST_CASE("geometric conservation") {
  const auto cg = make_crank_gupta();
  for (int p = 1; p <= 4; ++p) {
    const MovingMeshModel model(cg, p, std::nullopt);
    const Mesh1D mesh = build_uniform(0.0, 1.0, 6, p);
    const auto rate = model.evaluate(model.initial_state(mesh));
    CHECK(gcl_defect(mesh, rate.vertex_velocities, 1e-6) <= 1e-6);
  }
}
