#include "mmfem/engine.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "mmfem/errors.hpp"

namespace mmfem {

double MassDistribution::theta() const { return std::accumulate(mu.begin(), mu.end(), 0.0); }

ScalarField recover_solution(const TestSpace& space, const MassDistribution& mu) {
  if (mu.mu.size() != space.num_dofs())
    throw InvalidArgument("recover_solution: mass vector does not match the space");
  return ScalarField{solve_banded(assemble_mass(space), mu.mu, space.constraints())};
}

MassDistribution assemble_masses(const TestSpace& space, const ScalarField& u) {
  return MassDistribution{assemble_mass(space).multiply(u.coefficients)};
}

MonitorDistribution monitor_distribution(const TestSpace& space, const ScalarField& u,
                                         MonitorKind kind) {
  const std::span<const double> c(u.coefficients);
  std::vector<double> mu =
      kind == MonitorKind::Mass
          ? assemble_functional(space, [&](const QuadraturePoint& qp) { return qp.value(c); })
          : assemble_functional(space, [](const QuadraturePoint&) { return 1.0; });
  const double theta = std::accumulate(mu.begin(), mu.end(), 0.0);
  double scale = 0.0;
  for (double m : mu) scale += std::abs(m);
  if (!std::isfinite(theta) || !(std::abs(theta) > 1e-14 * scale))
    throw DegenerateMonitorError("monitor_distribution: vanishing monitor integral");
  for (double& m : mu) m /= theta;
  return MonitorDistribution{kind, std::move(mu), theta};
}

PotentialSolve solve_potential_mass(const TestSpace& space, const ScalarField& u,
                                    const MonitorDistribution* monitor, const PhaseForm& form,
                                    bool conserves_mass, double t, double pin_value) {
  const std::span<const double> c(u.coefficients);
  BandedMatrix K = assemble_weighted_stiffness(
      space, [&](const QuadraturePoint& qp) { return qp.value(c); });
  std::vector<double> b = operator_functional(form, space, u, t);
  double theta_dot = 0.0;
  if (!conserves_mass) {
    if (!monitor) throw InvalidArgument("solve_potential_mass: monitor distribution required");
    theta_dot = operator_total(form, space, u, t);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= monitor->c[i] * theta_dot;
  }
  try {
    auto phi = solve_banded(std::move(K), std::move(b), {{0, 0.0}});
    for (double& v : phi) v += pin_value;
    return {PotentialField{ScalarField{std::move(phi)}, 0, pin_value}, theta_dot};
  } catch (const SingularSystemError& e) {
    throw SingularSystemError(
        e.dof(), std::string("potential solve: degenerate u-weighted stiffness; ") + e.what());
  }
}

PotentialSolve solve_potential_area(const TestSpace& space, double left_normal_velocity,
                                    double right_normal_velocity, double pin_value) {
  const auto area = monitor_distribution(space, ScalarField{}, MonitorKind::Area);
  const double theta_dot = left_normal_velocity + right_normal_velocity;
  std::vector<double> b(space.num_dofs());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = -area.c[i] * theta_dot;
  b.front() += left_normal_velocity;
  b.back() += right_normal_velocity;
  auto phi = solve_banded(assemble_stiffness(space), std::move(b), {{0, 0.0}});
  for (double& v : phi) v += pin_value;
  return {PotentialField{ScalarField{std::move(phi)}, 0, pin_value}, theta_dot};
}

namespace {

const PotentialPiece& piece_for(std::span<const PotentialPiece> pieces, std::size_t e,
                                int degree) {
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
    if (it->element_offset <= e) {
      const std::size_t local = e - it->element_offset;
      if ((local + 1) * degree + 1 > it->potential.field.coefficients.size()) break;
      return *it;
    }
  throw InvalidArgument("recover_velocity: element not covered by any potential piece");
}

}  // namespace

VelocityField recover_velocity(const Mesh1D& mesh, std::span<const PotentialPiece> pieces,
                               std::span<const VelocityConstraint> prescribed,
                               VelocityRecovery variant) {
  const int p = mesh.degree();
  const int target = variant == VelocityRecovery::Interpolation ? p : 1;
  const TestSpace space(mesh.whole(), target);
  const int q = default_quadrature(p);
  const ReferenceElement& ref_phi = reference_element(p, q);
  const ReferenceElement& ref_w = reference_element(target, q);

  std::vector<double> rhs(space.num_dofs(), 0.0);
  const auto& x = mesh.vertices();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const PotentialPiece& piece = piece_for(pieces, e, p);
    const auto& phi = piece.potential.field.coefficients;
    const std::size_t first = (e - piece.element_offset) * p;
    const double h = x[e + 1] - x[e];
    for (std::size_t k = 0; k < ref_phi.num_points(); ++k) {
      const auto dphi = ref_phi.derivatives(k);
      double grad = 0.0;
      for (int j = 0; j <= p; ++j) grad += phi[first + j] * dphi[j];
      grad *= 2.0 / h;
      const double wq = ref_phi.weight(k) * 0.5 * h * grad;
      const auto w = ref_w.values(k);
      for (int j = 0; j <= target; ++j) rhs[e * target + j] += wq * w[j];
    }
  }

  ConstraintSet constraints;
  for (const auto& c : prescribed) {
    if (c.vertex >= mesh.num_vertices())
      throw InvalidArgument("recover_velocity: constrained vertex out of range");
    constraints.push_back({c.vertex * target, c.value});
  }
  VelocityField out;
  out.recovered = ScalarField{solve_banded(assemble_mass(space), std::move(rhs), constraints)};
  out.recovered_degree = target;
  out.vertex_values.resize(mesh.num_vertices());
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    out.vertex_values[i] = out.recovered.coefficients[i * target];
  return out;
}

std::vector<double> ale_rate(const TestSpace& space, const PhaseForm& form, const ScalarField& u,
                             std::span<const double> vertex_velocity, double t) {
  if (vertex_velocity.size() != space.num_elements() + 1)
    throw InvalidArgument("ale_rate: vertex velocity count does not match the phase");
  const std::span<const double> c(u.coefficients);
  const auto verts = space.vertices();
  std::vector<double> rate(space.num_dofs(), 0.0);
  for_each_quadrature_point(space, form.quadrature_points(space.degree()),
                            [&](const QuadraturePoint& qp) {
    const std::size_t e = qp.element;
    const double s = (qp.x - verts[e]) / (verts[e + 1] - verts[e]);
    const double v = vertex_velocity[e] + (vertex_velocity[e + 1] - vertex_velocity[e]) * s;
    const double uq = qp.value(c);
    const double flux = (form.flux_coefficient(uq) * qp.gradient(c) + uq * v) * qp.weight;
    const double src = form.source * qp.weight;
    for (std::size_t j = 0; j < qp.basis.size(); ++j)
      rate[qp.first_dof + j] += src * qp.basis[j] - flux * qp.grad[j];
  });
  rate.front() += endpoint_flux(form, space, u, false, t) - c.front() * vertex_velocity.front();
  rate.back() += endpoint_flux(form, space, u, true, t) + c.back() * vertex_velocity.back();
  return rate;
}

MovingMeshModel::MovingMeshModel(ProblemSpec spec, int degree,
                                 std::optional<std::size_t> interface_index,
                                 VelocityRecovery variant)
    : spec_(std::move(spec)),
      degree_(degree),
      variant_(variant),
      forms_(problem_weak_forms(spec_)),
      interface_(interface_index) {
  spec_.validate();
  if (degree_ < 1 || degree_ > kMaxDegree) throw InvalidArgument("MovingMeshModel: bad degree");
  if ((forms_.size() == 2) != interface_.has_value())
    throw InvalidArgument("MovingMeshModel: Stefan problems need an interface vertex (only)");
}

Mesh1D MovingMeshModel::mesh(const SystemState& state) const {
  return Mesh1D(state.vertices, degree_, interface_);
}

TestSpace MovingMeshModel::phase_space(const Mesh1D& mesh, std::size_t phase) const {
  const PhaseForm& form = forms_.at(phase);
  const PhaseView view = mesh.phase(phase);
  const std::size_t last = view.num_elements() * degree_;
  ConstraintSet constraints;
  if (form.left.dirichlet()) constraints.push_back({0, form.left.value});
  if (form.right.dirichlet()) constraints.push_back({last, form.right.value});
  return TestSpace(view, degree_, std::move(constraints));
}

SystemState MovingMeshModel::state_from(const Mesh1D& mesh, double time,
                                        const std::function<double(double)>& u0) const {
  if (mesh.degree() != degree_ || mesh.interface_index() != interface_)
    throw InvalidArgument("MovingMeshModel: mesh degree or interface marker mismatch");
  SystemState state{time, mesh.vertices(), {}};
  for (std::size_t k = 0; k < forms_.size(); ++k) {
    const TestSpace space = phase_space(mesh, k);
    ScalarField u = interpolate(space, u0);
    for (const auto& c : space.constraints()) u.coefficients[c.dof] = c.value;
    state.masses.push_back(assemble_masses(space, u));
  }
  return state;
}

SystemState MovingMeshModel::initial_state(const Mesh1D& mesh) const {
  return state_from(mesh, spec_.t_start, [this](double x) { return spec_.initial_value(x); });
}

std::vector<ScalarField> MovingMeshModel::recover(const SystemState& state) const {
  const Mesh1D m = mesh(state);
  std::vector<ScalarField> out;
  for (std::size_t k = 0; k < forms_.size(); ++k)
    out.push_back(recover_solution(phase_space(m, k), state.masses.at(k)));
  return out;
}

std::vector<double> MovingMeshModel::tracked_points(const SystemState& state) const {
  switch (spec_.kind) {
    case ProblemKind::Stefan: return {state.vertices[*interface_]};
    case ProblemKind::CrankGupta: return {state.vertices.back()};
    case ProblemKind::PorousMedium: return {state.vertices.front(), state.vertices.back()};
  }
  return {};
}

RhsTrace MovingMeshModel::trace(const SystemState& state, double pin_value) const {
  if (state.masses.size() != forms_.size())
    throw InvalidArgument("MovingMeshModel: state has the wrong number of phases");
  const Mesh1D m = mesh(state);
  const double t = state.time;
  RhsTrace tr;
  std::vector<TestSpace> spaces;
  for (std::size_t k = 0; k < forms_.size(); ++k) {
    spaces.push_back(phase_space(m, k));
    tr.solution.push_back(recover_solution(spaces[k], state.masses[k]));
  }

  std::vector<PotentialPiece> pieces;
  std::vector<VelocityConstraint> prescribed;
  if (spec_.routing() == MonitorRouting::MassMonitor) {
    const bool conserves = spec_.conserves_mass();
    if (!conserves)
      tr.monitors.push_back(monitor_distribution(spaces[0], tr.solution[0], MonitorKind::Mass));
    tr.potentials.push_back(solve_potential_mass(spaces[0], tr.solution[0],
                                                 conserves ? nullptr : &tr.monitors[0],
                                                 forms_[0], conserves, t, pin_value));
    pieces.push_back({0, tr.potentials[0].potential});
    if (!forms_[0].left.moving()) prescribed.push_back({0, 0.0});
    if (!forms_[0].right.moving()) prescribed.push_back({m.num_vertices() - 1, 0.0});
  } else {
    const auto& sp = spec_.stefan;
    const TestSpace& solid = spaces[0];
    const TestSpace& liquid = spaces[1];
    const double s = m.vertices()[*interface_];
    const double grad_s =
        element_gradient(solid, tr.solution[0].coefficients, solid.num_elements() - 1, s);
    const double grad_l = element_gradient(liquid, tr.solution[1].coefficients, 0, s);
    const double speed = (sp.k_solid * grad_s - sp.k_liquid * grad_l) / sp.latent;
    tr.front_speed = speed;
    for (std::size_t k = 0; k < 2; ++k)
      tr.monitors.push_back(monitor_distribution(spaces[k], tr.solution[k], MonitorKind::Area));
    // Outward normals: +1 for the solid at the front, -1 for the liquid.
    tr.potentials.push_back(solve_potential_area(solid, 0.0, speed, pin_value));
    tr.potentials.push_back(solve_potential_area(liquid, -speed, 0.0, pin_value));
    pieces.push_back({0, tr.potentials[0].potential});
    pieces.push_back({*interface_, tr.potentials[1].potential});
    prescribed = {{0, 0.0}, {*interface_, speed}, {m.num_vertices() - 1, 0.0}};
  }

  tr.velocity = recover_velocity(m, pieces, prescribed, variant_);
  tr.rate.vertex_velocities = tr.velocity.vertex_values;
  for (std::size_t k = 0; k < forms_.size(); ++k) {
    const PhaseView view = m.phase(k);
    const std::span<const double> vv(tr.velocity.vertex_values.data() + view.element_offset,
                                     view.vertices.size());
    tr.rate.mass_rates.push_back(ale_rate(spaces[k], forms_[k], tr.solution[k], vv, t));
  }
  return tr;
}

SystemRate evaluate_rhs(const SystemState& state, const MovingMeshModel& model) {
  return model.evaluate(state);
}

SystemState advance(const SystemState& y, const SystemRate& f, double dt) {
  if (f.vertex_velocities.size() != y.vertices.size() || f.mass_rates.size() != y.masses.size())
    throw InvalidArgument("advance: rate does not match the state");
  SystemState out = y;
  out.time += dt;
  for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] += dt * f.vertex_velocities[i];
  for (std::size_t k = 0; k < out.masses.size(); ++k) {
    auto& mu = out.masses[k].mu;
    if (f.mass_rates[k].size() != mu.size()) throw InvalidArgument("advance: mass rate size");
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += dt * f.mass_rates[k][i];
  }
  return out;
}

namespace {

// a*x + b*y, componentwise (time included).
SystemState combine(double a, const SystemState& x, double b, const SystemState& y) {
  SystemState out = x;
  out.time = a * x.time + b * y.time;
  for (std::size_t i = 0; i < out.vertices.size(); ++i)
    out.vertices[i] = a * x.vertices[i] + b * y.vertices[i];
  for (std::size_t k = 0; k < out.masses.size(); ++k)
    for (std::size_t i = 0; i < out.masses[k].mu.size(); ++i)
      out.masses[k].mu[i] = a * x.masses[k].mu[i] + b * y.masses[k].mu[i];
  return out;
}

void check_stage(const SystemState& s, int stage) {
  const std::string ctx = "ssp_rk_step stage " + std::to_string(stage);
  check_monotone(s.vertices, ctx.c_str());
}

}  // namespace

SystemState ssp_rk_step(const SystemState& y, const RhsEvaluator& rhs, double dt, int order) {
  if (!(dt > 0.0)) throw InvalidArgument("ssp_rk_step: dt must be positive");
  SystemState out;
  switch (order) {
    case 1:
      out = advance(y, rhs(y), dt);
      check_stage(out, 1);
      break;
    case 2: {
      const SystemState y1 = advance(y, rhs(y), dt);
      check_stage(y1, 1);
      out = combine(0.5, y, 0.5, advance(y1, rhs(y1), dt));
      check_stage(out, 2);
      break;
    }
    case 3: {
      const SystemState y1 = advance(y, rhs(y), dt);
      check_stage(y1, 1);
      const SystemState y2 = combine(0.75, y, 0.25, advance(y1, rhs(y1), dt));
      check_stage(y2, 2);
      out = combine(1.0 / 3.0, y, 2.0 / 3.0, advance(y2, rhs(y2), dt));
      check_stage(out, 3);
      break;
    }
    default:
      throw InvalidArgument("ssp_rk_step: order must be 1, 2 or 3");
  }
  out.time = y.time + dt;
  return out;
}

double gcl_defect(const Mesh1D& mesh, std::span<const double> vv, double dt) {
  if (vv.size() != mesh.num_vertices()) throw InvalidArgument("gcl_defect: velocity size");
  const TestSpace space(mesh.whole(), mesh.degree());
  auto one = [](const QuadraturePoint&) { return 1.0; };
  const auto before = assemble_functional(space, one);
  std::vector<double> moved = mesh.vertices();
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += dt * vv[i];
  const Mesh1D next = mesh.with_vertices(std::move(moved));
  const auto after = assemble_functional(TestSpace(next.whole(), next.degree()), one);
  const auto& x = mesh.vertices();
  const auto divergence = assemble_functional(space, [&](const QuadraturePoint& qp) {
    return (vv[qp.element + 1] - vv[qp.element]) / (x[qp.element + 1] - x[qp.element]);
  });
  double defect = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i)
    defect = std::max(defect, std::abs((after[i] - before[i]) / dt - divergence[i]));
  return defect;
}

}  // namespace mmfem
