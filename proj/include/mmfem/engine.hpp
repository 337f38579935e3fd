#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mmfem/fem_kernel.hpp"
#include "mmfem/mesh1d.hpp"
#include "mmfem/problems.hpp"

namespace mmfem {

/// Per-test-function masses mu_i = int w_i u of one phase.
struct MassDistribution {
  std::vector<double> mu;
  double theta() const;
};

enum class MonitorKind { Mass, Area };

struct MonitorDistribution {
  MonitorKind kind;
  std::vector<double> c;  // mu_M(w_i) / theta_M, sums to one
  double theta;
};

/// Velocity potential on one phase with the gauge pin that made it unique.
struct PotentialField {
  ScalarField field;
  std::size_t pinned_dof = 0;
  double pinned_value = 0.0;
};

struct PotentialSolve {
  PotentialField potential;
  double theta_dot;
};

enum class VelocityRecovery { Interpolation, Projection };

/// Vertex velocities (the piecewise linear mesh velocity) and the field they
/// were taken from: the degree-p recovery for interpolation, or the P1
/// projection itself.
struct VelocityField {
  std::vector<double> vertex_values;
  ScalarField recovered;
  int recovered_degree = 1;
};

struct VelocityConstraint {
  std::size_t vertex;
  double value;
};

/// Potential on a contiguous run of elements starting at `element_offset`
/// of the mesh handed to recover_velocity.
struct PotentialPiece {
  std::size_t element_offset;
  PotentialField potential;
};

/// ODE unknowns: vertex coordinates and one mass distribution per phase.
struct SystemState {
  double time = 0.0;
  std::vector<double> vertices;
  std::vector<MassDistribution> masses;
};

struct SystemRate {
  std::vector<double> vertex_velocities;
  std::vector<std::vector<double>> mass_rates;
};

/// Solve int w_i u_h = mu_i for the free test functions; the
/// space's constraints fix the Dirichlet DOFs.
ScalarField recover_solution(const TestSpace& space, const MassDistribution& mu);

/// mu_i = int w_i u_h for every test function.
MassDistribution assemble_masses(const TestSpace& space, const ScalarField& u);

/// c_i = int w_i M / int M for monitor M = u or 1. Throws DegenerateMonitorError when the normaliser vanishes.
MonitorDistribution monitor_distribution(const TestSpace& space, const ScalarField& u,
                                         MonitorKind kind);

/// Mass-monitor potential: int u w_i' phi' = int w_i (Lu)_h - c_i theta_dot. `monitor`
/// may be empty only for problems that conserve mass (theta_dot = 0).
/// The system is solved with phi = 0 at the pinned DOF and then shifted, so
/// the pin value never changes phi'.
PotentialSolve solve_potential_mass(const TestSpace& space, const ScalarField& u,
                                    const MonitorDistribution* monitor, const PhaseForm& form,
                                    bool conserves_mass, double t, double pin_value = 0.0);

/// Area-monitor potential: int w_i' phi' = sum over ends of
/// w_i (v.n) - c_i theta_dot, with theta_dot = sum of end values v.n.
PotentialSolve solve_potential_area(const TestSpace& space, double left_normal_velocity,
                                    double right_normal_velocity, double pin_value = 0.0);

/// Recover v_h from phi_h' on the whole mesh and take its vertex values (interpolation), or project phi_h' onto P1 (projection).
VelocityField recover_velocity(const Mesh1D& mesh, std::span<const PotentialPiece> pieces,
                               std::span<const VelocityConstraint> prescribed,
                               VelocityRecovery variant);

/// ALE rate mu_i' = d/dt int w_i u_h on one phase; `vertex_velocity` holds
/// the velocities of the phase's vertices.
std::vector<double> ale_rate(const TestSpace& space, const PhaseForm& form, const ScalarField& u,
                             std::span<const double> vertex_velocity, double t);

/// Intermediate values of one right-hand-side evaluation.
struct RhsTrace {
  std::vector<ScalarField> solution;          // per phase
  std::vector<MonitorDistribution> monitors;  // per phase, empty when skipped
  std::vector<PotentialSolve> potentials;     // per phase
  std::optional<double> front_speed;          // Stefan only
  VelocityField velocity;
  SystemRate rate;
};

/**
 * The semi-discrete moving-mesh system for one problem at one degree.
 *
 * evaluate() runs recovery, monitor distribution, potential solve(s),
 * velocity recovery and the ALE rate in that order. The object is immutable
 * and can be shared by concurrent simulations.
 */
class MovingMeshModel {
 public:
  /// Stefan problems need the index of the front vertex.
  MovingMeshModel(ProblemSpec spec, int degree, std::optional<std::size_t> interface_index,
                  VelocityRecovery variant = VelocityRecovery::Interpolation);

  const ProblemSpec& spec() const { return spec_; }
  int degree() const { return degree_; }
  VelocityRecovery variant() const { return variant_; }
  const std::vector<PhaseForm>& forms() const { return forms_; }

  std::optional<std::size_t> interface_index() const { return interface_; }

  /// Masses of the interpolant of the problem's initial data on `mesh`.
  SystemState initial_state(const Mesh1D& mesh) const;
  SystemState state_from(const Mesh1D& mesh, double time,
                         const std::function<double(double)>& u0) const;

  Mesh1D mesh(const SystemState& state) const;
  TestSpace phase_space(const Mesh1D& mesh, std::size_t phase) const;
  std::vector<ScalarField> recover(const SystemState& state) const;
  /// Tracked boundary coordinates (front; right end; both ends).
  std::vector<double> tracked_points(const SystemState& state) const;

  SystemRate evaluate(const SystemState& state) const { return trace(state).rate; }
  RhsTrace trace(const SystemState& state, double pin_value = 0.0) const;

 private:
  ProblemSpec spec_;
  int degree_;
  VelocityRecovery variant_;
  std::vector<PhaseForm> forms_;
  std::optional<std::size_t> interface_;
};

SystemRate evaluate_rhs(const SystemState& state, const MovingMeshModel& model);

using RhsEvaluator = std::function<SystemRate(const SystemState&)>;

/// y + dt F, time advanced by dt.
SystemState advance(const SystemState& y, const SystemRate& f, double dt);

/// One SSP-RK step of order 1 (forward Euler), 2 (Heun) or 3 (Shu-Osher).
/// The vertices are checked for monotonicity after every stage.
SystemState ssp_rk_step(const SystemState& state, const RhsEvaluator& rhs, double dt, int order);

/// Largest |(int w_i)(t+dt) - (int w_i)(t)| / dt - int w_i v~'| over the test
/// functions after one forward-Euler move of the vertices.
double gcl_defect(const Mesh1D& mesh, std::span<const double> vertex_velocity, double dt);

}  // namespace mmfem
