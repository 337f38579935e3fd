#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmfem/fem_kernel.hpp"

namespace mmfem {

double erf(double x);
double erfc(double x);

/// Two-phase Stefan material data. Defaults are the classical benchmark set.
struct StefanParameters {
  double k_solid = 2.22;     // thermal conductivities
  double k_liquid = 0.556;
  double K_solid = 1.762;    // volumetric heat capacities
  double K_liquid = 4.226;
  double latent = 338.0;     // heat of phase change per unit volume
  double u_solid = -20.0;    // fixed temperature at x = 0
  double u_liquid = 10.0;    // far-field liquid temperature
  double t0 = 0.0012;

  double kappa_solid() const { return k_solid / K_solid; }
  double kappa_liquid() const { return k_liquid / K_liquid; }
  void validate() const;
};

/// Residual of the transcendental equation fixing the similarity constant.
double stefan_phi_residual(const StefanParameters& params, double phi);

/// Safeguarded Newton inside [lo, hi]; ConfigError without a sign change.
double stefan_phi_root(const StefanParameters& params, double lo = 0.05, double hi = 0.5);

/// Similarity solution of the two-phase Stefan problem on the half line.
class StefanSolution {
 public:
  explicit StefanSolution(StefanParameters params);

  const StefanParameters& params() const { return params_; }
  double phi() const { return phi_; }
  double interface(double t) const;
  double interface_speed(double t) const;
  double value(double x, double t) const;
  /// Phase-wise derivative; `solid_side` selects the branch at x = s(t).
  double gradient(double x, double t, bool solid_side) const;
  double gradient(double x, double t) const { return gradient(x, t, x <= interface(t)); }

 private:
  StefanParameters params_;
  double phi_;
};

/// u = -x - t + exp(x + t - 1) on x <= 1 - t, zero beyond.
double cg_exact(double x, double t);
double cg_gradient(double x, double t);
double cg_boundary(double t);
/// Fixed-boundary datum u_x(0, t).
double cg_neumann_gradient(double t);

/// Compactly supported similarity solution of u_t = (u^m u_x)_x.
struct PmeSimilarity {
  int m = 1;
  double x0 = 0.5;

  double t0() const { return 0.5 * m * x0 * x0 / (m + 2.0); }
  double lambda(double t) const;
  double value(double x, double t) const;
  double boundary(double t) const { return x0 * lambda(t); }
};

enum class ProblemKind { Stefan, CrankGupta, PorousMedium };
enum class PmeStart { Similarity, Cosine };

/// How each end of a phase interval enters the weak forms.
enum class EndpointKind {
  MovingFree,      // u = 0 and zero flux through the boundary: no endpoint terms
  FixedDirichlet,  // u prescribed, flux from the one-sided discrete gradient
  FixedNeumann,    // u_x prescribed as a function of time
  Interface,       // u = 0 at the Stefan front, flux from the discrete gradient
};

struct EndpointCondition {
  EndpointKind kind = EndpointKind::MovingFree;
  double value = 0.0;                          // Dirichlet value
  std::function<double(double)> gradient;      // Neumann datum u_x(t)

  bool moving() const { return kind == EndpointKind::MovingFree || kind == EndpointKind::Interface; }
  bool dirichlet() const { return kind != EndpointKind::FixedNeumann; }
};

/// (Lu) = (D(u) u_x)_x + source with D(u) = diffusivity * u^exponent.
struct PhaseForm {
  double diffusivity = 1.0;
  int exponent = 0;
  double source = 0.0;
  EndpointCondition left, right;

  double flux_coefficient(double u) const;
  /// Quadrature points that integrate every polynomial term exactly.
  int quadrature_points(int degree) const;
};

enum class MonitorRouting {
  MassMonitor,          // one mass-weighted potential drives boundary and interior motion
  InterfaceAreaMonitor  // Stefan: front speed from the jump condition, area monitor per phase
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::CrankGupta;
  StefanParameters stefan;
  int pme_exponent = 1;
  double pme_x0 = 0.5;
  PmeStart pme_start = PmeStart::Similarity;
  double t_start = 0.0;
  double t_end = 0.3;

  std::string name() const;
  MonitorRouting routing() const;
  /// True when the total of u is conserved by the scheme (monitor step skipped).
  bool conserves_mass() const { return kind == ProblemKind::PorousMedium; }
  bool has_exact_solution() const;

  /// Computational interval and interface position (if any) at t_start.
  std::vector<double> initial_breakpoints() const;
  double initial_value(double x) const;

  void validate() const;
};

ProblemSpec make_stefan(const StefanParameters& params = {}, double duration = 0.01);
ProblemSpec make_crank_gupta(double t_end = 0.3);
ProblemSpec make_pme_similarity(int m = 1, double x0 = 0.5, double duration = 0.01);
ProblemSpec make_pme_cosine(int m = 1, double t_end = 0.01);

/// Exact solution with the tracked boundary points (Stefan: the front; CG:
/// the right end; PME: both ends).
struct ExactSolution {
  std::function<double(double, double)> value;
  std::function<std::vector<double>(double)> boundary;
  double t_min = 0.0;
  double t_max = 0.0;
};
std::optional<ExactSolution> exact_solution(const ProblemSpec& spec);

/// Weak-form data per phase (one phase unless the problem is Stefan).
std::vector<PhaseForm> problem_weak_forms(const ProblemSpec& spec);

/// Signed endpoint value of D(u) u_x n (n = -1 left, +1 right) entering
/// int w (Lu)_h; zero for free moving ends.
double endpoint_flux(const PhaseForm& form, const TestSpace& space, const ScalarField& u,
                     bool right_end, double t);

/// v_i = int w_i (Lu)_h with the endpoint flux terms added.
std::vector<double> operator_functional(const PhaseForm& form, const TestSpace& space,
                                        const ScalarField& u, double t);

/// int (Lu)_h over the phase: endpoint fluxes plus the volume source.
double operator_total(const PhaseForm& form, const TestSpace& space, const ScalarField& u, double t);

}  // namespace mmfem
