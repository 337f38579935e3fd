#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mmfem/engine.hpp"
#include "mmfem/problems.hpp"

namespace mmfem {

/// Recovered solution and mesh at one time level.
struct Snapshot {
  double time = 0.0;
  int degree = 1;
  std::vector<double> vertices;
  std::optional<std::size_t> interface_index;
  std::vector<ScalarField> phases;
  std::vector<double> tracked;  // boundary / front coordinates

  Mesh1D mesh() const { return Mesh1D(vertices, degree, interface_index); }
};

Snapshot make_snapshot(const MovingMeshModel& model, const SystemState& state);

/// int over the computational domain of (u - u_h)^2 at one snapshot, Gauss
/// rule with `quad_points` per element (0 selects p + 5).
double squared_solution_error(const Snapshot& snap, const ExactSolution& exact,
                              int quad_points = 0);

/// Running sums of the mixed discrete/continuous space-time norms.
class SpaceTimeError {
 public:
  explicit SpaceTimeError(ExactSolution exact, int quad_points = 0)
      : exact_(std::move(exact)), quad_points_(quad_points) {}

  void add(const Snapshot& snap, double dt);
  double error_u() const;
  double error_x() const;
  std::size_t samples() const { return samples_; }

 private:
  ExactSolution exact_;
  int quad_points_;
  double sum_u_ = 0.0;
  double sum_x_ = 0.0;
  std::size_t samples_ = 0;
};

/// (sum_n dt int (u - u_h)^2)^(1/2) over snapshots n = 1..N_t.
double spacetime_solution_error(std::span<const Snapshot> snaps, const ExactSolution& exact,
                                double dt, int quad_points = 0);

/// (sum_n dt |x(t^n) - x_h(t^n)|^2)^(1/2), all tracked points contributing.
double boundary_position_error(std::span<const Snapshot> snaps, const ExactSolution& exact,
                               double dt);

struct SelfConvergenceError {
  double error_u;
  double error_x;
};

/// Differences between a run and the run on the twice-coarser mesh at
/// shared sample times, integrated over the overlap of the two domains.
/// Each snapshot time must appear in both runs.
SelfConvergenceError self_convergence_error(std::span<const Snapshot> fine,
                                            std::span<const Snapshot> coarse, double dt_sample);

/// int over the overlap of (u_a - u_b)^2, phase by phase.
double squared_difference(const Snapshot& a, const Snapshot& b);

struct FloorThresholds {
  double solution = 1e-8;
  double boundary = 1e-11;
};

struct ErrorRecord {
  int level = 0;
  std::size_t n_elements = 0;
  double dt = 0.0;
  double error_u = 0.0;
  double error_x = 0.0;
  std::optional<double> order_u;  // relative to the previous record
  std::optional<double> order_x;
  bool floored_u = false;
  bool floored_x = false;
};

/// Fills orders log2(E_l / E_{l+1}) and floor flags.
std::vector<ErrorRecord> convergence_rates(std::vector<ErrorRecord> records,
                                           const FloorThresholds& floors = {});

/// Orders between consecutive records where neither is floored.
std::vector<double> usable_orders(std::span<const ErrorRecord> records, bool boundary);

void write_rates_csv(std::ostream& out, std::span<const ErrorRecord> records);

}  // namespace mmfem
