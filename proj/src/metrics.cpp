#include "mmfem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "mmfem/errors.hpp"

namespace mmfem {

Snapshot make_snapshot(const MovingMeshModel& model, const SystemState& state) {
  return Snapshot{state.time,     model.degree(),          state.vertices,
                  model.interface_index(), model.recover(state), model.tracked_points(state)};
}

double squared_solution_error(const Snapshot& snap, const ExactSolution& exact, int quad_points) {
  const int q = quad_points > 0 ? quad_points : snap.degree + 5;
  const Mesh1D mesh = snap.mesh();
  double sum = 0.0;
  for (std::size_t k = 0; k < snap.phases.size(); ++k) {
    const TestSpace space(mesh.phase(k), snap.degree);
    const std::span<const double> c(snap.phases[k].coefficients);
    for_each_quadrature_point(space, q, [&](const QuadraturePoint& qp) {
      const double d = exact.value(qp.x, snap.time) - qp.value(c);
      sum += qp.weight * d * d;
    });
  }
  return sum;
}

namespace {

double squared_boundary_error(const Snapshot& snap, const ExactSolution& exact) {
  const auto ref = exact.boundary(snap.time);
  if (ref.size() != snap.tracked.size())
    throw InvalidArgument("boundary error: tracked point count mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < ref.size(); ++j) sum += (ref[j] - snap.tracked[j]) * (ref[j] - snap.tracked[j]);
  return sum;
}

}  // namespace

void SpaceTimeError::add(const Snapshot& snap, double dt) {
  sum_u_ += dt * squared_solution_error(snap, exact_, quad_points_);
  sum_x_ += dt * squared_boundary_error(snap, exact_);
  ++samples_;
}

double SpaceTimeError::error_u() const { return std::sqrt(sum_u_); }
double SpaceTimeError::error_x() const { return std::sqrt(sum_x_); }

double spacetime_solution_error(std::span<const Snapshot> snaps, const ExactSolution& exact,
                                double dt, int quad_points) {
  if (snaps.empty()) throw InvalidArgument("spacetime_solution_error: no snapshots");
  double sum = 0.0;
  for (const auto& s : snaps) sum += dt * squared_solution_error(s, exact, quad_points);
  return std::sqrt(sum);
}

double boundary_position_error(std::span<const Snapshot> snaps, const ExactSolution& exact,
                               double dt) {
  double sum = 0.0;
  for (const auto& s : snaps) sum += dt * squared_boundary_error(s, exact);
  return std::sqrt(sum);
}

double squared_difference(const Snapshot& a, const Snapshot& b) {
  if (a.phases.size() != b.phases.size())
    throw InvalidArgument("squared_difference: phase count mismatch");
  const Mesh1D ma = a.mesh(), mb = b.mesh();
  const QuadratureRule rule = gauss_rule(std::max(a.degree, b.degree) + 5);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.phases.size(); ++k) {
    const TestSpace sa(ma.phase(k), a.degree), sb(mb.phase(k), b.degree);
    const double lo = std::max(sa.vertices().front(), sb.vertices().front());
    const double hi = std::min(sa.vertices().back(), sb.vertices().back());
    if (!(hi > lo)) continue;
    std::vector<double> cuts{lo, hi};
    for (double x : sa.vertices()) if (x > lo && x < hi) cuts.push_back(x);
    for (double x : sb.vertices()) if (x > lo && x < hi) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double x0 = cuts[i], x1 = cuts[i + 1], mid = 0.5 * (x0 + x1);
      const std::size_t ea = sa.locate(mid), eb = sb.locate(mid);
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const double x = mid + 0.5 * (x1 - x0) * rule.points[g];
        const double d = element_value(sa, a.phases[k].coefficients, ea, x) -
                         element_value(sb, b.phases[k].coefficients, eb, x);
        sum += 0.5 * (x1 - x0) * rule.weights[g] * d * d;
      }
    }
  }
  return sum;
}

SelfConvergenceError self_convergence_error(std::span<const Snapshot> fine,
                                            std::span<const Snapshot> coarse, double dt_sample) {
  if (fine.empty()) throw InvalidArgument("self_convergence_error: no samples");
  double su = 0.0, sx = 0.0;
  for (const auto& f : fine) {
    const double tol = 1e-9 * std::max(1.0, std::abs(f.time));
    auto it = std::find_if(coarse.begin(), coarse.end(),
                           [&](const Snapshot& c) { return std::abs(c.time - f.time) <= tol; });
    if (it == coarse.end())
      throw InvalidArgument("self_convergence_error: sample time missing from the coarse run");
    su += dt_sample * squared_difference(*it, f);
    if (it->tracked.size() != f.tracked.size())
      throw InvalidArgument("self_convergence_error: tracked point count mismatch");
    for (std::size_t j = 0; j < f.tracked.size(); ++j)
      sx += dt_sample * (it->tracked[j] - f.tracked[j]) * (it->tracked[j] - f.tracked[j]);
  }
  if (coarse.size() != fine.size())
    throw InvalidArgument("self_convergence_error: sample time missing from the fine run");
  return {std::sqrt(su), std::sqrt(sx)};
}

std::vector<ErrorRecord> convergence_rates(std::vector<ErrorRecord> records,
                                           const FloorThresholds& floors) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    r.floored_u = r.error_u < floors.solution;
    r.floored_x = r.error_x < floors.boundary;
    r.order_u.reset();
    r.order_x.reset();
    if (i == 0) continue;
    const auto& prev = records[i - 1];
    if (prev.error_u > 0.0 && r.error_u > 0.0) r.order_u = std::log2(prev.error_u / r.error_u);
    if (prev.error_x > 0.0 && r.error_x > 0.0) r.order_x = std::log2(prev.error_x / r.error_x);
  }
  return records;
}

std::vector<double> usable_orders(std::span<const ErrorRecord> records, bool boundary) {
  std::vector<double> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    const bool floored = boundary ? (a.floored_x || b.floored_x) : (a.floored_u || b.floored_u);
    const auto& order = boundary ? b.order_x : b.order_u;
    if (!floored && order) out.push_back(*order);
  }
  return out;
}

void write_rates_csv(std::ostream& out, std::span<const ErrorRecord> records) {
  out << "# mmfem-csv v1 rates\n";
  out << "level,n_elements,dt,error_u,error_x,order_u,order_x,floored\n";
  const auto old = out.precision(10);
  out << std::scientific;
  for (const auto& r : records) {
    out << r.level << ',' << r.n_elements << ',' << r.dt << ',' << r.error_u << ',' << r.error_x
        << ',';
    if (r.order_u) out << std::fixed << std::setprecision(4) << *r.order_u << std::scientific
                       << std::setprecision(10);
    out << ',';
    if (r.order_x) out << std::fixed << std::setprecision(4) << *r.order_x << std::scientific
                       << std::setprecision(10);
    const char* flag = r.floored_u ? (r.floored_x ? "ux" : "u") : (r.floored_x ? "x" : "none");
    out << ',' << flag << '\n';
  }
  out << std::defaultfloat;
  out.precision(old);
}

}  // namespace mmfem
