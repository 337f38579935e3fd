#include "mmfem/mesh1d.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mmfem/errors.hpp"

namespace mmfem {

void check_monotone(std::span<const double> vertices, const char* context) {
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (!(vertices[i] < vertices[i + 1])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << context << ": vertices " << i << " and " << i + 1 << " are not increasing ("
          << vertices[i] << " >= " << vertices[i + 1] << ")";
      throw TanglingError(msg.str());
    }
  }
}

Mesh1D::Mesh1D(std::vector<double> vertices, int degree, std::optional<std::size_t> interface_index)
    : vertices_(std::move(vertices)), degree_(degree), interface_(interface_index) {
  if (degree_ < 1) throw InvalidArgument("Mesh1D: degree must be >= 1");
  if (vertices_.size() < 2) throw InvalidArgument("Mesh1D: at least one element is required");
  if (interface_ && (*interface_ == 0 || *interface_ + 1 >= vertices_.size()))
    throw InvalidArgument("Mesh1D: interface vertex must be interior");
  for (double x : vertices_)
    if (!std::isfinite(x)) throw TanglingError("Mesh1D: non-finite vertex coordinate");
  check_monotone(vertices_, "Mesh1D");
}

PhaseView Mesh1D::phase(std::size_t k) const {
  if (!interface_) {
    if (k != 0) throw InvalidArgument("Mesh1D::phase: mesh has a single phase");
    return whole();
  }
  std::span<const double> all(vertices_);
  if (k == 0) return {all.first(*interface_ + 1), 0};
  if (k == 1) return {all.subspan(*interface_), *interface_};
  throw InvalidArgument("Mesh1D::phase: phase index out of range");
}

Mesh1D Mesh1D::with_vertices(std::vector<double> vertices) const {
  if (vertices.size() != vertices_.size())
    throw InvalidArgument("Mesh1D::with_vertices: vertex count changed");
  return Mesh1D(std::move(vertices), degree_, interface_);
}

Mesh1D build_uniform(double a, double b, std::size_t n, int degree) {
  if (n < 1) throw InvalidArgument("build_uniform: element count must be >= 1");
  if (!(a < b)) throw InvalidArgument("build_uniform: need a < b");
  if (degree < 1) throw InvalidArgument("build_uniform: degree must be >= 1");
  std::vector<double> x(n + 1);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) x[i] = a + h * static_cast<double>(i);
  x[n] = b;
  return Mesh1D(std::move(x), degree);
}

namespace {

void check_interface(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw InvalidArgument("Stefan mesh: interface position must lie in (0, 1)");
}

Mesh1D refine_times(Mesh1D mesh, int refinements) {
  if (refinements < 0) throw InvalidArgument("refinement count must be >= 0");
  for (int r = 0; r < refinements; ++r) mesh = refine_uniform(mesh);
  return mesh;
}

}  // namespace

Mesh1D build_stefan_bisection(int degree, int refinements, double s) {
  check_interface(s);
  // Right phase: bisect the piece touching s seven times, giving lengths
  // L/2^7, L/2^7, L/2^6, ..., L/2 from the interface outwards.
  constexpr int kBisections = 7;
  std::vector<double> right{1.0};
  double far = 1.0;
  for (int k = 0; k < kBisections; ++k) {
    far = 0.5 * (s + far);
    right.push_back(far);
  }
  std::vector<double> x{0.0, 0.5 * s, s};
  x.insert(x.end(), right.rbegin(), right.rend());
  return refine_times(Mesh1D(std::move(x), degree, 2), refinements);
}

double geometric_fill_ratio(double first_length, std::size_t n, double total) {
  if (n < 1 || !(first_length > 0.0) || !(total > 0.0))
    throw InvalidArgument("geometric_fill_ratio: need positive lengths and n >= 1");
  auto partial_sum = [&](double r) {
    double sum = 0.0, term = first_length;
    for (std::size_t k = 0; k < n; ++k) {
      sum += term;
      term *= r;
    }
    return sum - total;
  };
  if (n == 1) {
    if (std::abs(first_length - total) > 1e-14 * total)
      throw ConfigError("geometric_fill_ratio: a single element cannot fill the interval");
    return 1.0;
  }
  double lo = 0.0, hi = 1.0;
  if (partial_sum(lo) >= 0.0)
    throw ConfigError("geometric_fill_ratio: first element is longer than the interval");
  while (partial_sum(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw ConfigError("geometric_fill_ratio: failed to bracket the ratio");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (partial_sum(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Mesh1D build_stefan_geometric(int degree, int refinements, double s) {
  check_interface(s);
  if (refinements < 0) throw InvalidArgument("refinement count must be >= 0");
  const std::size_t n = std::size_t{5} << refinements;
  const double first = s / static_cast<double>(n);
  const double ratio = geometric_fill_ratio(first, n, 1.0 - s);

  std::vector<double> x(2 * n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = first * static_cast<double>(i);
  x[n] = s;
  double len = first;
  for (std::size_t i = n + 1; i <= 2 * n; ++i) {
    x[i] = x[i - 1] + len;
    len *= ratio;
  }
  x[2 * n] = 1.0;
  return Mesh1D(std::move(x), degree, n);
}

Mesh1D refine_uniform(const Mesh1D& mesh) {
  const auto& v = mesh.vertices();
  std::vector<double> x;
  x.reserve(2 * v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    x.push_back(v[i]);
    x.push_back(0.5 * (v[i] + v[i + 1]));
  }
  x.push_back(v.back());
  std::optional<std::size_t> iface;
  if (mesh.interface_index()) iface = 2 * *mesh.interface_index();
  return Mesh1D(std::move(x), mesh.degree(), iface);
}

std::vector<double> dof_points(std::span<const double> vertices, int degree) {
  const std::size_t ne = vertices.size() - 1;
  std::vector<double> pts(ne * degree + 1);
  for (std::size_t e = 0; e < ne; ++e) {
    const double a = vertices[e], b = vertices[e + 1];
    pts[e * degree] = a;
    for (int j = 1; j < degree; ++j) pts[e * degree + j] = a + (b - a) * j / degree;
  }
  pts.back() = vertices.back();
  return pts;
}

std::vector<double> dof_points(const Mesh1D& mesh) {
  return dof_points(mesh.vertices(), mesh.degree());
}

Mesh1D perturb_interior(const Mesh1D& mesh, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 0.5))
    throw InvalidArgument("perturb_interior: fraction must lie in [0, 0.5)");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto& v = mesh.vertices();
  std::vector<double> x = v;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double shift = unit(gen);
    if (mesh.interface_index() && *mesh.interface_index() == i) continue;
    const double h = std::min(v[i] - v[i - 1], v[i + 1] - v[i]);
    x[i] = v[i] + fraction * h * shift;
  }
  return mesh.with_vertices(std::move(x));
}

void write_mesh_csv(std::ostream& out, const Mesh1D& mesh) {
  out << "# mmfem-csv v1 mesh\n";
  out << "vertex_index,coordinate,is_interface\n";
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const bool iface = mesh.interface_index() && *mesh.interface_index() == i;
    out << i << ',' << mesh.vertices()[i] << ',' << (iface ? 1 : 0) << '\n';
  }
  out.precision(old);
}

}  // namespace mmfem
