#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace mmfem {

/// A contiguous run of elements of a mesh: the whole domain, or one phase of
/// a two-phase mesh. `element_offset` is the index of the first element of
/// the run in the parent mesh.
struct PhaseView {
  std::span<const double> vertices;
  std::size_t element_offset = 0;

  std::size_t num_elements() const { return vertices.size() - 1; }
  double left() const { return vertices.front(); }
  double right() const { return vertices.back(); }
  double length() const { return vertices.back() - vertices.front(); }
};

/**
 * Ordered vertex coordinates of a 1D mesh with an optional interface vertex.
 *
 * Vertices are strictly increasing; constructing a mesh whose vertices are
 * not throws TanglingError. The interface vertex, when present, is interior
 * and splits the mesh into a left phase (index 0) and a right phase (index 1).
 * Lagrange DOF points are always derived: p+1 uniform points per element.
 */
class Mesh1D {
 public:
  Mesh1D(std::vector<double> vertices, int degree,
         std::optional<std::size_t> interface_index = std::nullopt);

  const std::vector<double>& vertices() const { return vertices_; }
  int degree() const { return degree_; }
  std::optional<std::size_t> interface_index() const { return interface_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return vertices_.size() - 1; }
  std::size_t num_dofs() const { return num_elements() * degree_ + 1; }
  double element_length(std::size_t e) const { return vertices_[e + 1] - vertices_[e]; }
  double left() const { return vertices_.front(); }
  double right() const { return vertices_.back(); }

  std::size_t num_phases() const { return interface_ ? 2 : 1; }
  PhaseView phase(std::size_t k) const;
  PhaseView whole() const { return {vertices_, 0}; }

  /// Same degree and interface marker, new coordinates (validated).
  Mesh1D with_vertices(std::vector<double> vertices) const;

 private:
  std::vector<double> vertices_;
  int degree_;
  std::optional<std::size_t> interface_;
};

/// Throws TanglingError unless the coordinates are strictly increasing.
void check_monotone(std::span<const double> vertices, const char* context = "mesh");

Mesh1D build_uniform(double a, double b, std::size_t n, int degree);

/// Two uniform elements on [0, s], then [s, 1] split by bisecting the
/// sub-interval adjacent to s seven times. Each refinement level halves every
/// element of that coarsest mesh.
Mesh1D build_stefan_bisection(int degree, int refinements, double interface_position);

/// Uniform left phase; right phase with the same element count whose lengths
/// grow geometrically from the left-phase element length and exactly fill
/// [s, 1]. The coarsest mesh has 5 + 5 elements and every refinement level
/// doubles both counts and regenerates the progression.
Mesh1D build_stefan_geometric(int degree, int refinements, double interface_position);

/// Common ratio r with first_length * (1 + r + ... + r^(n-1)) = total, by
/// bisection on the monotone partial sum (tolerance 1e-14, 200 iterations).
double geometric_fill_ratio(double first_length, std::size_t n, double total);

Mesh1D refine_uniform(const Mesh1D& mesh);

/// Global continuous Lagrange node coordinates (n*p + 1 of them).
std::vector<double> dof_points(const Mesh1D& mesh);
std::vector<double> dof_points(std::span<const double> vertices, int degree);

/// Seeded uniform displacement of interior vertices by up to `fraction` of
/// the smaller adjacent element length. The interface vertex is kept.
Mesh1D perturb_interior(const Mesh1D& mesh, double fraction, std::uint64_t seed);

/// CSV dump: vertex_index,coordinate,is_interface
void write_mesh_csv(std::ostream& out, const Mesh1D& mesh);

}  // namespace mmfem
