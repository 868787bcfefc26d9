#ifndef PMCF_MESH_HPP
#define PMCF_MESH_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <pmcf/domain.hpp>
#include <pmcf/vec2.hpp>

namespace pmcf {

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>; // sorted vertex pair

/**
 * Conforming triangulation of a polygonal domain.
 *
 * Triangles are counter-clockwise. `boundary` flags the vertices of the
 * boundary polygon. `h_actual` is the longest edge.
 */
struct Mesh
{
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<bool> boundary;
  double h_target = 0.0;
  double h_actual = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  double area(std::size_t t) const;
  Vec2 centroid(std::size_t t) const;
  double total_area() const;
};

//! Unique edges with the number of incident triangles (1 or 2 for a valid mesh).
struct EdgeInfo
{
  Edge vertices;
  int triangle_count = 0;
};
std::vector<EdgeInfo> collect_edges(const Mesh& mesh);

//! Longest and shortest edge lengths.
std::pair<double, double> edge_length_range(const Mesh& mesh);

//! Recomputes h_actual from the current geometry.
void update_mesh_size(Mesh& mesh);

//! Vertex-to-vertex adjacency (sorted, no self loops).
std::vector<std::vector<int>> vertex_neighbours(const Mesh& mesh);

//! Ordered vertex cycle of the boundary polygon (counter-clockwise). Throws
//! InvalidArgument if the boundary is not a single closed loop.
std::vector<int> boundary_loop(const Mesh& mesh);

/**
 * Structural checks of a mesh. Every violation is listed in `problems`;
 * `domain` enables the on-boundary and containment checks.
 */
struct MeshCheck
{
  std::vector<std::string> problems;
  double min_signed_area = 0.0;
  double edge_ratio = 0.0;
  bool ok() const { return problems.empty(); }
};
MeshCheck check_mesh(const Mesh& mesh, const DomainSpec* domain = nullptr,
                     double max_edge_ratio = 8.0, double boundary_tol = 1e-12);

/**
 * Quasi-uniform triangulation of the domain with target size h: boundary
 * vertices equally spaced in arc length, a hexagonal interior lattice kept at
 * distance >= 0.6 h from the boundary, Delaunay connectivity and five Jacobi
 * sweeps of Laplacian smoothing. Deterministic for fixed (domain, h).
 */
Mesh generate_mesh(const DomainSpec& domain, double h);

//! Delaunay triangulation of a strictly convex counter-clockwise polygon
//! (vertices 0..polygon_size-1 of `points`) and additional interior points.
std::vector<Triangle> delaunay_convex(const std::vector<Vec2>& points, int polygon_size);

// ---- point location ----------------------------------------------------

struct Location
{
  std::size_t triangle = 0;
  std::array<double, 3> barycentric{};
};

//! Bucket grid over triangle bounding boxes for repeated point queries.
class PointLocator
{
public:
  explicit PointLocator(const Mesh& mesh);

  //! Containing triangle with barycentric coordinates clamped to [0, 1] and
  //! renormalized; nullopt outside the mesh.
  std::optional<Location> locate(Vec2 p) const;

  //! Triangles whose bounding box may meet the box [lo, hi] (sorted, unique).
  std::vector<int> triangles_near(Vec2 lo, Vec2 hi) const;

  const Mesh& mesh() const { return *mesh_; }

private:
  const Mesh* mesh_;
  Vec2 origin_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<int> cell_start_;
  std::vector<int> cell_items_;
};

//! Barycentric coordinates of p with respect to triangle t (unclamped).
std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, Vec2 p);

//! One-off query; builds a PointLocator internally.
std::optional<Location> locate_point(const Mesh& mesh, Vec2 p);

// ---- file formats ------------------------------------------------------

//! Gmsh MSH 2.2 ASCII: nodes, boundary lines (type 1) and triangles (type 2).
void export_gmsh(const Mesh& mesh, std::ostream& out);
Mesh import_gmsh(std::istream& in);

//! Native dump: vertices.csv (id,x,y,boundary) and triangles.csv (id,v0,v1,v2).
void write_mesh_csv(const Mesh& mesh, std::ostream& vertices, std::ostream& triangles);
Mesh read_mesh_csv(std::istream& vertices, std::istream& triangles);

} // namespace pmcf

#endif
