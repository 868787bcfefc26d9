#include <pmcf/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include <pmcf/errors.hpp>

namespace pmcf {

namespace {

constexpr double interior_clearance = 0.6; // in units of h
constexpr int smoothing_sweeps = 5;

double segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * d));
}

// Distance queries against the dense boundary polyline of the domain.
class BoundaryDistance
{
public:
  BoundaryDistance(const DomainSpec& domain, double cell)
    : poly_(domain.dense_boundary())
    , origin_(domain.bbox_min() - Vec2{cell, cell})
    , cell_(cell)
  {
    const Vec2 extent = domain.bbox_max() - origin_ + Vec2{cell, cell};
    nx_ = static_cast<int>(std::ceil(extent.x / cell)) + 1;
    ny_ = static_cast<int>(std::ceil(extent.y / cell)) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    const std::size_t n = poly_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = poly_[i];
      const Vec2 b = poly_[(i + 1) % n];
      const auto [ix0, iy0] = cell_of({std::min(a.x, b.x), std::min(a.y, b.y)});
      const auto [ix1, iy1] = cell_of({std::max(a.x, b.x), std::max(a.y, b.y)});
      for (int iy = iy0; iy <= iy1; ++iy)
        for (int ix = ix0; ix <= ix1; ++ix)
          buckets_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(static_cast<int>(i));
    }
  }

  //! Distance to the boundary, or +inf if it exceeds one cell.
  double near_distance(Vec2 p) const
  {
    const auto [cx, cy] = cell_of(p);
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly_.size();
    for (int iy = std::max(cy - 1, 0); iy <= std::min(cy + 1, ny_ - 1); ++iy)
      for (int ix = std::max(cx - 1, 0); ix <= std::min(cx + 1, nx_ - 1); ++ix)
        for (int s : buckets_[static_cast<std::size_t>(iy) * nx_ + ix])
          best = std::min(best, segment_distance(p, poly_[s], poly_[(s + 1) % n]));
    return best <= cell_ ? best : std::numeric_limits<double>::infinity();
  }

private:
  std::pair<int, int> cell_of(Vec2 p) const
  {
    const int ix = std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int iy = std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / cell_)), 0, ny_ - 1);
    return {ix, iy};
  }

  const std::vector<Vec2>& poly_;
  Vec2 origin_;
  double cell_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

std::vector<Vec2> hexagonal_lattice(const DomainSpec& domain, double h)
{
  const double dy = h * std::sqrt(3.0) / 2.0;
  const Vec2 lo = domain.bbox_min();
  const Vec2 hi = domain.bbox_max();
  const BoundaryDistance distance(domain, h);
  const double clearance = interior_clearance * h;

  std::vector<Vec2> points;
  const int j0 = static_cast<int>(std::floor(lo.y / dy)) - 1;
  const int j1 = static_cast<int>(std::ceil(hi.y / dy)) + 1;
  const int i0 = static_cast<int>(std::floor(lo.x / h)) - 1;
  const int i1 = static_cast<int>(std::ceil(hi.x / h)) + 1;
  for (int j = j0; j <= j1; ++j) {
    const double shift = ((j % 2) + 2) % 2 == 1 ? 0.5 : 0.0;
    for (int i = i0; i <= i1; ++i) {
      const Vec2 p{(i + shift) * h, j * dy};
      if (domain.gauge(p) >= 1.0)
        continue;
      if (distance.near_distance(p) < clearance)
        continue;
      points.push_back(p);
    }
  }
  return points;
}

// Jacobi sweeps moving interior vertices to the mean of their neighbours.
// A move that would invert an incident triangle is undone.
void laplacian_smoothing(Mesh& mesh, int sweeps)
{
  const auto adj = vertex_neighbours(mesh);
  std::vector<std::vector<int>> incident(mesh.num_vertices());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles[t])
      incident[v].push_back(static_cast<int>(t));

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const std::vector<Vec2> old = mesh.vertices;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      if (mesh.boundary[v] || adj[v].empty())
        continue;
      Vec2 sum;
      for (int w : adj[v])
        sum += old[w];
      mesh.vertices[v] = (1.0 / adj[v].size()) * sum;
    }
    bool reverted = true;
    while (reverted) {
      reverted = false;
      for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.area(t) > 0.0)
          continue;
        for (int v : mesh.triangles[t])
          if (mesh.vertices[v] != old[v]) {
            mesh.vertices[v] = old[v];
            reverted = true;
          }
      }
    }
  }
}

} // namespace

Mesh generate_mesh(const DomainSpec& domain, double h)
{
  if (!(h > 0.0))
    throw InvalidArgument("mesh size must be positive");
  if (!(h < domain.diameter() / 4.0))
    throw MeshSizeTooLarge("mesh size " + std::to_string(h) +
                           " must be below a quarter of the domain diameter " +
                           std::to_string(domain.diameter()));

  const int n_boundary =
    std::max(3, static_cast<int>(std::lround(domain.boundary_length() / h)));
  std::vector<Vec2> points = domain.sample_by_arclength(n_boundary);
  const std::vector<Vec2> interior = hexagonal_lattice(domain, h);
  points.insert(points.end(), interior.begin(), interior.end());

  Mesh mesh;
  mesh.triangles = delaunay_convex(points, n_boundary);
  mesh.vertices = std::move(points);
  mesh.boundary.assign(mesh.vertices.size(), false);
  std::fill(mesh.boundary.begin(), mesh.boundary.begin() + n_boundary, true);
  mesh.h_target = h;

  laplacian_smoothing(mesh, smoothing_sweeps);
  update_mesh_size(mesh);
  return mesh;
}

} // namespace pmcf
