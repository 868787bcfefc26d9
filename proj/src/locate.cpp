#include <pmcf/mesh.hpp>

#include <algorithm>
#include <cmath>

namespace pmcf {

namespace {
constexpr double barycentric_tol = 1e-12;
}

std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, Vec2 p)
{
  const Triangle& tri = mesh.triangles[t];
  const Vec2 a = mesh.vertices[tri[0]];
  const Vec2 b = mesh.vertices[tri[1]];
  const Vec2 c = mesh.vertices[tri[2]];
  const double det = orient(a, b, c);
  const double l1 = orient(a, p, c) / det;
  const double l2 = orient(a, b, p) / det;
  return {1.0 - l1 - l2, l1, l2};
}

PointLocator::PointLocator(const Mesh& mesh)
  : mesh_(&mesh)
{
  if (mesh.vertices.empty() || mesh.triangles.empty())
    return;
  Vec2 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const Vec2& v : mesh.vertices) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const double width = std::max(hi.x - lo.x, 1e-300);
  const double height = std::max(hi.y - lo.y, 1e-300);
  // about two triangles per cell
  const double cells = std::max(1.0, 0.5 * mesh.num_triangles());
  cell_ = std::sqrt(width * height / cells);
  if (!(cell_ > 0.0))
    cell_ = std::max(width, height);
  origin_ = lo;
  nx_ = std::max(1, static_cast<int>(std::ceil(width / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(height / cell_)));

  auto cell_range = [&](const Triangle& tri) {
    Vec2 a = mesh.vertices[tri[0]], b = a;
    for (int v : tri) {
      a = {std::min(a.x, mesh.vertices[v].x), std::min(a.y, mesh.vertices[v].y)};
      b = {std::max(b.x, mesh.vertices[v].x), std::max(b.y, mesh.vertices[v].y)};
    }
    const int ix0 = std::clamp(static_cast<int>(std::floor((a.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int iy0 = std::clamp(static_cast<int>(std::floor((a.y - origin_.y) / cell_)), 0, ny_ - 1);
    const int ix1 = std::clamp(static_cast<int>(std::floor((b.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int iy1 = std::clamp(static_cast<int>(std::floor((b.y - origin_.y) / cell_)), 0, ny_ - 1);
    return std::array<int, 4>{ix0, iy0, ix1, iy1};
  };

  // counting pass, then fill (compressed bucket storage)
  cell_start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (const Triangle& tri : mesh.triangles) {
    const auto r = cell_range(tri);
    for (int iy = r[1]; iy <= r[3]; ++iy)
      for (int ix = r[0]; ix <= r[2]; ++ix)
        ++cell_start_[static_cast<std::size_t>(iy) * nx_ + ix + 1];
  }
  for (std::size_t i = 1; i < cell_start_.size(); ++i)
    cell_start_[i] += cell_start_[i - 1];
  cell_items_.resize(cell_start_.back());
  std::vector<int> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto r = cell_range(mesh.triangles[t]);
    for (int iy = r[1]; iy <= r[3]; ++iy)
      for (int ix = r[0]; ix <= r[2]; ++ix)
        cell_items_[fill[static_cast<std::size_t>(iy) * nx_ + ix]++] = static_cast<int>(t);
  }
}

std::optional<Location> PointLocator::locate(Vec2 p) const
{
  if (cell_items_.empty())
    return std::nullopt;
  const double fx = (p.x - origin_.x) / cell_;
  const double fy = (p.y - origin_.y) / cell_;
  // points marginally outside the bounding box may still be within tolerance
  const double slack = 1e-9;
  if (fx < -slack || fy < -slack || fx > nx_ + slack || fy > ny_ + slack)
    return std::nullopt;
  const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, nx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny_ - 1);
  const std::size_t cell = static_cast<std::size_t>(iy) * nx_ + ix;
  for (int k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
    const std::size_t t = static_cast<std::size_t>(cell_items_[k]);
    auto bary = barycentric(*mesh_, t, p);
    if (std::min({bary[0], bary[1], bary[2]}) < -barycentric_tol)
      continue;
    double sum = 0.0;
    for (double& b : bary) {
      b = std::clamp(b, 0.0, 1.0);
      sum += b;
    }
    for (double& b : bary)
      b /= sum;
    return Location{t, bary};
  }
  return std::nullopt;
}

std::vector<int> PointLocator::triangles_near(Vec2 lo, Vec2 hi) const
{
  std::vector<int> out;
  if (cell_items_.empty())
    return out;
  const double x0 = (lo.x - origin_.x) / cell_, x1 = (hi.x - origin_.x) / cell_;
  const double y0 = (lo.y - origin_.y) / cell_, y1 = (hi.y - origin_.y) / cell_;
  if (x1 < -1e-9 || y1 < -1e-9 || x0 > nx_ + 1e-9 || y0 > ny_ + 1e-9)
    return out;
  const int ix0 = std::clamp(static_cast<int>(std::floor(x0)), 0, nx_ - 1);
  const int ix1 = std::clamp(static_cast<int>(std::floor(x1)), 0, nx_ - 1);
  const int iy0 = std::clamp(static_cast<int>(std::floor(y0)), 0, ny_ - 1);
  const int iy1 = std::clamp(static_cast<int>(std::floor(y1)), 0, ny_ - 1);
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) {
      const std::size_t cell = static_cast<std::size_t>(iy) * nx_ + ix;
      out.insert(out.end(), cell_items_.begin() + cell_start_[cell],
                 cell_items_.begin() + cell_start_[cell + 1]);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Location> locate_point(const Mesh& mesh, Vec2 p)
{
  return PointLocator(mesh).locate(p);
}

} // namespace pmcf
