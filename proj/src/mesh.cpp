#include <pmcf/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <pmcf/errors.hpp>

namespace pmcf {

double Mesh::area(std::size_t t) const
{
  const Triangle& tri = triangles[t];
  return 0.5 * orient(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 Mesh::centroid(std::size_t t) const
{
  const Triangle& tri = triangles[t];
  return (1.0 / 3.0) * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]);
}

double Mesh::total_area() const
{
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t)
    sum += area(t);
  return sum;
}

std::vector<EdgeInfo> collect_edges(const Mesh& mesh)
{
  std::vector<Edge> all;
  all.reserve(3 * mesh.triangles.size());
  for (const Triangle& tri : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i];
      const int b = tri[(i + 1) % 3];
      all.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(all.begin(), all.end());
  std::vector<EdgeInfo> edges;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i])
      ++j;
    edges.push_back({all[i], static_cast<int>(j - i)});
    i = j;
  }
  return edges;
}

std::pair<double, double> edge_length_range(const Mesh& mesh)
{
  double longest = 0.0;
  double shortest = std::numeric_limits<double>::infinity();
  for (const EdgeInfo& e : collect_edges(mesh)) {
    const double len = norm(mesh.vertices[e.vertices[1]] - mesh.vertices[e.vertices[0]]);
    longest = std::max(longest, len);
    shortest = std::min(shortest, len);
  }
  return {longest, shortest};
}

void update_mesh_size(Mesh& mesh)
{
  mesh.h_actual = edge_length_range(mesh).first;
}

std::vector<std::vector<int>> vertex_neighbours(const Mesh& mesh)
{
  std::vector<std::vector<int>> adj(mesh.num_vertices());
  for (const Triangle& tri : mesh.triangles)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j)
          adj[tri[i]].push_back(tri[j]);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::vector<int> boundary_loop(const Mesh& mesh)
{
  std::map<Edge, int> count;
  for (const EdgeInfo& e : collect_edges(mesh))
    count[e.vertices] = e.triangle_count;
  std::map<int, int> next;
  for (const Triangle& tri : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i];
      const int b = tri[(i + 1) % 3];
      if (count[{std::min(a, b), std::max(a, b)}] == 1) {
        if (next.count(a))
          throw InvalidArgument("boundary is not a simple closed polygon");
        next[a] = b;
      }
    }
  if (next.empty())
    throw InvalidArgument("mesh has no boundary");
  std::vector<int> loop;
  const int start = next.begin()->first;
  int v = start;
  do {
    loop.push_back(v);
    const auto it = next.find(v);
    if (it == next.end() || loop.size() > next.size())
      throw InvalidArgument("boundary is not a simple closed polygon");
    v = it->second;
  } while (v != start);
  if (loop.size() != next.size())
    throw InvalidArgument("boundary consists of more than one loop");
  return loop;
}

MeshCheck check_mesh(const Mesh& mesh, const DomainSpec* domain, double max_edge_ratio,
                     double boundary_tol)
{
  MeshCheck check;
  auto problem = [&](const std::string& msg) { check.problems.push_back(msg); };

  if (mesh.boundary.size() != mesh.num_vertices())
    problem("boundary flag count differs from vertex count");
  check.min_signed_area = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int v : mesh.triangles[t])
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.num_vertices()) {
        problem("triangle " + std::to_string(t) + " references a missing vertex");
        return check;
      }
    const double a = mesh.area(t);
    check.min_signed_area = std::min(check.min_signed_area, a);
    if (!(a > 0.0))
      problem("triangle " + std::to_string(t) + " has nonpositive signed area");
  }

  std::vector<bool> on_boundary_edge(mesh.num_vertices(), false);
  for (const EdgeInfo& e : collect_edges(mesh)) {
    if (e.triangle_count > 2) {
      std::ostringstream os;
      os << "edge (" << e.vertices[0] << "," << e.vertices[1] << ") shared by "
         << e.triangle_count << " triangles";
      problem(os.str());
    }
    if (e.triangle_count == 1) {
      for (int v : e.vertices) {
        on_boundary_edge[v] = true;
        if (!mesh.boundary[v])
          problem("vertex " + std::to_string(v) + " lies on a boundary edge but is not flagged");
      }
    }
  }
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (mesh.boundary[v] && !on_boundary_edge[v])
      problem("flagged boundary vertex " + std::to_string(v) + " is not on a boundary edge");

  const auto [longest, shortest] = edge_length_range(mesh);
  check.edge_ratio = longest / shortest;
  if (check.edge_ratio > max_edge_ratio)
    problem("edge length ratio " + std::to_string(check.edge_ratio) + " exceeds bound");

  if (domain) {
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      const double g = domain->gauge(mesh.vertices[v]);
      if (mesh.boundary[v] && std::abs(g - 1.0) > boundary_tol)
        problem("boundary vertex " + std::to_string(v) + " is off the boundary curve");
      if (g > 1.0 + boundary_tol)
        problem("vertex " + std::to_string(v) + " lies outside the domain");
    }
  }
  return check;
}

} // namespace pmcf
