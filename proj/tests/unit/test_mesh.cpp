#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <pmcf/errors.hpp>
#include <pmcf/mesh.hpp>

using namespace pmcf;

TEST_CASE("circle h = 0.4: size bracket and boundary on the circle")
{
  const DomainSpec d = DomainSpec::circle(1.0);
  const Mesh m = generate_mesh(d, 0.4);
  CHECK(m.h_target == 0.4);
  CHECK(m.h_actual >= 0.2);
  CHECK(m.h_actual <= 0.8);
  for (std::size_t v = 0; v < m.num_vertices(); ++v)
    if (m.boundary[v])
      CHECK(std::abs(norm(m.vertices[v]) - 1.0) <= 1e-12);
  const MeshCheck c = check_mesh(m, &d);
  CHECK_MESSAGE(c.ok(), (c.problems.empty() ? "" : c.problems.front()));
}

TEST_CASE("ellipse a=2, b=1, h = 0.15 golden fixture")
{
  const DomainSpec d = DomainSpec::ellipse(2.0, 1.0);
  const Mesh m = generate_mesh(d, 0.15);
  CHECK(m.num_vertices() == 340);
  CHECK(m.num_triangles() == 613);
  CHECK(check_mesh(m, &d).ok());
  std::size_t nb = 0;
  for (bool b : m.boundary)
    nb += b;
  CHECK(nb == static_cast<std::size_t>(std::lround(d.boundary_length() / 0.15)));
}

TEST_CASE("circle h = 0.1: area defect of the inscribed polygon")
{
  const Mesh m = generate_mesh(DomainSpec::circle(1.0), 0.1);
  const double area = m.total_area();
  CHECK(area < std::numbers::pi);
  CHECK(std::numbers::pi - area <= 2.0 * 0.1 * 0.1);
}

TEST_CASE("all invariants hold over domains and sizes")
{
  StarShaped star;
  for (int i = 0; i < 72; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 72;
    star.radius_samples.emplace_back(t, 1.0 + 0.05 * std::cos(2.0 * t) + 0.02 * std::sin(3.0 * t));
  }
  const DomainSpec domains[] = {DomainSpec::circle(1.0), DomainSpec::ellipse(2.0, 1.0),
                                DomainSpec::ellipse(0.7, 1.9), DomainSpec(star)};
  for (const auto& d : domains)
    for (double h : {0.3, 0.1, 0.05}) {
      const Mesh m = generate_mesh(d, h);
      const MeshCheck c = check_mesh(m, &d);
      INFO(d.describe(), " h=", h);
      CHECK_MESSAGE(c.ok(), (c.problems.empty() ? "" : c.problems.front()));
      CHECK(c.min_signed_area > 0.0);
      CHECK(c.edge_ratio <= 8.0);
      CHECK(m.h_actual >= 0.5 * h);
      CHECK(m.h_actual <= 2.0 * h);
      for (std::size_t v = 0; v < m.num_vertices(); ++v)
        CHECK(d.contains(m.vertices[v], 1e-12));
      for (const EdgeInfo& e : collect_edges(m)) {
        CHECK((e.triangle_count == 1 || e.triangle_count == 2));
        if (e.triangle_count == 1) {
          CHECK(m.boundary[e.vertices[0]]);
          CHECK(m.boundary[e.vertices[1]]);
        }
      }
    }
}

TEST_CASE("refinement at most quadruples the triangle count within 30 percent")
{
  const DomainSpec d = DomainSpec::ellipse(2.0, 1.0);
  for (double h : {0.2, 0.1, 0.05}) {
    const double ratio = static_cast<double>(generate_mesh(d, h / 2).num_triangles()) /
                         static_cast<double>(generate_mesh(d, h).num_triangles());
    CHECK(ratio >= 4.0 * 0.7);
    CHECK(ratio <= 4.0 * 1.3);
  }
}

TEST_CASE("generation is deterministic")
{
  const DomainSpec d = DomainSpec::ellipse(2.0, 1.0);
  const Mesh a = generate_mesh(d, 0.1), b = generate_mesh(d, 0.1);
  REQUIRE(a.num_vertices() == b.num_vertices());
  for (std::size_t v = 0; v < a.num_vertices(); ++v) {
    CHECK(a.vertices[v].x == b.vertices[v].x);
    CHECK(a.vertices[v].y == b.vertices[v].y);
  }
  CHECK(a.triangles == b.triangles);
}

TEST_CASE("mesh size preconditions")
{
  const DomainSpec d = DomainSpec::circle(1.0);
  CHECK_THROWS_AS(generate_mesh(d, 0.5), MeshSizeTooLarge);
  CHECK_THROWS_AS(generate_mesh(d, 2.0), MeshSizeTooLarge);
  CHECK_THROWS_AS(generate_mesh(d, 0.0), InvalidArgument);
  CHECK_THROWS_AS(generate_mesh(d, -0.1), InvalidArgument);
  CHECK_NOTHROW(generate_mesh(d, 0.49));
}

TEST_CASE("check_mesh reports violations")
{
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  m.triangles = {{0, 1, 2}, {1, 3, 2}};
  m.boundary = {true, true, true, true};
  update_mesh_size(m);
  CHECK(check_mesh(m).ok());
  CHECK(m.h_actual == doctest::Approx(std::sqrt(2.0)));

  Mesh flipped = m;
  flipped.triangles[1] = {1, 2, 3};
  CHECK_FALSE(check_mesh(flipped).ok());

  Mesh unflagged = m;
  unflagged.boundary[3] = false;
  CHECK_FALSE(check_mesh(unflagged).ok());

  Mesh stretched = m;
  stretched.vertices[3] = {40.0, 40.0};
  CHECK_FALSE(check_mesh(stretched).ok());
}

TEST_CASE("boundary loop and adjacency")
{
  const Mesh m = generate_mesh(DomainSpec::circle(1.0), 0.2);
  const auto loop = boundary_loop(m);
  std::size_t nb = 0;
  for (bool b : m.boundary)
    nb += b;
  CHECK(loop.size() == nb);
  double twice_area = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    twice_area += cross(m.vertices[loop[i]], m.vertices[loop[(i + 1) % loop.size()]]);
  CHECK(0.5 * twice_area == doctest::Approx(m.total_area()).epsilon(1e-12));

  const auto adj = vertex_neighbours(m);
  std::size_t degree_sum = 0;
  for (const auto& a : adj)
    degree_sum += a.size();
  CHECK(degree_sum == 2 * collect_edges(m).size());
}

TEST_CASE("delaunay of a square with its center")
{
  const std::vector<Vec2> pts = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {0.1, 0.05}};
  const auto tris = delaunay_convex(pts, 4);
  REQUIRE(tris.size() == 4);
  double area = 0.0;
  for (const auto& t : tris) {
    const double a = 0.5 * orient(pts[t[0]], pts[t[1]], pts[t[2]]);
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(area == doctest::Approx(4.0));
}

TEST_CASE("delaunay property on a random point set")
{
  std::vector<Vec2> pts;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    pts.push_back({std::cos(t), std::sin(t)});
  }
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 200; ++i)
    pts.push_back({u(gen), u(gen)});
  const auto tris = delaunay_convex(pts, n);
  // empty circumcircles, up to rounding
  for (const auto& t : tris) {
    const Vec2 a = pts[t[0]], b = pts[t[1]], c = pts[t[2]];
    const double d = 2.0 * orient(a, b, c);
    const Vec2 center{(dot(a, a) * (b.y - c.y) + dot(b, b) * (c.y - a.y) + dot(c, c) * (a.y - b.y)) / d,
                      (dot(a, a) * (c.x - b.x) + dot(b, b) * (a.x - c.x) + dot(c, c) * (b.x - a.x)) / d};
    const double r = norm(a - center);
    for (std::size_t p = 0; p < pts.size(); ++p)
      CHECK(norm(pts[p] - center) >= r * (1.0 - 1e-9));
  }
}

TEST_CASE("point location")
{
  const Mesh m = generate_mesh(DomainSpec::circle(1.0), 0.1);
  const PointLocator locator(m);

  const auto c = locator.locate(m.centroid(0));
  REQUIRE(c.has_value());
  CHECK(c->triangle == 0);
  for (double b : c->barycentric)
    CHECK(std::abs(b - 1.0 / 3.0) <= 1e-14);

  CHECK_FALSE(locator.locate({10.0, 10.0}).has_value());
  CHECK_FALSE(locate_point(m, {10.0, 10.0}).has_value());

  // a vertex: located in some incident triangle with one coordinate equal to 1
  const int v = m.triangles[17][1];
  const auto at_vertex = locator.locate(m.vertices[v]);
  REQUIRE(at_vertex.has_value());
  const Triangle& t = m.triangles[at_vertex->triangle];
  int slot = -1;
  for (int i = 0; i < 3; ++i)
    if (t[i] == v)
      slot = i;
  REQUIRE(slot >= 0);
  CHECK(at_vertex->barycentric[slot] == doctest::Approx(1.0).epsilon(1e-12));

  // partition: weights sum to 1 and reconstruct the query point
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int found = 0;
  while (found < 1000) {
    const Vec2 p{u(gen), u(gen)};
    const auto loc = locator.locate(p);
    if (!loc)
      continue;
    ++found;
    const Triangle& tri = m.triangles[loc->triangle];
    const auto& b = loc->barycentric;
    CHECK(std::abs(b[0] + b[1] + b[2] - 1.0) <= 1e-12);
    const Vec2 q = b[0] * m.vertices[tri[0]] + b[1] * m.vertices[tri[1]] + b[2] * m.vertices[tri[2]];
    CHECK(norm(q - p) <= 1e-10);
  }
}

TEST_CASE("points outside the polygon but inside the disk are outside the mesh")
{
  const Mesh m = generate_mesh(DomainSpec::circle(1.0), 0.2);
  // midpoint of a boundary arc lies outside the chord
  const auto loop = boundary_loop(m);
  const Vec2 a = m.vertices[loop[0]], b = m.vertices[loop[1]];
  const Vec2 arc_mid = (1.0 / norm(a + b)) * (a + b);
  CHECK_FALSE(locate_point(m, arc_mid).has_value());
  CHECK(locate_point(m, 0.5 * (a + b)).has_value());
}
