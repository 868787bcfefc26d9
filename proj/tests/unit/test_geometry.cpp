#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <pmcf/errors.hpp>
#include <pmcf/geometry.hpp>
#include <pmcf/newton.hpp>
#include <pmcf/oracle.hpp>

using namespace pmcf;

namespace {

const Mesh& mesh_of(const std::string& domain, double h)
{
  static std::map<std::pair<std::string, double>, Mesh> cache;
  const auto key = std::make_pair(domain, h);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, generate_mesh(parse_domain(domain), h)).first;
  return it->second;
}

FeFunction exact_interpolant(const Mesh& m, double k)
{
  return interpolate_nodal(m, [k](Vec2 p) {
    return exact_circle_solution(1.0, k, std::min(norm(p), 1.0));
  });
}

Polyline regular_polygon(int n)
{
  Polyline p;
  for (int i = 0; i <= n; ++i) {
    const double t = 2.0 * std::numbers::pi * (i % n) / n;
    p.push_back({std::cos(t), std::sin(t)});
  }
  return p;
}

} // namespace

TEST_CASE("circle level set of the exact solution")
{
  const double h = 0.05;
  const Mesh& m = mesh_of("circle:1", h);
  const LevelCurve c = extract_level_set(exact_interpolant(m, 1.0), 0.25);
  REQUIRE(c.components.size() == 1);
  const Polyline& line = c.components[0];
  CHECK(is_closed(line));
  CHECK(is_simple(line));
  CHECK(signed_area(line) > 0.0);
  double worst = 0.0;
  for (Vec2 p : line)
    worst = std::max(worst, std::abs(norm(p) - std::sqrt(0.5)));
  CHECK(worst <= 2.0 * h * h + 1e-12);

  const CurveMeasures cm = curve_measures(c);
  const double deficit = cm.length * cm.length - 4.0 * std::numbers::pi * cm.area;
  CHECK(deficit >= 0.0);
  CHECK(deficit <= 1e-2);
}

TEST_CASE("levels above the maximum give an empty curve")
{
  const Mesh& m = mesh_of("circle:1", 0.1);
  CHECK(extract_level_set(exact_interpolant(m, 1.0), 0.6).empty());
}

TEST_CASE("level zero traces the mesh boundary")
{
  const Mesh& m = mesh_of("ellipse:2,1", 0.1);
  const FeFunction f = interpolate_nodal(m, [](Vec2 p) { return 1.0 - p.x * p.x / 4.0 - p.y * p.y; }, true);
  const LevelCurve c = extract_level_set(f, 0.0);
  REQUIRE(c.components.size() == 1);
  const auto loop = boundary_loop(m);
  CHECK(c.components[0].size() == loop.size() + 1);
  const CurveMeasures cm = curve_measures(c);
  CHECK(cm.area == doctest::Approx(m.total_area()).epsilon(1e-12));
  double perimeter = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i)
    perimeter += norm(m.vertices[loop[(i + 1) % loop.size()]] - m.vertices[loop[i]]);
  CHECK(cm.length == doctest::Approx(perimeter).epsilon(1e-12));
}

TEST_CASE("measures of simple polygons")
{
  LevelCurve square;
  square.components = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}};
  const CurveMeasures sq = curve_measures(square);
  CHECK(sq.length == 4.0);
  CHECK(sq.area == 1.0);

  LevelCurve gon;
  gon.components = {regular_polygon(1000)};
  const CurveMeasures g = curve_measures(gon);
  const double n = 1000.0;
  CHECK(std::abs(g.length - 2.0 * n * std::sin(std::numbers::pi / n)) <= 1e-12);
  CHECK(std::abs(g.area - 0.5 * n * std::sin(2.0 * std::numbers::pi / n)) <= 1e-12);
  CHECK(std::abs(g.length - 2.0 * std::numbers::pi) <= 1e-4);
  CHECK(std::abs(g.area - std::numbers::pi) <= 1e-4);

  // reversal does not change the measures
  LevelCurve reversed = gon;
  std::reverse(reversed.components[0].begin(), reversed.components[0].end());
  CHECK(signed_area(reversed.components[0]) < 0.0);
  const CurveMeasures r = curve_measures(reversed);
  CHECK(r.length == doctest::Approx(g.length).epsilon(1e-12));
  CHECK(r.area == doctest::Approx(g.area).epsilon(1e-12));

  LevelCurve open;
  open.components = {{{0, 0}, {1, 0}, {1, 1}}};
  CHECK_THROWS_AS(curve_measures(open), OpenCurve);

  CHECK_FALSE(is_simple({{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0, 0}}));
}

TEST_CASE("a ring-shaped superlevel set has two components")
{
  const Mesh& m = mesh_of("circle:1", 0.02);
  const FeFunction f = interpolate_nodal(m, [](Vec2 p) {
    const double s = (norm(p) - 0.5) / 0.2;
    return std::exp(-s * s);
  });
  const LevelCurve c = extract_level_set(f, 0.5);
  REQUIRE(c.components.size() == 2);
  for (const auto& line : c.components) {
    CHECK(is_closed(line));
    CHECK(is_simple(line));
  }
  const double w = 0.2 * std::sqrt(std::log(2.0));
  const double expected = std::numbers::pi * ((0.5 + w) * (0.5 + w) - (0.5 - w) * (0.5 - w));
  CHECK(curve_measures(c).area == doctest::Approx(expected).epsilon(1e-2));
  CHECK(curve_measures(c).length ==
        doctest::Approx(2.0 * std::numbers::pi * ((0.5 + w) + (0.5 - w))).epsilon(1e-2));
}

TEST_CASE("deficit series on the exact circle solution")
{
  const Mesh& m = mesh_of("circle:1", 0.05);
  for (double k : {1.0, 1.5, 2.0}) {
    INFO("k=", k);
    const FeFunction f = exact_interpolant(m, k);
    const auto levels = equispaced_levels(f, 20);
    const DeficitSeries s = deficit_series(f, levels);
    CHECK(s.rows.size() == 20);
    CHECK(s.omitted == 0);
    for (const auto& row : s.rows) {
      CHECK(row.deficit <= 1e-2);
      CHECK(row.deficit >= -1e-6 * row.length * row.length);
    }
  }
}

TEST_CASE("deficit series edge cases")
{
  const Mesh& m = mesh_of("circle:1", 0.1);
  const FeFunction f = exact_interpolant(m, 1.0);
  const DeficitSeries one = deficit_series(f, {0.2});
  CHECK(one.rows.size() == 1);
  const DeficitSeries beyond = deficit_series(f, {0.2, 0.7});
  CHECK(beyond.rows.size() == 1);
  CHECK(beyond.omitted == 1);
  CHECK_THROWS_AS(deficit_series(f, {0.3, 0.2}), InvalidArgument);
  CHECK_THROWS_AS(deficit_series(f, {0.2, 0.2}), InvalidArgument);

  const auto levels = equispaced_levels(f, 4, 0.8);
  REQUIRE(levels.size() == 4);
  const double top = *std::max_element(f.values().begin(), f.values().end());
  CHECK(levels.back() == doctest::Approx(0.8 * top));
  CHECK(levels.front() == doctest::Approx(0.2 * top));
  CHECK_THROWS_AS(equispaced_levels(f, 0), InvalidArgument);
  CHECK_THROWS_AS(equispaced_levels(FeFunction(m), 3), InvalidArgument);
}

TEST_CASE("ellipse solution: monotone deficit with one component per level")
{
  const Mesh& m = mesh_of("ellipse:2,1", 0.05);
  const auto [u, report] = continuation_solve(m, 1.0, ContinuationSchedule::towards(0.05));
  const auto levels = equispaced_levels(u, 20);
  for (double t : levels) {
    const LevelCurve c = extract_level_set(u, t);
    CHECK(c.components.size() == 1);
  }
  const DeficitSeries s = deficit_series(u, levels);
  REQUIRE(s.rows.size() == 20);
  const double slack = 0.01 * s.rows.front().deficit;
  for (std::size_t i = 1; i < s.rows.size(); ++i)
    CHECK(s.rows[i].deficit <= s.rows[i - 1].deficit + slack);
  for (const auto& row : s.rows)
    CHECK(row.deficit >= -1e-6 * row.length * row.length);
}

TEST_CASE("writers")
{
  const Mesh& m = mesh_of("circle:1", 0.2);
  const FeFunction f = exact_interpolant(m, 1.0);
  std::vector<LevelCurve> curves{extract_level_set(f, 0.1), extract_level_set(f, 0.3)};

  std::ostringstream csv;
  write_curves_csv(curves, csv);
  CHECK(csv.str().rfind("level,component,index,x,y\n", 0) == 0);

  std::ostringstream svg;
  write_curves_svg(curves, svg, &m);
  CHECK(svg.str().find("<svg") != std::string::npos);
  CHECK(svg.str().find("</svg>") != std::string::npos);
  std::size_t paths = 0;
  for (std::size_t pos = svg.str().find("<path"); pos != std::string::npos;
       pos = svg.str().find("<path", pos + 1))
    ++paths;
  CHECK(paths == 3);

  std::ostringstream deficit;
  write_deficit_csv(deficit_series(f, {0.1, 0.3}), deficit);
  CHECK(deficit.str().rfind("t,l,a,deficit\n", 0) == 0);
}
