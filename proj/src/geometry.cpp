#include <pmcf/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>

#include <pmcf/errors.hpp>

namespace pmcf {

namespace {

// Undirected graph of curve pieces; every node ends up with degree 2.
class SegmentGraph
{
public:
  int crossing_node(Edge e, Vec2 p)
  {
    const auto [it, inserted] = crossing_.emplace(e, static_cast<int>(points_.size()));
    if (inserted)
      add_point(p);
    return it->second;
  }

  int vertex_node(int v, Vec2 p)
  {
    const auto [it, inserted] = vertex_.emplace(v, static_cast<int>(points_.size()));
    if (inserted)
      add_point(p);
    return it->second;
  }

  void connect(int a, int b)
  {
    links_[a].push_back(b);
    links_[b].push_back(a);
  }

  std::vector<Polyline> cycles() const
  {
    std::vector<Polyline> out;
    std::vector<bool> used(points_.size(), false);
    for (std::size_t start = 0; start < points_.size(); ++start) {
      if (used[start] || links_[start].empty())
        continue;
      Polyline line;
      int prev = -1;
      int cur = static_cast<int>(start);
      while (true) {
        used[cur] = true;
        line.push_back(points_[cur]);
        int next = -1;
        for (int cand : links_[cur])
          if (cand != prev && !used[cand]) {
            next = cand;
            break;
          }
        if (next < 0)
          break;
        prev = cur;
        cur = next;
      }
      if (line.size() < 3)
        continue;
      line.push_back(line.front());
      if (signed_area(line) < 0.0)
        std::reverse(line.begin(), line.end());
      out.push_back(std::move(line));
    }
    return out;
  }

private:
  void add_point(Vec2 p)
  {
    points_.push_back(p);
    links_.emplace_back();
  }

  std::map<Edge, int> crossing_;
  std::map<int, int> vertex_;
  std::vector<Vec2> points_;
  std::vector<std::vector<int>> links_;
};

bool point_in_polygon(Vec2 p, const Polyline& closed)
{
  bool inside = false;
  for (std::size_t i = 0, j = closed.size() - 2; i + 1 < closed.size(); j = i++) {
    const Vec2 a = closed[i], b = closed[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

} // namespace

LevelCurve extract_level_set(const FeFunction& f, double t)
{
  const Mesh& mesh = f.mesh();
  LevelCurve curve;
  curve.level = t;

  double scale = 0.0;
  for (double v : f.values())
    scale = std::max(scale, std::abs(v));
  const double perturbation = 1e-14 * std::max(scale, std::abs(t));
  auto value = [&](int v) { return f[v] == t ? t + perturbation : f[v]; };
  auto above = [&](int v) { return value(v) > t; };
  auto crossing = [&](SegmentGraph& g, int a, int b) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    const double lambda = (t - value(lo)) / (value(hi) - value(lo));
    return g.crossing_node({lo, hi},
                           mesh.vertices[lo] + lambda * (mesh.vertices[hi] - mesh.vertices[lo]));
  };

  SegmentGraph graph;
  for (const Triangle& tri : mesh.triangles) {
    int mixed[2];
    int count = 0;
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      if (above(a) != above(b) && count < 2)
        mixed[count++] = e;
    }
    if (count != 2)
      continue;
    const int n0 = crossing(graph, tri[mixed[0]], tri[(mixed[0] + 1) % 3]);
    const int n1 = crossing(graph, tri[mixed[1]], tri[(mixed[1] + 1) % 3]);
    graph.connect(n0, n1);
  }
  for (const EdgeInfo& e : collect_edges(mesh)) {
    if (e.triangle_count != 1)
      continue;
    const int a = e.vertices[0], b = e.vertices[1];
    const bool ua = above(a), ub = above(b);
    if (ua && ub)
      graph.connect(graph.vertex_node(a, mesh.vertices[a]), graph.vertex_node(b, mesh.vertices[b]));
    else if (ua)
      graph.connect(graph.vertex_node(a, mesh.vertices[a]), crossing(graph, a, b));
    else if (ub)
      graph.connect(graph.vertex_node(b, mesh.vertices[b]), crossing(graph, a, b));
  }
  curve.components = graph.cycles();
  return curve;
}

double signed_area(const Polyline& closed)
{
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i)
    twice += cross(closed[i], closed[i + 1]);
  return 0.5 * twice;
}

double polyline_length(const Polyline& closed)
{
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < closed.size(); ++i)
    len += norm(closed[i + 1] - closed[i]);
  return len;
}

bool is_closed(const Polyline& line, double tol)
{
  return line.size() >= 4 && norm(line.front() - line.back()) <= tol;
}

bool is_simple(const Polyline& closed)
{
  const std::size_t m = closed.size() - 1; // segment count
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1)
        continue; // adjacent through the closing point
      if (segments_intersect(closed[i], closed[i + 1], closed[j], closed[j + 1]))
        return false;
    }
  return true;
}

CurveMeasures curve_measures(const LevelCurve& curve)
{
  CurveMeasures m;
  for (std::size_t i = 0; i < curve.components.size(); ++i) {
    const Polyline& c = curve.components[i];
    if (!is_closed(c))
      throw OpenCurve("level curve component " + std::to_string(i) + " is not closed");
    m.length += polyline_length(c);
    int depth = 0;
    for (std::size_t j = 0; j < curve.components.size(); ++j)
      if (j != i && point_in_polygon(c.front(), curve.components[j]))
        ++depth;
    const double a = std::abs(signed_area(c));
    m.area += (depth % 2 == 0) ? a : -a;
  }
  return m;
}

DeficitSeries deficit_series(const FeFunction& f, const std::vector<double>& levels)
{
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (!(levels[i] > levels[i - 1]))
      throw InvalidArgument("deficit levels must be strictly increasing");
  DeficitSeries series;
  for (double t : levels) {
    const LevelCurve curve = extract_level_set(f, t);
    if (curve.empty()) {
      ++series.omitted;
      continue;
    }
    const CurveMeasures m = curve_measures(curve);
    series.rows.push_back(
      {t, m.length, m.area, m.length * m.length - 4.0 * std::numbers::pi * m.area});
  }
  return series;
}

std::vector<double> equispaced_levels(const FeFunction& f, int n, double fraction)
{
  if (n < 1)
    throw InvalidArgument("need at least one level");
  const double top = *std::max_element(f.values().begin(), f.values().end());
  if (!(top > 0.0))
    throw InvalidArgument("function has no positive values");
  std::vector<double> levels;
  for (int i = 1; i <= n; ++i)
    levels.push_back(fraction * top * i / n);
  return levels;
}

void write_deficit_csv(const DeficitSeries& series, std::ostream& out)
{
  out << std::setprecision(17) << "t,l,a,deficit\n";
  for (const auto& r : series.rows)
    out << r.level << "," << r.length << "," << r.area << "," << r.deficit << "\n";
}

void write_curves_csv(const std::vector<LevelCurve>& curves, std::ostream& out)
{
  out << std::setprecision(17) << "level,component,index,x,y\n";
  for (const auto& c : curves)
    for (std::size_t k = 0; k < c.components.size(); ++k)
      for (std::size_t i = 0; i < c.components[k].size(); ++i)
        out << c.level << "," << k << "," << i << "," << c.components[k][i].x << ","
            << c.components[k][i].y << "\n";
}

void write_curves_svg(const std::vector<LevelCurve>& curves, std::ostream& out,
                      const Mesh* outline)
{
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  auto extend = [&](Vec2 p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  };
  std::vector<Polyline> outline_paths;
  if (outline) {
    Polyline loop;
    for (int v : boundary_loop(*outline))
      loop.push_back(outline->vertices[v]);
    loop.push_back(loop.front());
    outline_paths.push_back(std::move(loop));
  }
  for (const auto& p : outline_paths)
    for (Vec2 q : p)
      extend(q);
  for (const auto& c : curves)
    for (const auto& comp : c.components)
      for (Vec2 q : comp)
        extend(q);
  if (lo.x > hi.x) {
    lo = {-1, -1};
    hi = {1, 1};
  }
  const double size = 600.0;
  const double span = std::max(hi.x - lo.x, hi.y - lo.y);
  const double margin = 0.05 * span;
  const double scale = size / (span + 2 * margin);
  auto map = [&](Vec2 p) {
    return Vec2{(p.x - lo.x + margin) * scale, (hi.y - p.y + margin) * scale};
  };
  auto path = [&](const Polyline& line) {
    std::string d;
    char buf[64];
    for (std::size_t i = 0; i < line.size(); ++i) {
      const Vec2 q = map(line[i]);
      std::snprintf(buf, sizeof buf, "%s%.3f %.3f ", i == 0 ? "M" : "L", q.x, q.y);
      d += buf;
    }
    return d + "Z";
  };

  const double w = (hi.x - lo.x + 2 * margin) * scale;
  const double h = (hi.y - lo.y + 2 * margin) * scale;
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  for (const auto& p : outline_paths)
    out << "  <path d=\"" << path(p) << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  for (const auto& c : curves)
    for (std::size_t k = 0; k < c.components.size(); ++k)
      out << "  <path d=\"" << path(c.components[k])
          << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1\"><title>t=" << c.level
          << " component " << k << "</title></path>\n";
  out << "</svg>\n";
}

} // namespace pmcf
