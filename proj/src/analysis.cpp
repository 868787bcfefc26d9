#include <pmcf/analysis.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>

#include <pmcf/errors.hpp>

namespace pmcf {

namespace {

struct CandidateSample
{
  double value = 0.0;
  Vec2 gradient;
};

// Candidate value and piecewise-constant gradient at p; zero outside its mesh.
CandidateSample sample(const FeFunction& f, const PointLocator& locator, Vec2 p)
{
  const auto loc = locator.locate(p);
  if (!loc)
    return {};
  const Triangle& tri = f.mesh().triangles[loc->triangle];
  CandidateSample s;
  s.value = loc->barycentric[0] * f[tri[0]] + loc->barycentric[1] * f[tri[1]] +
            loc->barycentric[2] * f[tri[2]];
  s.gradient = element_gradient(f.mesh(), f, loc->triangle);
  return s;
}

// Accumulates the three norms over the triangles of `mesh` with the
// edge-midpoint rule, the error value and gradient supplied pointwise.
template <class ErrorAt>
ErrorTriple integrate(const Mesh& mesh, ErrorAt&& error_at)
{
  double l2 = 0.0;
  double semi = 0.0;
  ErrorTriple out;
  auto update_max = [&](double e, Vec2 p) {
    if (std::abs(e) > out.linf) {
      out.linf = std::abs(e);
      out.linf_location = p;
    }
  };
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    update_max(error_at(mesh.vertices[v], std::size_t(-1)).first, mesh.vertices[v]);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const double w = mesh.area(t) / 3.0;
    for (int e = 0; e < 3; ++e) {
      const Vec2 q = 0.5 * (mesh.vertices[tri[e]] + mesh.vertices[tri[(e + 1) % 3]]);
      const auto [value, grad] = error_at(q, t);
      l2 += w * value * value;
      semi += w * dot(grad, grad);
      update_max(value, q);
    }
    const Vec2 c = mesh.centroid(t);
    update_max(error_at(c, t).first, c);
  }
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(semi + l2);
  return out;
}

double linear_value(const Mesh& mesh, const FeFunction& f, std::size_t t, Vec2 p)
{
  const auto bary = barycentric(mesh, t, p);
  const Triangle& tri = mesh.triangles[t];
  return bary[0] * f[tri[0]] + bary[1] * f[tri[1]] + bary[2] * f[tri[2]];
}

// Convex polygon clipped to the left of every edge of the CCW triangle abc.
std::vector<Vec2> clip_to_triangle(std::vector<Vec2> poly, Vec2 a, Vec2 b, Vec2 c)
{
  const Vec2 corners[3] = {a, b, c};
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Vec2 p = corners[e], q = corners[(e + 1) % 3];
    std::vector<Vec2> kept;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 s = poly[i], t = poly[(i + 1) % poly.size()];
      const double ds = orient(p, q, s), dt = orient(p, q, t);
      if (ds >= 0.0)
        kept.push_back(s);
      if ((ds > 0.0 && dt < 0.0) || (ds < 0.0 && dt > 0.0))
        kept.push_back(s + (ds / (ds - dt)) * (t - s));
    }
    poly = std::move(kept);
  }
  return poly;
}

} // namespace

ErrorTriple error_norms(const FeFunction& reference, const FeFunction& candidate)
{
  const Mesh& fine = reference.mesh();
  const Mesh& coarse = candidate.mesh();
  const PointLocator locator(coarse);
  const PointLocator fine_locator(fine);
  const bool same_mesh = &fine == &coarse;

  std::vector<Vec2> fine_gradients(fine.num_triangles());
  for (std::size_t t = 0; t < fine.num_triangles(); ++t)
    fine_gradients[t] = element_gradient(fine, reference, t);

  // pointwise samples, used for the maximum norm
  auto error_at = [&](Vec2 p, std::size_t t) -> std::pair<double, Vec2> {
    if (t == std::size_t(-1))
      return {reference.evaluate(fine_locator, p) - candidate.evaluate(locator, p), {}};
    const double ref_value = linear_value(fine, reference, t, p);
    if (same_mesh)
      return {ref_value - linear_value(fine, candidate, t, p),
              fine_gradients[t] - element_gradient(fine, candidate, t)};
    const CandidateSample cand = sample(candidate, locator, p);
    return {ref_value - cand.value, fine_gradients[t] - cand.gradient};
  };
  ErrorTriple out = integrate(fine, error_at);
  if (same_mesh)
    return out;

  // Integrals are taken exactly on the intersections of each fine triangle
  // with the candidate triangles (both functions are linear there, so the
  // midpoint rule is exact); the uncovered remainder sees a zero candidate.
  double l2 = 0.0;
  double semi = 0.0;
  for (std::size_t t = 0; t < fine.num_triangles(); ++t) {
    const Triangle& tri = fine.triangles[t];
    const Vec2 a = fine.vertices[tri[0]], b = fine.vertices[tri[1]], c = fine.vertices[tri[2]];
    const Vec2 gref = fine_gradients[t];
    auto ref_sq = [&](Vec2 p, Vec2 q, Vec2 r) {
      double sum = 0.0;
      for (const Vec2 m : {0.5 * (p + q), 0.5 * (q + r), 0.5 * (r + p)}) {
        const double v = linear_value(fine, reference, t, m);
        sum += v * v;
      }
      return 0.5 * std::abs(orient(p, q, r)) * sum / 3.0;
    };
    const double area = fine.area(t);
    const double full_sq = ref_sq(a, b, c);
    double covered_area = 0.0, covered_sq = 0.0;
    const Vec2 lo{std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y})};
    const Vec2 hi{std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y})};
    for (int ct : locator.triangles_near(lo, hi)) {
      const Triangle& ctri = coarse.triangles[ct];
      const auto piece = clip_to_triangle({a, b, c}, coarse.vertices[ctri[0]],
                                          coarse.vertices[ctri[1]], coarse.vertices[ctri[2]]);
      if (piece.size() < 3)
        continue;
      const Vec2 gdiff = gref - element_gradient(coarse, candidate, ct);
      for (std::size_t i = 1; i + 1 < piece.size(); ++i) {
        const Vec2 p = piece[0], q = piece[i], r = piece[i + 1];
        const double w = 0.5 * std::abs(orient(p, q, r));
        if (!(w > 0.0))
          continue;
        double sum = 0.0;
        for (const Vec2 m : {0.5 * (p + q), 0.5 * (q + r), 0.5 * (r + p)}) {
          const double e = linear_value(fine, reference, t, m) - linear_value(coarse, candidate, ct, m);
          sum += e * e;
        }
        l2 += w * sum / 3.0;
        semi += w * dot(gdiff, gdiff);
        covered_area += w;
        covered_sq += ref_sq(p, q, r);
      }
    }
    l2 += std::max(0.0, full_sq - covered_sq);
    semi += dot(gref, gref) * std::max(0.0, area - covered_area);
  }
  out.l2 = std::sqrt(l2);
  out.h1 = std::sqrt(semi + l2);
  return out;
}

ErrorTriple error_norms(const std::function<double(Vec2)>& exact,
                        const std::function<Vec2(Vec2)>& exact_gradient,
                        const FeFunction& candidate)
{
  const Mesh& mesh = candidate.mesh();
  std::vector<Vec2> gradients(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    gradients[t] = element_gradient(mesh, candidate, t);
  const PointLocator locator(mesh);

  auto error_at = [&](Vec2 p, std::size_t t) -> std::pair<double, Vec2> {
    if (t == std::size_t(-1))
      return {exact(p) - candidate.evaluate(locator, p), {}};
    const auto bary = barycentric(mesh, t, p);
    const Triangle& tri = mesh.triangles[t];
    const double value =
      bary[0] * candidate[tri[0]] + bary[1] * candidate[tri[1]] + bary[2] * candidate[tri[2]];
    return {exact(p) - value, exact_gradient(p) - gradients[t]};
  };
  return integrate(mesh, error_at);
}

double fit_slope(const std::vector<double>& params, const std::vector<double>& errors)
{
  if (params.size() != errors.size())
    throw DimensionMismatch("fit_slope: params and errors differ in length");
  if (params.size() < 3)
    throw DegenerateFit("rate fit needs at least 3 rows");
  const std::size_t n = params.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(params[i] > 0.0) || !(errors[i] > 0.0))
      throw DegenerateFit("rate fit needs positive parameters and errors");
    x[i] = std::log(params[i]);
    y[i] = std::log(errors[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw DegenerateFit("rate fit needs distinct parameters");
  return sxy / sxx;
}

RateFit fit_rate(const ConvergenceTable& table)
{
  std::vector<double> p, l2, h1, linf;
  for (const auto& row : table.rows) {
    p.push_back(row.param);
    l2.push_back(row.error.l2);
    h1.push_back(row.error.h1);
    linf.push_back(row.error.linf);
  }
  return {fit_slope(p, l2), fit_slope(p, h1), fit_slope(p, linf)};
}

void write_table_csv(const ConvergenceTable& table, std::ostream& out)
{
  out << std::setprecision(17) << "param,l2,linf,h1\n";
  for (const auto& row : table.rows)
    out << row.param << "," << row.error.l2 << "," << row.error.linf << "," << row.error.h1 << "\n";
  if (table.slopes)
    out << "slope," << table.slopes->l2 << "," << table.slopes->linf << "," << table.slopes->h1 << "\n";
}

} // namespace pmcf
