#include <pmcf/domain.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <pmcf/errors.hpp>

namespace pmcf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int dense_samples = 4096;

// 5-point Gauss-Legendre on [-1, 1]
constexpr std::array<double, 5> gl_nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_weights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

double ellipse_gauge(double a, double b, Vec2 p)
{
  const double u = p.x / a;
  const double v = p.y / b;
  return std::sqrt(u * u + v * v);
}

// Solves the cyclic tridiagonal system
//   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]  (indices mod n)
// by the Sherman-Morrison correction of a plain Thomas sweep.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs)
{
  const std::size_t n = diag.size();
  auto thomas = [&](std::vector<double> b, const std::vector<double>& d) {
    std::vector<double> c(n), x(d);
    c[0] = upper[0] / b[0];
    x[0] = d[0] / b[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = b[i] - lower[i] * c[i - 1];
      c[i] = upper[i] / m;
      x[i] = (d[i] - lower[i] * x[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;)
      x[i] -= c[i] * x[i + 1];
    return x;
  };

  const double alpha = upper[n - 1]; // coefficient of x[0] in the last row
  const double beta = lower[0];      // coefficient of x[n-1] in the first row
  const double gamma = -diag[0];
  std::vector<double> bb(diag);
  bb[0] -= gamma;
  bb[n - 1] -= alpha * beta / gamma;

  std::vector<double> x = thomas(bb, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> z = thomas(bb, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i)
    x[i] -= fact * z[i];
  return x;
}

} // namespace

DomainSpec::DomainSpec(Variant shape)
  : shape_(std::move(shape))
{
  if (const auto* c = std::get_if<Circle>(&shape_)) {
    if (!(c->r0 > 0.0))
      throw InvalidArgument("circle radius must be positive");
  } else if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    if (!(e->a > 0.0) || !(e->b > 0.0))
      throw InvalidArgument("ellipse half axes must be positive");
  } else {
    auto samples = std::get<StarShaped>(shape_).radius_samples;
    if (samples.size() < 3)
      throw InvalidArgument("star-shaped domain needs at least 3 radius samples");
    for (auto& [theta, r] : samples) {
      if (!(r > 0.0))
        throw InvalidArgument("star-shaped domain radii must be positive");
      theta = std::fmod(theta, two_pi);
      if (theta < 0.0)
        theta += two_pi;
    }
    std::sort(samples.begin(), samples.end());
    for (std::size_t i = 1; i < samples.size(); ++i)
      if (samples[i].first - samples[i - 1].first <= 1e-12)
        throw InvalidArgument("star-shaped domain has duplicate sample angles");

    const std::size_t m = samples.size();
    for (const auto& [theta, r] : samples) {
      knots_.push_back(theta);
      knot_values_.push_back(r);
    }
    std::vector<double> lower(m), diag(m), upper(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t ip = (i + 1) % m;
      const std::size_t im = (i + m - 1) % m;
      const double h_right = (ip == 0 ? knots_[0] + two_pi : knots_[ip]) - knots_[i];
      const double h_left = knots_[i] - (i == 0 ? knots_[im] - two_pi : knots_[im]);
      lower[i] = h_left;
      diag[i] = 2.0 * (h_left + h_right);
      upper[i] = h_right;
      rhs[i] = 6.0 * ((knot_values_[ip] - knot_values_[i]) / h_right -
                      (knot_values_[i] - knot_values_[im]) / h_left);
    }
    second_derivatives_ = solve_cyclic_tridiagonal(lower, diag, upper, rhs);
    check_convexity();
  }

  // dense boundary table: points, parameters and cumulative arc length
  dense_.resize(dense_samples);
  dense_s_.resize(dense_samples + 1);
  cumulative_length_.resize(dense_samples + 1);
  cumulative_length_[0] = 0.0;
  for (int i = 0; i <= dense_samples; ++i)
    dense_s_[i] = two_pi * i / dense_samples;
  for (int i = 0; i < dense_samples; ++i) {
    dense_[i] = boundary_point(dense_s_[i]);
    cumulative_length_[i + 1] =
      cumulative_length_[i] + arclength_between(dense_s_[i], dense_s_[i + 1]);
  }
  length_ = cumulative_length_.back();

  bbox_min_ = bbox_max_ = dense_[0];
  for (const Vec2& p : dense_) {
    bbox_min_ = {std::min(bbox_min_.x, p.x), std::min(bbox_min_.y, p.y)};
    bbox_max_ = {std::max(bbox_max_.x, p.x), std::max(bbox_max_.y, p.y)};
  }

  if (const auto* c = std::get_if<Circle>(&shape_)) {
    diameter_ = 2.0 * c->r0;
  } else if (const auto* e = std::get_if<Ellipse>(&shape_)) {
    diameter_ = 2.0 * std::max(e->a, e->b);
  } else {
    constexpr int stride = 8;
    for (int i = 0; i < dense_samples; i += stride)
      for (int j = i + stride; j < dense_samples; j += stride)
        diameter_ = std::max(diameter_, norm(dense_[i] - dense_[j]));
  }
}

std::string DomainSpec::describe() const
{
  std::ostringstream os;
  os.precision(17);
  if (const auto* c = std::get_if<Circle>(&shape_))
    os << "circle:" << c->r0;
  else if (const auto* e = std::get_if<Ellipse>(&shape_))
    os << "ellipse:" << e->a << "," << e->b;
  else
    os << "star:" << knots_.size() << " samples";
  return os.str();
}

double DomainSpec::spline_radius(double theta, int derivative) const
{
  const std::size_t m = knots_.size();
  double t = std::fmod(theta - knots_[0], two_pi);
  if (t < 0.0)
    t += two_pi;
  t += knots_[0];
  // interval i spans [knots_[i], knots_[i+1]) with wrap-around for the last one
  std::size_t i = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) -
                                           knots_.begin());
  i = (i == 0) ? 0 : i - 1;
  const std::size_t ip = (i + 1) % m;
  const double left = knots_[i];
  const double right = (ip == 0) ? knots_[0] + two_pi : knots_[ip];
  const double h = right - left;
  const double A = right - t;
  const double B = t - left;
  const double Mi = second_derivatives_[i];
  const double Mp = second_derivatives_[ip];
  const double yi = knot_values_[i];
  const double yp = knot_values_[ip];
  switch (derivative) {
  case 0:
    return Mi * A * A * A / (6.0 * h) + Mp * B * B * B / (6.0 * h) + (yi / h - Mi * h / 6.0) * A +
           (yp / h - Mp * h / 6.0) * B;
  case 1:
    return -Mi * A * A / (2.0 * h) + Mp * B * B / (2.0 * h) - (yi / h - Mi * h / 6.0) +
           (yp / h - Mp * h / 6.0);
  default:
    return Mi * A / h + Mp * B / h;
  }
}

void DomainSpec::check_convexity() const
{
  double scale = 0.0;
  for (double r : knot_values_)
    scale = std::max(scale, r * r);
  for (double theta : knots_) {
    const double r = spline_radius(theta, 0);
    const double dr = spline_radius(theta, 1);
    const double ddr = spline_radius(theta, 2);
    // sign of the curvature of a polar curve
    if (r * r + 2.0 * dr * dr - r * ddr < -1e-9 * scale)
      throw NonConvexDomain("boundary curvature is negative near theta = " + std::to_string(theta));
  }
}

double DomainSpec::gauge(Vec2 p) const
{
  if (const auto* c = std::get_if<Circle>(&shape_))
    return ellipse_gauge(c->r0, c->r0, p);
  if (const auto* e = std::get_if<Ellipse>(&shape_))
    return ellipse_gauge(e->a, e->b, p);
  const double r = norm(p);
  if (r == 0.0)
    return 0.0;
  return r / spline_radius(std::atan2(p.y, p.x));
}

Vec2 DomainSpec::project_to_boundary(Vec2 p) const
{
  const double g = gauge(p);
  if (g == 0.0)
    throw InvalidArgument("cannot project the domain center onto the boundary");
  return {p.x / g, p.y / g};
}

Vec2 DomainSpec::boundary_point(double s) const
{
  if (const auto* c = std::get_if<Circle>(&shape_))
    return {c->r0 * std::cos(s), c->r0 * std::sin(s)};
  if (const auto* e = std::get_if<Ellipse>(&shape_))
    return {e->a * std::cos(s), e->b * std::sin(s)};
  const double r = spline_radius(s);
  return {r * std::cos(s), r * std::sin(s)};
}

Vec2 DomainSpec::boundary_tangent(double s) const
{
  if (const auto* c = std::get_if<Circle>(&shape_))
    return {-c->r0 * std::sin(s), c->r0 * std::cos(s)};
  if (const auto* e = std::get_if<Ellipse>(&shape_))
    return {-e->a * std::sin(s), e->b * std::cos(s)};
  const double r = spline_radius(s);
  const double dr = spline_radius(s, 1);
  return {dr * std::cos(s) - r * std::sin(s), dr * std::sin(s) + r * std::cos(s)};
}

double DomainSpec::arclength_between(double s0, double s1) const
{
  const double mid = 0.5 * (s0 + s1);
  const double half = 0.5 * (s1 - s0);
  double sum = 0.0;
  for (std::size_t q = 0; q < gl_nodes.size(); ++q)
    sum += gl_weights[q] * speed(mid + half * gl_nodes[q]);
  return half * sum;
}

std::vector<Vec2> DomainSpec::sample_by_arclength(int n) const
{
  if (n < 3)
    throw InvalidArgument("need at least 3 boundary samples");
  std::vector<Vec2> points;
  points.reserve(n);
  points.push_back(boundary_point(0.0));
  for (int m = 1; m < n; ++m) {
    const double target = length_ * m / n;
    const auto it = std::upper_bound(cumulative_length_.begin(), cumulative_length_.end(), target);
    const std::size_t j = static_cast<std::size_t>(it - cumulative_length_.begin()) - 1;
    double lo = dense_s_[j];
    double hi = dense_s_[j + 1];
    double s = lo + (hi - lo) * (target - cumulative_length_[j]) /
                      (cumulative_length_[j + 1] - cumulative_length_[j]);
    // safeguarded Newton on L(s) = target
    for (int iter = 0; iter < 50; ++iter) {
      const double f = cumulative_length_[j] + arclength_between(dense_s_[j], s) - target;
      if (f > 0.0)
        hi = s;
      else
        lo = s;
      double next = s - f / speed(s);
      if (!(next > lo && next < hi))
        next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-15 * two_pi) {
        s = next;
        break;
      }
      s = next;
    }
    points.push_back(boundary_point(s));
  }
  return points;
}

DomainSpec parse_domain(const std::string& text)
{
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw InvalidArgument("domain must look like circle:R, ellipse:A,B or star:FILE");
  const std::string kind = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  auto parse_number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad number '" + s + "' in domain '" + text + "'");
    }
    if (used != s.size())
      throw InvalidArgument("bad number '" + s + "' in domain '" + text + "'");
    return v;
  };
  if (kind == "circle")
    return DomainSpec::circle(parse_number(args));
  if (kind == "ellipse") {
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw InvalidArgument("ellipse needs two half axes: ellipse:A,B");
    return DomainSpec::ellipse(parse_number(args.substr(0, comma)),
                               parse_number(args.substr(comma + 1)));
  }
  if (kind == "star") {
    std::ifstream in(args);
    if (!in)
      throw InvalidArgument("cannot open star-shaped domain file '" + args + "'");
    StarShaped star;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0])))
        continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double theta = 0.0, r = 0.0;
      if (!(row >> theta >> r))
        throw InvalidArgument("bad row in star-shaped domain file: " + line);
      star.radius_samples.emplace_back(theta, r);
    }
    return DomainSpec(std::move(star));
  }
  throw InvalidArgument("unknown domain kind '" + kind + "'");
}

} // namespace pmcf
