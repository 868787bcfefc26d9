#ifndef PMCF_DOMAIN_HPP
#define PMCF_DOMAIN_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <pmcf/vec2.hpp>

namespace pmcf {

struct Circle
{
  double r0 = 1.0;
};

//! Axis-aligned ellipse with half axis `a` along x and `b` along y.
struct Ellipse
{
  double a = 1.0;
  double b = 1.0;
};

//! Domain bounded by the polar curve r(theta), theta in [0, 2 pi), given by
//! samples and interpolated by a periodic cubic spline.
struct StarShaped
{
  std::vector<std::pair<double, double>> radius_samples; // (theta, r)
};

/**
 * A smooth convex planar domain containing the origin.
 *
 * All three variants are handled through a radial gauge function rho(p) which
 * is 1 on the boundary, < 1 inside and homogeneous of degree one, so that
 * `contains` and `project_to_boundary` share a single formula. A circle is an
 * ellipse with equal half axes and produces bit-identical results.
 */
class DomainSpec
{
public:
  using Variant = std::variant<Circle, Ellipse, StarShaped>;

  //! Validates radii and convexity; throws InvalidArgument / NonConvexDomain.
  explicit DomainSpec(Variant shape);

  static DomainSpec circle(double r0) { return DomainSpec(Circle{r0}); }
  static DomainSpec ellipse(double a, double b) { return DomainSpec(Ellipse{a, b}); }

  const Variant& shape() const { return shape_; }
  std::string describe() const;

  //! Gauge function: rho(p) <= 1 iff p in the closed domain.
  double gauge(Vec2 p) const;
  bool contains(Vec2 p, double tol = 0.0) const { return gauge(p) <= 1.0 + tol; }
  //! Radial projection of p != 0 onto the boundary curve.
  Vec2 project_to_boundary(Vec2 p) const;

  //! Boundary parametrization over s in [0, 2 pi) and its derivative.
  Vec2 boundary_point(double s) const;
  Vec2 boundary_tangent(double s) const;

  double boundary_length() const { return length_; }
  double diameter() const { return diameter_; }
  Vec2 bbox_min() const { return bbox_min_; }
  Vec2 bbox_max() const { return bbox_max_; }

  //! `n` boundary points equally spaced in arc length, counter-clockwise,
  //! starting at s = 0.
  std::vector<Vec2> sample_by_arclength(int n) const;

  //! Dense boundary polyline (closed implicitly) used for distance queries.
  const std::vector<Vec2>& dense_boundary() const { return dense_; }

private:
  double spline_radius(double theta, int derivative = 0) const;
  double speed(double s) const { return norm(boundary_tangent(s)); }
  double arclength_between(double s0, double s1) const;
  void check_convexity() const;

  Variant shape_;
  // periodic spline data for StarShaped
  std::vector<double> knots_;
  std::vector<double> knot_values_;
  std::vector<double> second_derivatives_;

  std::vector<Vec2> dense_;
  std::vector<double> dense_s_;
  std::vector<double> cumulative_length_;
  double length_ = 0.0;
  double diameter_ = 0.0;
  Vec2 bbox_min_;
  Vec2 bbox_max_;
};

//! Parses "circle:R", "ellipse:A,B" or "star:path.csv" (theta,r rows).
DomainSpec parse_domain(const std::string& text);

} // namespace pmcf

#endif
