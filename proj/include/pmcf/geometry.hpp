#ifndef PMCF_GEOMETRY_HPP
#define PMCF_GEOMETRY_HPP

#include <iosfwd>
#include <vector>

#include <pmcf/fem.hpp>

namespace pmcf {

using Polyline = std::vector<Vec2>;

//! Boundary of the superlevel set {f > t} as closed polylines (first point
//! repeated at the end), each counter-clockwise.
struct LevelCurve
{
  double level = 0.0;
  std::vector<Polyline> components;

  bool empty() const { return components.empty(); }
};

/**
 * Marching triangles: in every triangle separated by t the chord between the
 * two linear crossing points is emitted; boundary edges of the mesh lying in
 * {f > t} close the curve where the region touches the mesh boundary. Chords
 * are stitched across shared edges. Vertex values equal to t are treated as
 * t + 1e-14 * scale.
 */
LevelCurve extract_level_set(const FeFunction& f, double t);

double signed_area(const Polyline& closed);
double polyline_length(const Polyline& closed);
bool is_closed(const Polyline& line, double tol = 1e-12);
//! No two non-adjacent segments intersect.
bool is_simple(const Polyline& closed);

struct CurveMeasures
{
  double length = 0.0;
  double area = 0.0;
};

//! Total length and enclosed area (holes subtracted); throws OpenCurve.
CurveMeasures curve_measures(const LevelCurve& curve);

struct DeficitRow
{
  double level = 0.0;
  double length = 0.0;
  double area = 0.0;
  double deficit = 0.0; // length^2 - 4 pi area
};

struct DeficitSeries
{
  std::vector<DeficitRow> rows;
  std::size_t omitted = 0; // levels with an empty curve
};

DeficitSeries deficit_series(const FeFunction& f, const std::vector<double>& levels);

//! n equispaced levels in (0, fraction * max f].
std::vector<double> equispaced_levels(const FeFunction& f, int n, double fraction = 0.95);

void write_deficit_csv(const DeficitSeries& series, std::ostream& out);
void write_curves_csv(const std::vector<LevelCurve>& curves, std::ostream& out);
void write_curves_svg(const std::vector<LevelCurve>& curves, std::ostream& out,
                      const Mesh* outline = nullptr);

} // namespace pmcf

#endif
