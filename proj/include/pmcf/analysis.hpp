#ifndef PMCF_ANALYSIS_HPP
#define PMCF_ANALYSIS_HPP

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <pmcf/fem.hpp>

namespace pmcf {

struct ErrorTriple
{
  double l2 = 0.0;
  double h1 = 0.0; // full norm: sqrt(|e|_{H1}^2 + ||e||_{L2}^2)
  double linf = 0.0;
  Vec2 linf_location; // where the maximum was attained
};

/**
 * Error between a reference solution and a candidate on a possibly different
 * mesh; the candidate is extended by zero outside its own mesh. L2 and H1 are
 * integrated exactly over the overlay of both meshes (each reference triangle
 * clipped against the candidate triangles it meets). L-infinity is the
 * maximum over reference vertices, centroids and edge midpoints.
 */
ErrorTriple error_norms(const FeFunction& reference, const FeFunction& candidate);

//! Same norms against a closed-form reference (value and gradient), with the
//! quadrature on the candidate's mesh.
ErrorTriple error_norms(const std::function<double(Vec2)>& exact,
                        const std::function<Vec2(Vec2)>& exact_gradient,
                        const FeFunction& candidate);

struct ConvergenceRow
{
  double param = 0.0;
  ErrorTriple error;
};

struct RateFit
{
  double l2 = 0.0;
  double h1 = 0.0;
  double linf = 0.0;
};

struct ConvergenceTable
{
  std::vector<ConvergenceRow> rows; // param strictly decreasing
  std::optional<RateFit> slopes; // needs at least 3 rows
};

//! Least-squares slope of log(error) against log(param), per norm.
RateFit fit_rate(const ConvergenceTable& table);
double fit_slope(const std::vector<double>& params, const std::vector<double>& errors);

//! CSV with columns param,l2,linf,h1 and a trailing "slope" row when fitted.
void write_table_csv(const ConvergenceTable& table, std::ostream& out);

} // namespace pmcf

#endif
