#ifndef PMCF_ORACLE_HPP
#define PMCF_ORACLE_HPP

#include <iosfwd>
#include <vector>

namespace pmcf {

//! Viscosity solution on the disk of radius r0: (r0^{k+1} - r^{k+1}) / (k+1).
double exact_circle_solution(double r0, double k, double r);
//! Radial derivative of exact_circle_solution.
double exact_circle_derivative(double r0, double k, double r);

//! Radial profile u(r) of the regularized problem on a disk.
struct RadialProfile
{
  std::vector<double> r_nodes;
  std::vector<double> values;
  double eps = 0.0;
  double k = 0.0;
  double residual_inf = 0.0;

  //! Piecewise-linear interpolation; r is clamped to [0, r0].
  double operator()(double r) const;
  bool nonincreasing() const;
};

/**
 * Solves the radially symmetric regularized equation
 *
 *   (1/r) (r u' / W)' = -W^{-1/k},  W = sqrt(eps^2 + u'^2),  u'(0) = 0, u(r0) = 0
 *
 * with a conservative second-order finite-difference scheme on n uniform
 * cells. The center row uses the reflected ghost node u_{-1} = u_1 and the
 * limit (1/r)(r phi)' -> 2 phi'(0). Damped Newton with a tridiagonal Jacobian,
 * continued in eps from 1 when eps < 1, down to residual 1e-12.
 */
RadialProfile radial_regularized_solve(double r0, double k, double eps, int n = 20000);

void write_profile_csv(const RadialProfile& profile, std::ostream& out);

} // namespace pmcf

#endif
