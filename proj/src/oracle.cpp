#include <pmcf/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <pmcf/errors.hpp>

namespace pmcf {

double exact_circle_solution(double r0, double k, double r)
{
  if (!(k > 0.0))
    throw InvalidArgument("exponent k must be positive");
  if (r < 0.0 || r > r0)
    throw OutOfDomain("radius outside [0, r0]");
  return (std::pow(r0, k + 1.0) - std::pow(r, k + 1.0)) / (k + 1.0);
}

double exact_circle_derivative(double r0, double k, double r)
{
  if (r < 0.0 || r > r0)
    throw OutOfDomain("radius outside [0, r0]");
  return -std::pow(r, k);
}

double RadialProfile::operator()(double r) const
{
  const double r0 = r_nodes.back();
  if (r >= r0)
    return values.back();
  r = std::max(r, 0.0);
  const double dr = r0 / static_cast<double>(r_nodes.size() - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(r / dr), r_nodes.size() - 2);
  const double t = (r - r_nodes[i]) / (r_nodes[i + 1] - r_nodes[i]);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

bool RadialProfile::nonincreasing() const
{
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1])
      return false;
  return true;
}

namespace {

// Extended precision: the flux differences reach the 1e-12 residual target
// only above double rounding level.
using real = long double;
using Vec = std::vector<real>;

class RadialProblem
{
public:
  RadialProblem(double r0, double k, int n)
    : k_(k)
    , n_(n)
    , dr_(r0 / n)
  {}

  void set_eps(real eps) { eps_ = eps; }

  // u has n entries (u_0 .. u_{n-1}); u_n = 0
  Vec residual(const Vec& u) const
  {
    Vec F(n_);
    for (int i = 0; i < n_; ++i) {
      const real up = value(u, i + 1);
      const real q_plus = (up - u[i]) / dr_;
      const real flux_plus = (i + 0.5) * dr_ * phi(q_plus);
      if (i == 0) {
        F[0] = flux_plus + dr_ * dr_ / 8.0 * std::pow(eps_, -1.0 / k_);
        continue;
      }
      const real q_minus = (u[i] - u[i - 1]) / dr_;
      const real flux_minus = (i - 0.5) * dr_ * phi(q_minus);
      const real c = (up - u[i - 1]) / (2.0 * dr_);
      const real W = std::sqrt(eps_ * eps_ + c * c);
      F[i] = flux_plus - flux_minus + i * dr_ * dr_ * std::pow(W, -1.0 / k_);
    }
    return F;
  }

  // Newton step: solves J delta = -F (tridiagonal Thomas sweep)
  Vec newton_direction(const Vec& u,
                                       const Vec& F) const
  {
    Vec lower(n_, 0.0), diag(n_, 0.0), upper(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      const real up = value(u, i + 1);
      const real dplus = (i + 0.5) * dr_ * dphi((up - u[i]) / dr_) / dr_;
      if (i == 0) {
        diag[0] = -dplus;
        upper[0] = dplus;
        continue;
      }
      const real dminus = (i - 0.5) * dr_ * dphi((u[i] - u[i - 1]) / dr_) / dr_;
      const real c = (up - u[i - 1]) / (2.0 * dr_);
      const real W = std::sqrt(eps_ * eps_ + c * c);
      // d/dc of i dr^2 W^{-1/k}, times dc/du_{i+1} = 1/(2 dr)
      const real dsource = i * dr_ * dr_ * (-1.0 / k_) * std::pow(W, -1.0 / k_ - 1.0) * (c / W) /
                             (2.0 * dr_);
      diag[i] = -dplus - dminus;
      upper[i] = (i + 1 < n_) ? dplus + dsource : 0.0;
      lower[i] = dminus - dsource;
    }
    Vec x(n_), c(n_);
    c[0] = upper[0] / diag[0];
    x[0] = -F[0] / diag[0];
    for (int i = 1; i < n_; ++i) {
      const real m = diag[i] - lower[i] * c[i - 1];
      c[i] = upper[i] / m;
      x[i] = (-F[i] - lower[i] * x[i - 1]) / m;
    }
    for (int i = n_ - 1; i-- > 0;)
      x[i] -= c[i] * x[i + 1];
    return x;
  }

private:
  real value(const Vec& u, int i) const { return i >= n_ ? 0.0 : u[i]; }
  real phi(real q) const { return q / std::sqrt(eps_ * eps_ + q * q); }
  real dphi(real q) const
  {
    const real W = std::sqrt(eps_ * eps_ + q * q);
    return eps_ * eps_ / (W * W * W);
  }

  real k_;
  int n_;
  real dr_;
  real eps_ = 1.0;
};

real max_abs(const Vec& v)
{
  real m = 0.0;
  for (real x : v)
    m = std::max(m, std::abs(x));
  return m;
}

} // namespace

RadialProfile radial_regularized_solve(double r0, double k, double eps, int n)
{
  if (!(r0 > 0.0) || !(k > 0.0))
    throw InvalidArgument("radial solve needs r0 > 0 and k > 0");
  if (!(eps > 0.0))
    throw InvalidArgument("radial solve needs eps > 0");
  if (n < 1000)
    throw InvalidArgument("radial solve needs at least 1000 cells");

  constexpr real tol = 1e-12;
  constexpr int max_iter = 100;
  constexpr int max_halvings = 30;

  RadialProblem problem(r0, k, n);
  const double dr = r0 / n;
  Vec u(n);
  for (int i = 0; i < n; ++i)
    u[i] = exact_circle_solution(r0, k, i * dr);

  std::vector<double> stages{eps};
  while (stages.back() < 1.0 && stages.size() < 64)
    stages.push_back(std::min(1.0, 2.0 * stages.back()));
  std::reverse(stages.begin(), stages.end());

  real rnorm = 0.0;
  for (double stage_eps : stages) {
    problem.set_eps(stage_eps);
    Vec F = problem.residual(u);
    rnorm = max_abs(F);
    int iter = 0;
    while (rnorm > tol) {
      if (++iter > max_iter)
        throw NewtonDiverged("radial Newton did not converge (residual " + std::to_string(static_cast<double>(rnorm)) +
                             ")");
      const Vec delta = problem.newton_direction(u, F);
      real step = 1.0;
      bool accepted = false;
      for (int h = 0; h <= max_halvings; ++h) {
        Vec trial(u);
        for (int i = 0; i < n; ++i)
          trial[i] += step * delta[i];
        Vec F_trial = problem.residual(trial);
        const real trial_norm = max_abs(F_trial);
        if (std::isfinite(trial_norm) && trial_norm < (1.0 - 1e-4 * step) * rnorm) {
          u = std::move(trial);
          F = std::move(F_trial);
          rnorm = trial_norm;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted)
        throw NewtonDiverged("radial Newton stalled at residual " +
                             std::to_string(static_cast<double>(rnorm)));
    }
  }

  RadialProfile profile;
  profile.eps = eps;
  profile.k = k;
  profile.residual_inf = rnorm;
  profile.r_nodes.resize(n + 1);
  profile.values.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    profile.r_nodes[i] = i * dr;
    profile.values[i] = i < n ? u[i] : 0.0;
  }
  profile.r_nodes[n] = r0;
  return profile;
}

void write_profile_csv(const RadialProfile& profile, std::ostream& out)
{
  out << std::setprecision(17) << "r,u\n";
  for (std::size_t i = 0; i < profile.r_nodes.size(); ++i)
    out << profile.r_nodes[i] << "," << profile.values[i] << "\n";
}

} // namespace pmcf
