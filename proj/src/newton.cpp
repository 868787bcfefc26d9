#include <pmcf/newton.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <pmcf/errors.hpp>

namespace pmcf {

std::size_t NewtonReport::total_linear_solves() const
{
  std::size_t n = 0;
  for (const auto& s : stages)
    n += s.linear.size();
  return n;
}

double NewtonReport::worst_verified_residual() const
{
  double worst = 0.0;
  for (const auto& s : stages)
    for (const auto& l : s.linear)
      worst = std::max(worst, l.verified_relative_residual);
  return worst;
}

void write_report_csv(const NewtonReport& report, std::ostream& out)
{
  out << std::setprecision(17);
  out << "stage,eps,iterations,residual,dampings,linear_iterations\n";
  for (std::size_t i = 0; i < report.stages.size(); ++i) {
    const NewtonStage& s = report.stages[i];
    std::size_t linear = 0;
    for (const auto& l : s.linear)
      linear += l.stats.iterations;
    out << i << "," << s.eps << "," << s.iterations << "," << s.residual_inf << "," << s.dampings
        << "," << linear << "\n";
  }
}

std::pair<FeFunction, NewtonStage> newton_solve(const Discretization& disc,
                                                const RegularizationParams& p,
                                                const FeFunction& init,
                                                const NewtonOptions& options)
{
  if (!(options.tol > 0.0))
    throw InvalidArgument("Newton tolerance must be positive");
  if (!init.is_admissible())
    throw NonAdmissibleFunction("Newton initial guess does not vanish on the boundary");

  FeFunction u = init;
  NewtonStage stage;
  stage.eps = p.eps;
  std::vector<double> r = disc.residual(u, p);
  double rnorm = norm_inf(r);

  while (rnorm > options.tol) {
    if (stage.iterations >= options.max_iter) {
      std::ostringstream os;
      os << "Newton reached " << options.max_iter << " iterations with residual " << rnorm;
      throw MaxIterationsExceeded(os.str());
    }
    const SparseMatrix J = disc.jacobian(u, p);
    std::vector<double> rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      rhs[i] = -r[i];
    const SsorPreconditioner ssor(J, options.ssor_omega);
    LinearSolveRecord record;
    const std::vector<double> delta =
      bicgstab(J, rhs, ssor, options.linear_rel_tol, options.linear_max_iter, record.stats);
    record.verified_relative_residual = relative_residual(J, delta, rhs);
    stage.linear.push_back(record);

    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      FeFunction trial = u;
      disc.add_to(trial, delta, step);
      std::vector<double> r_trial = disc.residual(trial, p);
      const double trial_norm = norm_inf(r_trial);
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - options.armijo * step) * rnorm) {
        u = std::move(trial);
        r = std::move(r_trial);
        rnorm = trial_norm;
        accepted = true;
        break;
      }
      step *= 0.5;
      ++stage.dampings;
    }
    ++stage.iterations;
    if (!accepted) {
      std::ostringstream os;
      os << "Newton step rejected after " << options.max_halvings << " halvings at residual "
         << rnorm;
      throw NewtonDiverged(os.str());
    }
  }
  stage.residual_inf = rnorm;
  stage.min_value = u.values().empty() ? 0.0
                                       : *std::min_element(u.values().begin(), u.values().end());
  return {std::move(u), std::move(stage)};
}

std::pair<FeFunction, NewtonStage> newton_solve(const Mesh& mesh, const RegularizationParams& p,
                                                const FeFunction& init,
                                                const NewtonOptions& options)
{
  return newton_solve(Discretization(mesh), p, init, options);
}

ContinuationSchedule::ContinuationSchedule(double eps_start, double factor, double eps_target)
{
  if (!(eps_target > 0.0) || !(eps_start >= eps_target))
    throw InvalidArgument("continuation needs eps_start >= eps_target > 0");
  if (!(factor > 0.0 && factor < 1.0))
    throw InvalidArgument("continuation factor must lie in (0, 1)");
  double eps = eps_start;
  stages_.push_back(eps);
  while (eps > eps_target) {
    eps = std::max(eps_target, factor * eps);
    stages_.push_back(eps);
  }
}

ContinuationSchedule ContinuationSchedule::explicit_list(std::vector<double> eps_values)
{
  if (eps_values.empty())
    throw InvalidArgument("continuation list is empty");
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    if (!(eps_values[i] > 0.0))
      throw InvalidArgument("continuation eps values must be positive");
    if (i > 0 && !(eps_values[i] < eps_values[i - 1]))
      throw InvalidArgument("continuation eps values must be strictly decreasing");
  }
  ContinuationSchedule s;
  s.stages_ = std::move(eps_values);
  return s;
}

ContinuationSchedule ContinuationSchedule::towards(double eps_target)
{
  return ContinuationSchedule(std::max(1.0, eps_target), 0.5, eps_target);
}

std::pair<FeFunction, NewtonReport> continuation_solve(const Mesh& mesh, double k,
                                                       const ContinuationSchedule& schedule,
                                                       const NewtonOptions& options,
                                                       const StageCallback& on_stage)
{
  const Discretization disc(mesh);
  FeFunction u(mesh);
  NewtonReport report;
  for (double eps : schedule.stages()) {
    const RegularizationParams p(k, eps);
    try {
      auto [next, stage] = newton_solve(disc, p, u, options);
      u = std::move(next);
      report.stages.push_back(std::move(stage));
    } catch (const NewtonDiverged& e) {
      throw NewtonDiverged("continuation stage eps = " + std::to_string(eps) + ": " + e.what());
    } catch (const MaxIterationsExceeded& e) {
      throw MaxIterationsExceeded("continuation stage eps = " + std::to_string(eps) + ": " +
                                  e.what());
    }
    if (on_stage)
      on_stage(u, report.stages.back());
  }
  return {std::move(u), std::move(report)};
}

} // namespace pmcf
