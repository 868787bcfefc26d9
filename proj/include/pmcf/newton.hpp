#ifndef PMCF_NEWTON_HPP
#define PMCF_NEWTON_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include <pmcf/fem.hpp>
#include <pmcf/linalg.hpp>

namespace pmcf {

struct NewtonOptions
{
  double tol = 1e-10;  // on the infinity norm of the algebraic residual
  std::size_t max_iter = 50;
  int max_halvings = 20;
  double armijo = 1e-4;
  double ssor_omega = 1.2;
  double linear_rel_tol = 1e-10;
  std::size_t linear_max_iter = 0; // 0 means 10 n
};

struct LinearSolveRecord
{
  SolveStats stats;
  //! ||b - J x|| / ||b|| recomputed with an independent product after the solve.
  double verified_relative_residual = 0.0;
};

//! Outcome of one Newton solve at fixed eps.
struct NewtonStage
{
  double eps = 0.0;
  std::size_t iterations = 0;
  double residual_inf = 0.0;
  std::size_t dampings = 0; // total step halvings
  std::vector<LinearSolveRecord> linear;
  double min_value = 0.0;   // smallest nodal value of the accepted solution
};

struct NewtonReport
{
  std::vector<NewtonStage> stages;

  std::size_t total_linear_solves() const;
  double worst_verified_residual() const;
};

void write_report_csv(const NewtonReport& report, std::ostream& out);

/**
 * Damped Newton iteration for the discrete regularized problem. Every step
 * solves J delta = -R with SSOR-preconditioned BiCGSTAB and halves the step
 * until the Armijo condition on the residual infinity norm holds.
 */
std::pair<FeFunction, NewtonStage> newton_solve(const Discretization& disc,
                                                const RegularizationParams& p,
                                                const FeFunction& init,
                                                const NewtonOptions& options = {});

std::pair<FeFunction, NewtonStage> newton_solve(const Mesh& mesh, const RegularizationParams& p,
                                                const FeFunction& init,
                                                const NewtonOptions& options = {});

/**
 * Decreasing sequence of eps values. Either geometric (eps_start, then
 * max(eps_target, factor * eps) until eps_target) or an explicit list.
 */
class ContinuationSchedule
{
public:
  ContinuationSchedule(double eps_start, double factor, double eps_target);
  static ContinuationSchedule explicit_list(std::vector<double> eps_values);
  //! Default geometric schedule from 1.0 with factor 0.5 down to eps_target
  //! (a single stage if eps_target >= 1).
  static ContinuationSchedule towards(double eps_target);

  const std::vector<double>& stages() const { return stages_; }
  double target() const { return stages_.back(); }

private:
  ContinuationSchedule() = default;
  std::vector<double> stages_;
};

//! Called after each accepted stage with the stage solution.
using StageCallback = std::function<void(const FeFunction&, const NewtonStage&)>;

/**
 * Warm-started eps continuation: stage i starts from the solution of stage
 * i - 1, the first one from u = 0. Newton failures are rethrown with the
 * failing eps in the message.
 */
std::pair<FeFunction, NewtonReport> continuation_solve(const Mesh& mesh, double k,
                                                       const ContinuationSchedule& schedule,
                                                       const NewtonOptions& options = {},
                                                       const StageCallback& on_stage = {});

} // namespace pmcf

#endif
