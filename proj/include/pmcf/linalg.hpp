#ifndef PMCF_LINALG_HPP
#define PMCF_LINALG_HPP

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace pmcf {

/**
 * Square sparse matrix in compressed row storage. Column indices are
 * strictly increasing within each row; the pattern is fixed after
 * construction while the values may be overwritten.
 */
class SparseMatrix
{
public:
  SparseMatrix() = default;
  //! Validates the structure; throws InvalidArgument.
  SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<int> col_indices,
               std::vector<double> values);

  static SparseMatrix identity(std::size_t n);
  //! Dense row-major input; zeros are dropped except on the diagonal.
  static SparseMatrix from_dense(std::size_t n, const std::vector<double>& dense);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }
  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  //! Position of entry (i, j) in values(), or -1 if structurally zero.
  long find(std::size_t i, std::size_t j) const;
  double operator()(std::size_t i, std::size_t j) const;
  //! Position of the diagonal entry of row i, or -1.
  long diagonal_position(std::size_t i) const { return diagonal_[i]; }

  std::vector<double> to_dense() const;

private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
  std::vector<long> diagonal_;
};

std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x);
void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

//! ||b - A x||_2 / ||b||_2 recomputed from scratch (||b - A x||_2 if b = 0).
double relative_residual(const SparseMatrix& A, std::span<const double> x,
                         std::span<const double> b);

//! out = M^{-1} in
using Preconditioner = std::function<void(std::span<const double>, std::span<double>)>;

/**
 * Symmetric successive over-relaxation preconditioner
 *   M = omega/(2-omega) (D/omega + L) (D/omega)^{-1} (D/omega + U),
 * applied by one forward and one backward triangular sweep.
 */
class SsorPreconditioner
{
public:
  SsorPreconditioner(const SparseMatrix& A, double omega);
  void operator()(std::span<const double> in, std::span<double> out) const;

private:
  const SparseMatrix* A_;
  double omega_;
};

std::vector<double> ssor_apply(const SparseMatrix& A, double omega, std::span<const double> r);

Preconditioner identity_preconditioner();

enum class SolveStatus { Converged, MaxIterationsExceeded, Breakdown };

struct SolveStats
{
  std::size_t iterations = 0;
  double final_relative_residual = 0.0;
  bool breakdown_flag = false;
  SolveStatus status = SolveStatus::Converged;
  std::size_t restarts = 0;
};

struct BicgstabOptions
{
  double rel_tol = 1e-10;
  std::size_t max_iter = 0; // 0 means 10 n
  double omega = 1.2;       // SSOR relaxation used by callers that build the default preconditioner
};

/**
 * Right-preconditioned BiCGSTAB from x = 0. On convergence of the recursive
 * residual the true residual is recomputed; if it misses the tolerance the
 * iteration restarts from the current iterate. A rho breakdown restarts once,
 * a second one ends the solve with status Breakdown. The best iterate is
 * returned in every case.
 */
std::vector<double> bicgstab(const SparseMatrix& A, std::span<const double> b,
                             const Preconditioner& precond, double rel_tol, std::size_t max_iter,
                             SolveStats& stats);

//! Coordinate-format ASCII dump (1-based "i j value" lines after a header).
void write_matrix_market(const SparseMatrix& A, std::ostream& out);

} // namespace pmcf

#endif
