#include <pmcf/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <pmcf/errors.hpp>

namespace pmcf {

SparseMatrix::SparseMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                           std::vector<int> col_indices, std::vector<double> values)
  : n_(n)
  , row_offsets_(std::move(row_offsets))
  , col_indices_(std::move(col_indices))
  , values_(std::move(values))
  , diagonal_(n, -1)
{
  if (row_offsets_.size() != n_ + 1 || row_offsets_.front() != 0)
    throw InvalidArgument("row offsets must have n + 1 entries starting at 0");
  if (row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size())
    throw InvalidArgument("row offsets, column indices and values disagree in size");
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i])
      throw InvalidArgument("row offsets must be monotone");
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const int c = col_indices_[k];
      if (c < 0 || static_cast<std::size_t>(c) >= n_)
        throw InvalidArgument("column index out of range");
      if (k > row_offsets_[i] && col_indices_[k - 1] >= c)
        throw InvalidArgument("column indices must be strictly increasing within a row");
      if (static_cast<std::size_t>(c) == i)
        diagonal_[i] = static_cast<long>(k);
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n)
{
  std::vector<std::size_t> offsets(n + 1);
  std::vector<int> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    cols[i] = static_cast<int>(i);
  }
  return SparseMatrix(n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_dense(std::size_t n, const std::vector<double>& dense)
{
  if (dense.size() != n * n)
    throw DimensionMismatch("dense matrix must have n * n entries");
  std::vector<std::size_t> offsets{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = dense[i * n + j];
      if (v != 0.0 || i == j) {
        cols.push_back(static_cast<int>(j));
        vals.push_back(v);
      }
    }
    offsets.push_back(cols.size());
  }
  return SparseMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

long SparseMatrix::find(std::size_t i, std::size_t j) const
{
  const auto first = col_indices_.begin() + static_cast<long>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<long>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(j));
  if (it == last || *it != static_cast<int>(j))
    return -1;
  return it - col_indices_.begin();
}

double SparseMatrix::operator()(std::size_t i, std::size_t j) const
{
  const long pos = find(i, j);
  return pos < 0 ? 0.0 : values_[pos];
}

std::vector<double> SparseMatrix::to_dense() const
{
  std::vector<double> dense(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      dense[i * n_ + col_indices_[k]] = values_[k];
  return dense;
}

void spmv(const SparseMatrix& A, std::span<const double> x, std::span<double> y)
{
  if (x.size() != A.size() || y.size() != A.size())
    throw DimensionMismatch("spmv: vector length differs from matrix dimension");
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();
  for (std::size_t i = 0; i < A.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k)
      sum += val[k] * x[col[k]];
    y[i] = sum;
  }
}

std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x)
{
  std::vector<double> y(A.size());
  spmv(A, x, y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size())
    throw DimensionMismatch("dot: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += a[i] * b[i];
  return sum;
}

double norm2(std::span<const double> a)
{
  return std::sqrt(dot(a, a));
}

double norm_inf(std::span<const double> a)
{
  double m = 0.0;
  for (double v : a)
    m = std::max(m, std::abs(v));
  return m;
}

double relative_residual(const SparseMatrix& A, std::span<const double> x,
                         std::span<const double> b)
{
  if (b.size() != A.size())
    throw DimensionMismatch("relative_residual: right-hand side length mismatch");
  std::vector<double> r = spmv(A, x);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = b[i] - r[i];
  const double nb = norm2(b);
  return nb > 0.0 ? norm2(r) / nb : norm2(r);
}

SsorPreconditioner::SsorPreconditioner(const SparseMatrix& A, double omega)
  : A_(&A)
  , omega_(omega)
{
  if (!(omega > 0.0 && omega < 2.0))
    throw InvalidArgument("SSOR relaxation factor must lie in (0, 2)");
  for (std::size_t i = 0; i < A.size(); ++i) {
    const long d = A.diagonal_position(i);
    if (d < 0 || A.values()[d] == 0.0)
      throw ZeroDiagonal("SSOR needs a nonzero diagonal (row " + std::to_string(i) + ")");
  }
}

void SsorPreconditioner::operator()(std::span<const double> in, std::span<double> out) const
{
  const SparseMatrix& A = *A_;
  const std::size_t n = A.size();
  if (in.size() != n || out.size() != n)
    throw DimensionMismatch("SSOR: vector length differs from matrix dimension");
  const auto& off = A.row_offsets();
  const auto& col = A.col_indices();
  const auto& val = A.values();

  // forward: (D/omega + L) y = in
  for (std::size_t i = 0; i < n; ++i) {
    double sum = in[i];
    std::size_t k = off[i];
    for (; k < off[i + 1] && static_cast<std::size_t>(col[k]) < i; ++k)
      sum -= val[k] * out[col[k]];
    out[i] = sum * omega_ / val[A.diagonal_position(i)];
  }
  // z = (D/omega) y
  for (std::size_t i = 0; i < n; ++i)
    out[i] *= val[A.diagonal_position(i)] / omega_;
  // backward: (D/omega + U) x = z
  for (std::size_t i = n; i-- > 0;) {
    double sum = out[i];
    for (std::size_t k = static_cast<std::size_t>(A.diagonal_position(i)) + 1; k < off[i + 1]; ++k)
      sum -= val[k] * out[col[k]];
    out[i] = sum * omega_ / val[A.diagonal_position(i)];
  }
  const double scale = (2.0 - omega_) / omega_;
  for (std::size_t i = 0; i < n; ++i)
    out[i] *= scale;
}

std::vector<double> ssor_apply(const SparseMatrix& A, double omega, std::span<const double> r)
{
  std::vector<double> out(A.size());
  SsorPreconditioner(A, omega)(r, out);
  return out;
}

Preconditioner identity_preconditioner()
{
  return [](std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
  };
}

std::vector<double> bicgstab(const SparseMatrix& A, std::span<const double> b,
                             const Preconditioner& precond, double rel_tol, std::size_t max_iter,
                             SolveStats& stats)
{
  const std::size_t n = A.size();
  if (b.size() != n)
    throw DimensionMismatch("bicgstab: right-hand side length differs from matrix dimension");
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw InvalidArgument("bicgstab: relative tolerance must lie in (0, 1)");
  if (max_iter == 0)
    max_iter = 10 * std::max<std::size_t>(n, 1);

  stats = SolveStats{};
  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
    return x;
  const double target = rel_tol * bnorm;

  std::vector<double> r(b.begin(), b.end()), r_hat(n), p(n), v(n), s(n), t(n), p_hat(n), s_hat(n);
  std::vector<double> best_x = x;
  double best_res = bnorm;
  int rho_breakdowns = 0;

  auto true_residual = [&]() {
    spmv(A, x, t);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = b[i] - t[i];
    return norm2(r);
  };
  auto record = [&](double res) {
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
  };

  bool fresh = true;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  while (stats.iterations < max_iter) {
    if (fresh) {
      r_hat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      fresh = false;
    }
    const double rho_new = dot(r_hat, r);
    if (std::abs(rho_new) <= 1e-30 * norm2(r_hat) * norm2(r)) {
      if (++rho_breakdowns > 1) {
        stats.breakdown_flag = true;
        stats.status = SolveStatus::Breakdown;
        break;
      }
      ++stats.restarts;
      fresh = true;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i)
      p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precond(p, p_hat);
    spmv(A, p_hat, v);
    const double rv = dot(r_hat, v);
    if (rv == 0.0) {
      stats.breakdown_flag = true;
      stats.status = SolveStatus::Breakdown;
      break;
    }
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i)
      s[i] = r[i] - alpha * v[i];
    ++stats.iterations;

    bool check_true = false;
    if (norm2(s) <= target) {
      for (std::size_t i = 0; i < n; ++i)
        x[i] += alpha * p_hat[i];
      check_true = true;
    } else {
      precond(s, s_hat);
      spmv(A, s_hat, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p_hat[i] + omega * s_hat[i];
        r[i] = s[i] - omega * t[i];
      }
      if (omega == 0.0) {
        record(true_residual());
        stats.breakdown_flag = true;
        stats.status = SolveStatus::Breakdown;
        break;
      }
      check_true = norm2(r) <= target;
    }
    if (check_true) {
      const double res = true_residual();
      record(res);
      if (res <= target)
        break;
      // recursive residual drifted: restart from the current iterate
      ++stats.restarts;
      fresh = true;
    }
  }

  const double final_res = true_residual();
  record(final_res);
  stats.final_relative_residual = best_res / bnorm;
  if (stats.status == SolveStatus::Converged && best_res > target)
    stats.status = SolveStatus::MaxIterationsExceeded;
  return best_x;
}

void write_matrix_market(const SparseMatrix& A, std::ostream& out)
{
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.size() << " " << A.size() << " " << A.nonzeros() << "\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      out << i + 1 << " " << A.col_indices()[k] + 1 << " " << A.values()[k] << "\n";
}

} // namespace pmcf
