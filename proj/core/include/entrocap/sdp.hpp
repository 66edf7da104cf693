#pragma once

#include "entrocap/linalg.hpp"

#include <vector>

namespace entrocap {

// Standard-form semidefinite program over a block-diagonal Hermitian variable:
//
//   minimize    <C, X>
//   subject to  <A_r, X> = b_r   (r = 0..m-1),    X >= 0  (each block PSD),
//
// with <A, B> = Tr(A^dagger B). All coefficient matrices are Hermitian, so
// every inner product above is real. The Lagrange dual is
//
//   maximize    b^T y
//   subject to  sum_r y_r A_r + Z = C,    Z >= 0.
//
// Inequality constraints and linear-matrix-inequality variables are modeled
// with extra slack blocks tied to the rest via entrywise equality rows.
class SdpProblem {
 public:
  explicit SdpProblem(std::vector<long> block_dims);

  int num_blocks() const { return static_cast<int>(dims_.size()); }
  long block_dim(int blk) const { return dims_.at(static_cast<size_t>(blk)); }
  long num_rows() const { return static_cast<long>(rhs_.size()); }

  // Adds v to C at (i, j) and conj(v) at (j, i); diagonal entries must be real.
  void objective(int blk, long i, long j, Complex v);
  // Adds the Hermitian matrix c to the objective block.
  void objective_dense(int blk, const Matrix& c);

  // Appends an empty constraint row with right-hand side `rhs`; returns its index.
  long new_row(double rhs);

  // Adds v to A_row at (i, j) and conj(v) at (j, i) within block blk, so an
  // off-diagonal coefficient v contributes 2 Re(conj(v) X_ij) to the row value
  // and a diagonal coefficient (necessarily real) contributes v X_ii.
  void coeff(long row, int blk, long i, long j, Complex v);
  // Adds the Hermitian matrix a as the row's coefficient on block blk.
  void coeff_dense(long row, int blk, const Matrix& a);

  // Constrains block blk of X to equal the Hermitian matrix b entrywise.
  void fix_block(int blk, const Matrix& b);
  // Constrains the principal submatrix of block blk starting at `off` to
  // equal the Hermitian matrix b entrywise.
  void fix_submatrix(int blk, long off, const Matrix& b);

  struct RowEntry {
    int blk;
    long i, j;
    Complex v;
  };
  const std::vector<long>& block_dims() const { return dims_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<Matrix>& objective_blocks() const { return c_; }
  const std::vector<std::vector<RowEntry>>& rows() const { return rows_; }

 private:
  void check_entry(int blk, long i, long j) const;

  std::vector<long> dims_;
  std::vector<Matrix> c_;
  std::vector<double> rhs_;
  std::vector<std::vector<RowEntry>> rows_;
};

struct SdpOptions {
  double gap_tol = tol::sdp_gap;
  double feas_tol = tol::sdp_feas;
  int max_iter = 200;
  bool track_history = true;
};

enum class SdpStatus { kOptimal, kPrimalInfeasible, kDualInfeasible, kIterLimit, kNumerical };

const char* to_string(SdpStatus s);

struct SdpIterate {
  int iter = 0;
  double mu = 0, tau = 0, kappa = 0;
  double primal_res = 0, dual_res = 0, gap = 0;
  double primal_obj = 0, dual_obj = 0;  // tau-normalized, original data units
};

struct SdpResult {
  SdpStatus status = SdpStatus::kNumerical;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  // Optimal / iteration-limit: tau-normalized primal and dual iterates.
  // Infeasible: (y, z) is a Farkas ray with b^T y = 1 (primal infeasible),
  // or x is an improving ray with <C, x> = -1 (dual infeasible).
  std::vector<Matrix> x, z;
  RealVector y;
  double primal_res = kInf, dual_res = kInf, gap = kInf;
  int iterations = 0;
  std::vector<SdpIterate> history;
  bool ok() const { return status == SdpStatus::kOptimal; }
};

SdpResult solve_sdp(const SdpProblem& prob, const SdpOptions& opts = {});

// The same program posed over the real representation
// T(H) = [[Re H, -Im H], [Im H, Re H]] of every block: dimensions double and
// all data is halved, so <T(A)/2, T(X)> = <A, X> and optimal values coincide.
SdpProblem realified(const SdpProblem& prob);

}  // namespace entrocap
