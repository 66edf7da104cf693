#include "entrocap/sdp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace entrocap {

SdpProblem::SdpProblem(std::vector<long> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw ValidationError("sdp: need at least one block");
  for (long d : dims_)
    if (d < 1) throw ValidationError("sdp: block dimensions must be positive");
  c_.reserve(dims_.size());
  for (long d : dims_) c_.push_back(Matrix::Zero(d, d));
}

void SdpProblem::check_entry(int blk, long i, long j) const {
  if (blk < 0 || blk >= num_blocks()) throw ValidationError("sdp: block index out of range");
  long d = dims_[static_cast<size_t>(blk)];
  if (i < 0 || i >= d || j < 0 || j >= d) throw ValidationError("sdp: entry index out of range");
}

void SdpProblem::objective(int blk, long i, long j, Complex v) {
  check_entry(blk, i, j);
  if (i == j) {
    if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
      throw ValidationError("sdp: diagonal objective entry must be real");
    c_[static_cast<size_t>(blk)](i, i) += v.real();
  } else {
    c_[static_cast<size_t>(blk)](i, j) += v;
    c_[static_cast<size_t>(blk)](j, i) += std::conj(v);
  }
}

void SdpProblem::objective_dense(int blk, const Matrix& c) {
  if (blk < 0 || blk >= num_blocks()) throw ValidationError("sdp: block index out of range");
  long d = dims_[static_cast<size_t>(blk)];
  if (c.rows() != d || c.cols() != d) throw ValidationError("sdp: objective block size mismatch");
  if (!is_hermitian(c, 1e-10)) throw ValidationError("sdp: objective block must be Hermitian");
  c_[static_cast<size_t>(blk)] += 0.5 * (c + c.adjoint());
}

long SdpProblem::new_row(double rhs) {
  rhs_.push_back(rhs);
  rows_.emplace_back();
  return num_rows() - 1;
}

void SdpProblem::coeff(long row, int blk, long i, long j, Complex v) {
  if (row < 0 || row >= num_rows()) throw ValidationError("sdp: row index out of range");
  check_entry(blk, i, j);
  auto& es = rows_[static_cast<size_t>(row)];
  if (i == j) {
    if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
      throw ValidationError("sdp: diagonal coefficient must be real");
    es.push_back({blk, i, i, Complex(v.real(), 0.0)});
  } else {
    es.push_back({blk, i, j, v});
    es.push_back({blk, j, i, std::conj(v)});
  }
}

void SdpProblem::coeff_dense(long row, int blk, const Matrix& a) {
  if (blk < 0 || blk >= num_blocks()) throw ValidationError("sdp: block index out of range");
  long d = dims_[static_cast<size_t>(blk)];
  if (a.rows() != d || a.cols() != d) throw ValidationError("sdp: coefficient size mismatch");
  if (!is_hermitian(a, 1e-10)) throw ValidationError("sdp: coefficient must be Hermitian");
  Matrix h = 0.5 * (a + a.adjoint());
  for (long i = 0; i < d; ++i)
    for (long j = i; j < d; ++j)
      if (h(i, j) != Complex(0)) coeff(row, blk, i, j, h(i, j));
}

void SdpProblem::fix_block(int blk, const Matrix& b) { fix_submatrix(blk, 0, b); }

void SdpProblem::fix_submatrix(int blk, long off, const Matrix& b) {
  if (blk < 0 || blk >= num_blocks()) throw ValidationError("sdp: block index out of range");
  long d = b.rows();
  if (b.cols() != d) throw ValidationError("sdp: fixed submatrix must be square");
  if (off < 0 || off + d > dims_[static_cast<size_t>(blk)])
    throw ValidationError("sdp: fixed submatrix exceeds block");
  if (!is_hermitian(b, 1e-10)) throw ValidationError("sdp: fixed submatrix must be Hermitian");
  for (long i = 0; i < d; ++i) {
    long r = new_row(b(i, i).real());
    coeff(r, blk, off + i, off + i, 1.0);
    for (long j = i + 1; j < d; ++j) {
      long rr = new_row(2.0 * b(i, j).real());
      coeff(rr, blk, off + i, off + j, 1.0);
      long ri = new_row(2.0 * b(i, j).imag());
      coeff(ri, blk, off + i, off + j, Complex(0.0, 1.0));
    }
  }
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kPrimalInfeasible: return "primal_infeasible";
    case SdpStatus::kDualInfeasible: return "dual_infeasible";
    case SdpStatus::kIterLimit: return "iteration_limit";
    case SdpStatus::kNumerical: return "numerical_trouble";
  }
  return "unknown";
}

namespace {

using RowEntry = SdpProblem::RowEntry;

// Rows touching one block, with only that block's entries.
struct BlockRows {
  std::vector<long> rows;
  std::vector<std::vector<RowEntry>> entries;
};

double sparse_dot(const std::vector<RowEntry>& es, const Matrix& m) {
  Complex acc(0, 0);
  for (const auto& e : es) acc += std::conj(e.v) * m(e.i, e.j);
  return acc.real();
}

struct EigSqrt {
  Matrix half, inv_half;
};

EigSqrt split_sqrt(const Matrix& h, const char* what) {
  HermEig e = herm_eig(h);
  double lmax = e.values.maxCoeff();
  if (!(lmax > 0)) throw SolverError(std::string("sdp: ") + what + " lost positive definiteness");
  RealVector s = e.values.cwiseMax(lmax * 1e-15).cwiseSqrt();
  EigSqrt out;
  out.half = e.vectors * s.asDiagonal() * e.vectors.adjoint();
  out.inv_half = e.vectors * s.cwiseInverse().asDiagonal() * e.vectors.adjoint();
  return out;
}

// Nesterov-Todd scaling point W for the pair (X, Z): W Z W = X, and the
// scaled iterate V = W^{-1/2} X W^{-1/2} = W^{1/2} Z W^{1/2}.
struct Scaling {
  Matrix W, Wh, Wih;  // W and its square roots
  Matrix Q;           // eigenvectors of V
  RealVector lam;     // eigenvalues of V
  Matrix Vsq;         // V^2
};

Scaling nt_scaling(const Matrix& x, const Matrix& z) {
  EigSqrt zs = split_sqrt(z, "dual block");
  Matrix s = zs.half * x * zs.half;
  s = 0.5 * (s + s.adjoint());
  EigSqrt ss = split_sqrt(s, "similarity product");
  Scaling sc;
  sc.W = zs.inv_half * ss.half * zs.inv_half;
  sc.W = 0.5 * (sc.W + sc.W.adjoint());
  EigSqrt ws = split_sqrt(sc.W, "scaling point");
  sc.Wh = ws.half;
  sc.Wih = ws.inv_half;
  Matrix v = ws.inv_half * x * ws.inv_half;
  v = 0.5 * (v + v.adjoint());
  HermEig ve = herm_eig(v);
  double vmax = ve.values.maxCoeff();
  if (!(vmax > 0)) throw SolverError("sdp: scaled iterate collapsed");
  sc.lam = ve.values.cwiseMax(vmax * 1e-15);
  sc.Q = ve.vectors;
  sc.Vsq = sc.Q * sc.lam.cwiseAbs2().asDiagonal() * sc.Q.adjoint();
  return sc;
}

// Solves (V D + D V)/2 = K for D in V's eigenbasis.
Matrix lyapunov_solve(const Scaling& sc, const Matrix& k) {
  Matrix kt = sc.Q.adjoint() * k * sc.Q;
  long n = kt.rows();
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) kt(i, j) *= 2.0 / (sc.lam(i) + sc.lam(j));
  Matrix d = sc.Q * kt * sc.Q.adjoint();
  return 0.5 * (d + d.adjoint());
}

// Largest alpha with V + alpha * dir >= 0, dir given in the scaled space.
double max_step_scaled(const Scaling& sc, const Matrix& dir) {
  RealVector is = sc.lam.cwiseSqrt().cwiseInverse();
  Matrix t = is.asDiagonal() * (sc.Q.adjoint() * dir * sc.Q) * is.asDiagonal();
  t = 0.5 * (t + t.adjoint());
  HermEig e = herm_eig(t);
  double lmin = e.values.minCoeff();
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

// W A W for a sparse Hermitian coefficient; dense fallback when A is not sparse.
Matrix sandwich(const Matrix& w, const std::vector<RowEntry>& es, long n) {
  if (static_cast<long>(es.size()) * 4 >= n * n) {
    Matrix a = Matrix::Zero(n, n);
    for (const auto& e : es) a(e.i, e.j) += e.v;
    return w * a * w;
  }
  Matrix b = Matrix::Zero(n, n);
  for (const auto& e : es) b.noalias() += e.v * (w.col(e.i) * w.row(e.j));
  return b;
}

double herm_inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

struct Direction {
  std::vector<Matrix> dX, dZ, dXs, dZs;  // dXs/dZs: scaled-space versions
  RealVector dy;
  double dtau = 0, dkappa = 0;
};

}  // namespace

SdpResult solve_sdp(const SdpProblem& prob, const SdpOptions& opts) {
  const int nb = prob.num_blocks();
  const long m = prob.num_rows();
  const std::vector<long>& dims = prob.block_dims();

  // Copy and normalize the data: objective to unit Frobenius norm, every
  // constraint row to unit norm. Solutions are mapped back on exit.
  std::vector<Matrix> C = prob.objective_blocks();
  double c_norm2 = 0;
  for (const auto& c : C) c_norm2 += c.squaredNorm();
  const double c_scale = std::max(1.0, std::sqrt(c_norm2));
  for (auto& c : C) c /= c_scale;

  std::vector<std::vector<RowEntry>> rows = prob.rows();
  RealVector b(m);
  RealVector row_scale(m);
  for (long r = 0; r < m; ++r) {
    double n2 = 0;
    for (const auto& e : rows[static_cast<size_t>(r)]) n2 += std::norm(e.v);
    double rhs = prob.rhs()[static_cast<size_t>(r)];
    if (n2 < 1e-28 * std::max(1.0, rhs * rhs))
      throw ValidationError("sdp: constraint row " + std::to_string(r) +
                            " has (numerically) no coefficients");
    double s = std::sqrt(n2);
    row_scale(r) = s;
    for (auto& e : rows[static_cast<size_t>(r)]) e.v /= s;
    b(r) = rhs / s;
  }

  // Per-block row lists for the Schur-complement assembly.
  std::vector<BlockRows> brows(static_cast<size_t>(nb));
  {
    std::vector<std::vector<RowEntry>> tmp(static_cast<size_t>(nb));
    for (long r = 0; r < m; ++r) {
      for (auto& t : tmp) t.clear();
      for (const auto& e : rows[static_cast<size_t>(r)]) tmp[static_cast<size_t>(e.blk)].push_back(e);
      for (int k = 0; k < nb; ++k) {
        if (tmp[static_cast<size_t>(k)].empty()) continue;
        brows[static_cast<size_t>(k)].rows.push_back(r);
        brows[static_cast<size_t>(k)].entries.push_back(tmp[static_cast<size_t>(k)]);
      }
    }
  }

  long N = 0;
  for (long d : dims) N += d;
  const double bnorm = b.norm();
  double cnorm = 0;
  for (const auto& c : C) cnorm += c.squaredNorm();
  cnorm = std::sqrt(cnorm);

  std::vector<Matrix> X, Z;
  for (long d : dims) {
    X.push_back(Matrix::Identity(d, d));
    Z.push_back(Matrix::Identity(d, d));
  }
  RealVector y = RealVector::Zero(m);
  double tau = 1.0, kappa = 1.0;

  auto apply_A = [&](const std::vector<Matrix>& xs) {
    RealVector out = RealVector::Zero(m);
    for (int k = 0; k < nb; ++k) {
      const auto& br = brows[static_cast<size_t>(k)];
      for (size_t idx = 0; idx < br.rows.size(); ++idx)
        out(br.rows[idx]) += sparse_dot(br.entries[idx], xs[static_cast<size_t>(k)]);
    }
    return out;
  };
  auto apply_Astar = [&](const RealVector& yy) {
    std::vector<Matrix> out;
    for (long d : dims) out.push_back(Matrix::Zero(d, d));
    for (long r = 0; r < m; ++r)
      for (const auto& e : rows[static_cast<size_t>(r)])
        out[static_cast<size_t>(e.blk)](e.i, e.j) += yy(r) * e.v;
    return out;
  };

  SdpResult res;

  // Track the best (most nearly converged) iterate for fallback returns.
  double best_merit = kInf;
  double best_pres = kInf, best_dres = kInf, best_gap = kInf;
  std::vector<Matrix> bX = X, bZ = Z;
  RealVector by_ = y;
  double btau = tau;

  // An iterate that sits within a small factor of the requested tolerances is
  // still a usable optimum even if a later Newton step destabilizes (the KKT
  // system turns singular near the solution).  Accept it rather than failing.
  constexpr double kAcceptFactor = 10.0;
  auto best_is_acceptable = [&]() {
    return best_pres <= kAcceptFactor * opts.feas_tol &&
           best_dres <= kAcceptFactor * opts.feas_tol &&
           best_gap <= kAcceptFactor * opts.gap_tol;
  };

  auto finalize_from = [&](const std::vector<Matrix>& fx, const RealVector& fy,
                           const std::vector<Matrix>& fz, double ftau, SdpStatus st) {
    res.status = st;
    res.x.clear();
    res.z.clear();
    res.y = RealVector::Zero(m);
    for (int k = 0; k < nb; ++k) {
      res.x.push_back(fx[static_cast<size_t>(k)] / ftau);
      res.z.push_back(c_scale * fz[static_cast<size_t>(k)] / ftau);
    }
    for (long r = 0; r < m; ++r) res.y(r) = fy(r) * c_scale / (row_scale(r) * ftau);
    // Residuals and objective in original data units.
    RealVector ax = apply_A(res.x);
    double pr2 = 0;
    for (long r = 0; r < m; ++r) {
      double v = ax(r) * row_scale(r) - prob.rhs()[static_cast<size_t>(r)];
      pr2 += v * v;
    }
    double borig = 0;
    for (double v : prob.rhs()) borig += v * v;
    res.primal_res = std::sqrt(pr2) / (1.0 + std::sqrt(borig));
    RealVector ys = fy / ftau;
    std::vector<Matrix> asy = apply_Astar(ys);
    double dr2 = 0, cn2 = 0;
    for (int k = 0; k < nb; ++k) {
      Matrix gap = c_scale * (asy[static_cast<size_t>(k)] + fz[static_cast<size_t>(k)] / ftau) -
                   prob.objective_blocks()[static_cast<size_t>(k)];
      dr2 += gap.squaredNorm();
      cn2 += prob.objective_blocks()[static_cast<size_t>(k)].squaredNorm();
    }
    res.dual_res = std::sqrt(dr2) / (1.0 + std::sqrt(cn2));
    double pobj = 0;
    for (int k = 0; k < nb; ++k)
      pobj += herm_inner(prob.objective_blocks()[static_cast<size_t>(k)], res.x[static_cast<size_t>(k)]);
    double dobj = 0;
    for (long r = 0; r < m; ++r) dobj += prob.rhs()[static_cast<size_t>(r)] * res.y(r);
    res.primal_obj = pobj;
    res.dual_obj = dobj;
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  };

  const double mu0 = (static_cast<double>(N) + 1.0 + tau * kappa) / (static_cast<double>(N) + 1.0);
  int tiny_steps = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    res.iterations = iter;

    RealVector ax = apply_A(X);
    RealVector rp = b * tau - ax;
    std::vector<Matrix> asy = apply_Astar(y);
    std::vector<Matrix> Rd(static_cast<size_t>(nb));
    double cx = 0, xz = 0;
    for (int k = 0; k < nb; ++k) {
      Rd[static_cast<size_t>(k)] =
          C[static_cast<size_t>(k)] * tau - asy[static_cast<size_t>(k)] - Z[static_cast<size_t>(k)];
      cx += herm_inner(C[static_cast<size_t>(k)], X[static_cast<size_t>(k)]);
      xz += herm_inner(X[static_cast<size_t>(k)], Z[static_cast<size_t>(k)]);
    }
    double byv = b.dot(y);
    double rg = kappa + cx - byv;
    double mu = (xz + tau * kappa) / (static_cast<double>(N) + 1.0);

    double pres = rp.norm() / tau / (1.0 + bnorm);
    double dr2 = 0;
    for (const auto& rd : Rd) dr2 += rd.squaredNorm();
    double dres = std::sqrt(dr2) / tau / (1.0 + cnorm);
    double pobj = cx / tau * c_scale;
    double dobj = byv / tau * c_scale;
    double gap = std::abs(cx - byv) / tau / (1.0 + std::abs(cx / tau) + std::abs(byv / tau));

    if (opts.track_history)
      res.history.push_back({iter, mu, tau, kappa, pres, dres, gap, pobj, dobj});

    double merit = std::max({pres, dres, gap});
    if (merit < best_merit) {
      best_merit = merit;
      best_pres = pres;
      best_dres = dres;
      best_gap = gap;
      bX = X;
      bZ = Z;
      by_ = y;
      btau = tau;
    }

    if (pres <= opts.feas_tol && dres <= opts.feas_tol && gap <= opts.gap_tol) {
      finalize_from(X, y, Z, tau, SdpStatus::kOptimal);
      return res;
    }

    // Infeasibility: tau -> 0 with a clean Farkas / improving ray.
    if (tau <= 1e-10 * std::max(1.0, kappa) || (mu < 1e-12 * mu0 && tau < 1e-6)) {
      if (byv > 1e-12) {
        double viol2 = 0;
        for (int k = 0; k < nb; ++k) viol2 += (asy[static_cast<size_t>(k)] + Z[static_cast<size_t>(k)]).squaredNorm();
        if (std::sqrt(viol2) / byv < 1e-6) {
          res.status = SdpStatus::kPrimalInfeasible;
          res.x.clear();
          res.z.clear();
          res.y = RealVector::Zero(m);
          // Scale so that, in original units, b^T y = 1.
          double byorig = 0;
          for (long r = 0; r < m; ++r)
            byorig += prob.rhs()[static_cast<size_t>(r)] * y(r) / row_scale(r);
          for (long r = 0; r < m; ++r) res.y(r) = y(r) / (row_scale(r) * byorig);
          for (int k = 0; k < nb; ++k) res.z.push_back(Z[static_cast<size_t>(k)] / byorig);
          res.primal_obj = res.dual_obj = kInf;
          return res;
        }
      }
      if (-cx > 1e-12) {
        double viol = ax.norm() / (-cx);
        if (viol < 1e-6) {
          res.status = SdpStatus::kDualInfeasible;
          res.x.clear();
          res.z.clear();
          res.y = RealVector::Zero(m);
          // Scale so that, in original units, <C, x> = -1.
          for (int k = 0; k < nb; ++k)
            res.x.push_back(X[static_cast<size_t>(k)] / (-cx * c_scale));
          res.primal_obj = res.dual_obj = -kInf;
          return res;
        }
      }
      finalize_from(bX, by_, bZ, btau,
                    best_is_acceptable() ? SdpStatus::kOptimal : SdpStatus::kNumerical);
      return res;
    }

    if (iter == opts.max_iter) break;

    try {
      std::vector<Scaling> sc;
      sc.reserve(static_cast<size_t>(nb));
      for (int k = 0; k < nb; ++k)
        sc.push_back(nt_scaling(X[static_cast<size_t>(k)], Z[static_cast<size_t>(k)]));

      // Iteration-constant pieces.
      std::vector<Matrix> H(static_cast<size_t>(nb)), WRdW(static_cast<size_t>(nb));
      for (int k = 0; k < nb; ++k) {
        const Matrix& w = sc[static_cast<size_t>(k)].W;
        H[static_cast<size_t>(k)] = w * C[static_cast<size_t>(k)] * w;
        WRdW[static_cast<size_t>(k)] = w * Rd[static_cast<size_t>(k)] * w;
      }
      RealVector q = RealVector::Zero(m);
      for (int k = 0; k < nb; ++k) {
        const auto& br = brows[static_cast<size_t>(k)];
        for (size_t idx = 0; idx < br.rows.size(); ++idx)
          q(br.rows[idx]) += sparse_dot(br.entries[idx], H[static_cast<size_t>(k)]);
      }

      // Schur complement M_rs = <A_r, W A_s W>, assembled blockwise.
      RealMatrix M = RealMatrix::Zero(m, m);
      for (int k = 0; k < nb; ++k) {
        const auto& br = brows[static_cast<size_t>(k)];
        long nk = dims[static_cast<size_t>(k)];
        for (size_t sidx = 0; sidx < br.rows.size(); ++sidx) {
          Matrix B = sandwich(sc[static_cast<size_t>(k)].W, br.entries[sidx], nk);
          long srow = br.rows[sidx];
          for (size_t ridx = 0; ridx <= sidx; ++ridx) {
            double v = sparse_dot(br.entries[ridx], B);
            long rrow = br.rows[ridx];
            M(rrow, srow) += v;
            if (rrow != srow) M(srow, rrow) += v;
          }
        }
      }

      // Jacobi-scaled factorization: the raw Schur complement grows extremely
      // ill-conditioned near convergence, but most of the spread sits on the
      // diagonal and is removed by symmetric diagonal scaling.
      RealVector dscale = RealVector::Ones(m);
      Eigen::LLT<RealMatrix> llt;
      Eigen::LDLT<RealMatrix> ldlt;
      bool use_ldlt = false;
      if (m > 0) {
        for (long r = 0; r < m; ++r) dscale(r) = 1.0 / std::sqrt(std::max(M(r, r), 1e-300));
        RealMatrix Ms = dscale.asDiagonal() * M * dscale.asDiagonal();
        llt.compute(Ms);
        if (llt.info() != Eigen::Success) {
          double reg = 1e-14;
          while (reg <= 1e-6 && llt.info() != Eigen::Success) {
            llt.compute(Ms + reg * RealMatrix::Identity(m, m));
            reg *= 100;
          }
        }
        if (llt.info() != Eigen::Success) {
          ldlt.compute(Ms);
          use_ldlt = true;
          if (ldlt.info() != Eigen::Success)
            throw SolverError("sdp: Schur complement factorization failed");
        }
      }
      auto solve_M = [&](const RealVector& r) {
        if (m == 0) return RealVector(0);
        auto precond_solve = [&](const RealVector& v) {
          RealVector vs = dscale.cwiseProduct(v);
          RealVector xs = use_ldlt ? RealVector(ldlt.solve(vs)) : RealVector(llt.solve(vs));
          return RealVector(dscale.cwiseProduct(xs));
        };
        RealVector x = precond_solve(r);
        RealVector res0 = r - M * x;
        RealVector x2 = x + precond_solve(res0);
        if ((r - M * x2).norm() < res0.norm()) return x2;  // keep refinement only if it helps
        return x;
      };

      // The dtau pivot kappa/tau + <C, WCW> - q^T M^{-1} q + b^T M^{-1} b is
      // evaluated through the cancellation-free identity
      //   <C, WCW> - q^T M^{-1} q = || W^{1/2} (C - A*(M^{-1} q)) W^{1/2} ||_F^2.
      RealVector yq = solve_M(q);
      RealVector yb = solve_M(b);
      RealVector u = yq + yb;
      double denom_base = kappa / tau + std::max(0.0, b.dot(yb));
      {
        std::vector<Matrix> asyq = apply_Astar(yq);
        for (int k = 0; k < nb; ++k) {
          Matrix g = sc[static_cast<size_t>(k)].Wh *
                     (C[static_cast<size_t>(k)] - asyq[static_cast<size_t>(k)]) *
                     sc[static_cast<size_t>(k)].Wh;
          denom_base += g.squaredNorm();
        }
      }
      if (!std::isfinite(denom_base))
        throw SolverError("sdp: reduced system lost definiteness");

      auto make_direction = [&](double eta, const std::vector<Matrix>& K, double d_c) {
        Direction dir;
        std::vector<Matrix> G1(static_cast<size_t>(nb));
        double cg1 = 0;
        for (int k = 0; k < nb; ++k) {
          Matrix D = lyapunov_solve(sc[static_cast<size_t>(k)], K[static_cast<size_t>(k)]);
          const auto& s = sc[static_cast<size_t>(k)];
          G1[static_cast<size_t>(k)] = s.Wh * D * s.Wh - eta * WRdW[static_cast<size_t>(k)];
          cg1 += herm_inner(C[static_cast<size_t>(k)], G1[static_cast<size_t>(k)]);
        }
        RealVector p = RealVector::Zero(m);
        for (int k = 0; k < nb; ++k) {
          const auto& br = brows[static_cast<size_t>(k)];
          for (size_t idx = 0; idx < br.rows.size(); ++idx)
            p(br.rows[idx]) += sparse_dot(br.entries[idx], G1[static_cast<size_t>(k)]);
        }
        RealVector rhs1 = eta * rp - p;
        double rhs2 = eta * rg + cg1 + d_c / tau;
        RealVector v = solve_M(rhs1);
        dir.dtau = (rhs2 - (b - q).dot(v)) / denom_base;
        dir.dy = v + dir.dtau * u;
        std::vector<Matrix> asdy = apply_Astar(dir.dy);
        dir.dX.resize(static_cast<size_t>(nb));
        dir.dZ.resize(static_cast<size_t>(nb));
        dir.dXs.resize(static_cast<size_t>(nb));
        dir.dZs.resize(static_cast<size_t>(nb));
        for (int k = 0; k < nb; ++k) {
          const auto& s = sc[static_cast<size_t>(k)];
          Matrix dz = eta * Rd[static_cast<size_t>(k)] + C[static_cast<size_t>(k)] * dir.dtau -
                      asdy[static_cast<size_t>(k)];
          dz = 0.5 * (dz + dz.adjoint());
          Matrix dx = G1[static_cast<size_t>(k)] + eta * WRdW[static_cast<size_t>(k)] - s.W * dz * s.W;
          dx = 0.5 * (dx + dx.adjoint());
          dir.dZ[static_cast<size_t>(k)] = dz;
          dir.dX[static_cast<size_t>(k)] = dx;
          Matrix dxs = s.Wih * dx * s.Wih;
          Matrix dzs = s.Wh * dz * s.Wh;
          dir.dXs[static_cast<size_t>(k)] = 0.5 * (dxs + dxs.adjoint());
          dir.dZs[static_cast<size_t>(k)] = 0.5 * (dzs + dzs.adjoint());
        }
        dir.dkappa = (d_c - kappa * dir.dtau) / tau;
        return dir;
      };

      auto max_step = [&](const Direction& dir) {
        double a = std::numeric_limits<double>::infinity();
        for (int k = 0; k < nb; ++k) {
          a = std::min(a, max_step_scaled(sc[static_cast<size_t>(k)], dir.dXs[static_cast<size_t>(k)]));
          a = std::min(a, max_step_scaled(sc[static_cast<size_t>(k)], dir.dZs[static_cast<size_t>(k)]));
        }
        if (dir.dtau < 0) a = std::min(a, -tau / dir.dtau);
        if (dir.dkappa < 0) a = std::min(a, -kappa / dir.dkappa);
        return a;
      };

      // Predictor (affine scaling): full residual reduction, zero target.
      std::vector<Matrix> Kp(static_cast<size_t>(nb));
      for (int k = 0; k < nb; ++k) Kp[static_cast<size_t>(k)] = -sc[static_cast<size_t>(k)].Vsq;
      Direction aff = make_direction(1.0, Kp, -tau * kappa);
      double a_aff = std::min(1.0, max_step(aff));

      double xz_aff = 0;
      for (int k = 0; k < nb; ++k)
        xz_aff += herm_inner(X[static_cast<size_t>(k)] + a_aff * aff.dX[static_cast<size_t>(k)],
                             Z[static_cast<size_t>(k)] + a_aff * aff.dZ[static_cast<size_t>(k)]);
      double mu_aff = (xz_aff + (tau + a_aff * aff.dtau) * (kappa + a_aff * aff.dkappa)) /
                      (static_cast<double>(N) + 1.0);
      mu_aff = std::max(mu_aff, 0.0);
      double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

      // Corrector with Mehrotra second-order term.
      std::vector<Matrix> Kc(static_cast<size_t>(nb));
      for (int k = 0; k < nb; ++k) {
        long nk = dims[static_cast<size_t>(k)];
        Matrix so = aff.dXs[static_cast<size_t>(k)] * aff.dZs[static_cast<size_t>(k)];
        so = 0.5 * (so + so.adjoint());
        Kc[static_cast<size_t>(k)] =
            sigma * mu * Matrix::Identity(nk, nk) - sc[static_cast<size_t>(k)].Vsq - so;
      }
      double d_c = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
      Direction dir = make_direction(1.0 - sigma, Kc, d_c);

      double alpha = std::min(1.0, 0.99 * max_step(dir));
      if (!std::isfinite(alpha) || alpha <= 1e-9) {
        if (++tiny_steps >= 3) throw SolverError("sdp: step sizes collapsed");
      } else {
        tiny_steps = 0;
      }

      for (int k = 0; k < nb; ++k) {
        X[static_cast<size_t>(k)] += alpha * dir.dX[static_cast<size_t>(k)];
        X[static_cast<size_t>(k)] =
            0.5 * (X[static_cast<size_t>(k)] + X[static_cast<size_t>(k)].adjoint());
        Z[static_cast<size_t>(k)] += alpha * dir.dZ[static_cast<size_t>(k)];
        Z[static_cast<size_t>(k)] =
            0.5 * (Z[static_cast<size_t>(k)] + Z[static_cast<size_t>(k)].adjoint());
      }
      y += alpha * dir.dy;
      tau += alpha * dir.dtau;
      kappa += alpha * dir.dkappa;
    } catch (const SolverError&) {
      finalize_from(bX, by_, bZ, btau,
                    best_is_acceptable() ? SdpStatus::kOptimal : SdpStatus::kNumerical);
      return res;
    }
  }

  finalize_from(bX, by_, bZ, btau,
                best_is_acceptable() ? SdpStatus::kOptimal : SdpStatus::kIterLimit);
  return res;
}

SdpProblem realified(const SdpProblem& prob) {
  std::vector<long> d2;
  for (long d : prob.block_dims()) d2.push_back(2 * d);
  SdpProblem out(d2);
  for (int k = 0; k < prob.num_blocks(); ++k) {
    long n = prob.block_dim(k);
    const Matrix& c = prob.objective_blocks()[static_cast<size_t>(k)];
    Matrix t = Matrix::Zero(2 * n, 2 * n);
    t.topLeftCorner(n, n) = c.real().cast<Complex>();
    t.bottomRightCorner(n, n) = c.real().cast<Complex>();
    t.topRightCorner(n, n) = -c.imag().cast<Complex>();
    t.bottomLeftCorner(n, n) = c.imag().cast<Complex>();
    out.objective_dense(k, 0.5 * t);
  }
  for (long r = 0; r < prob.num_rows(); ++r) {
    long nr = out.new_row(prob.rhs()[static_cast<size_t>(r)]);
    for (const auto& e : prob.rows()[static_cast<size_t>(r)]) {
      if (e.i > e.j) continue;  // stored entries come in Hermitian pairs
      long n = prob.block_dim(e.blk);
      if (e.i == e.j) {
        out.coeff(nr, e.blk, e.i, e.i, 0.5 * e.v.real());
        out.coeff(nr, e.blk, e.i + n, e.i + n, 0.5 * e.v.real());
      } else {
        double re = 0.5 * e.v.real(), im = 0.5 * e.v.imag();
        if (re != 0.0) {
          out.coeff(nr, e.blk, e.i, e.j, re);
          out.coeff(nr, e.blk, e.i + n, e.j + n, re);
        }
        if (im != 0.0) {
          out.coeff(nr, e.blk, e.i, e.j + n, -im);
          out.coeff(nr, e.blk, e.i + n, e.j, im);
        }
      }
    }
  }
  return out;
}

}  // namespace entrocap
