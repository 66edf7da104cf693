#include "entrocap/oneshot.hpp"

#include "entrocap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace entrocap {
namespace {

constexpr double kEnvelopeTol = 1e-6;  // gap at which heuristic results count as certified

void require_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw ValidationError("smoothing radius must lie in [0, 1)");
  }
}

void require_same_register(const DensityOperator& omega, const DensityOperator& tau) {
  if (!(omega.reg() == tau.reg())) {
    throw ValidationError("states must share one register");
  }
}

void require_normalized(const DensityOperator& s, const char* what) {
  if (std::abs(s.trace() - 1.0) > tol::validate) {
    throw ValidationError(std::string(what) + " must have unit trace");
  }
}

void require_disjoint_groups(const std::vector<std::string>& a, const std::vector<std::string>& b,
                             bool allow_empty_b) {
  if (a.empty()) throw ValidationError("first label group must be nonempty");
  if (b.empty() && !allow_empty_b) throw ValidationError("second label group must be nonempty");
  std::set<std::string> seen;
  for (const auto& l : a) {
    if (!seen.insert(l).second) throw ValidationError("duplicate label: " + l);
  }
  for (const auto& l : b) {
    if (!seen.insert(l).second) throw ValidationError("duplicate label: " + l);
  }
}

std::vector<std::string> joined(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Restricts rho to the labels of `order` (tracing out the rest) and lays the
// matrix out with tensor slots following `order`.
struct OrderedState {
  Matrix mat;
  long dim_a = 1, dim_b = 1;
};

OrderedState restrict_and_order(const DensityOperator& rho, const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  DensityOperator cut = marginal(rho, joined(a, b));
  OrderedState out;
  out.mat = cut.reordered(joined(a, b));
  for (const auto& l : a) out.dim_a *= cut.reg().dim_of(l);
  for (const auto& l : b) out.dim_b *= cut.reg().dim_of(l);
  return out;
}

double log2_guarded(double x) {
  if (!(x > 0.0)) return -kInf;
  return std::log2(x);
}

Matrix clamp_psd(const Matrix& m) { return herm_func(m, [](double x) { return x; }, 0.0, 0.0); }

// ---------------------------------------------------------------------------
// Exact max/min relative entropies on raw matrices.
// ---------------------------------------------------------------------------

struct DmaxMatrixEval {
  double value = kInf;
  double outside_mass = 0.0;
};

// log2 of the smallest lambda with omega <= lambda * tau, evaluated on
// supp(tau). Eigenvalues of tau at or below `kernel_cut` count as kernel;
// omega-mass on the kernel above `mass_tol` makes the value +infinity.
DmaxMatrixEval d_max_matrix(const Matrix& omega, const Matrix& tau, double kernel_cut,
                            double mass_tol) {
  DmaxMatrixEval out;
  HermEig es = herm_eig(tau);
  long d = tau.rows();
  long r = 0;
  for (long i = 0; i < d; ++i) {
    if (es.values(i) > kernel_cut) ++r;
  }
  double mass = 0.0;
  Matrix basis(d, r);
  long k = 0;
  for (long i = 0; i < d; ++i) {
    if (es.values(i) > kernel_cut) {
      basis.col(k++) = es.vectors.col(i) / std::sqrt(es.values(i));
    } else {
      mass += std::max(0.0, (es.vectors.col(i).adjoint() * omega * es.vectors.col(i))(0, 0).real());
    }
  }
  out.outside_mass = mass;
  if (mass > mass_tol) return out;  // value stays +infinity
  if (r == 0) return out;
  Matrix m = basis.adjoint() * omega * basis;
  out.value = log2_guarded(op_norm_herm(m));
  return out;
}

double d_min_matrix(const Matrix& omega, const Matrix& tau) {
  double f = fidelity(omega, tau);
  if (!(f > 0.0)) return kInf;
  return -std::log2(f);
}

// ---------------------------------------------------------------------------
// Hypothesis-testing relative entropy: Neyman-Pearson bisection.
// ---------------------------------------------------------------------------

struct NpSplit {
  double mass_above = 0.0;  // <omega, projector onto eigenvalues > band>
  double mass_band = 0.0;   // <omega, projector onto |eigenvalue| <= band>
  Matrix p_above, p_band;
};

NpSplit np_split(const Matrix& omega, const Matrix& tau, double t, double band) {
  Matrix h = omega - t * tau;
  HermEig es = herm_eig(h);
  long d = h.rows();
  NpSplit out;
  out.p_above = Matrix::Zero(d, d);
  out.p_band = Matrix::Zero(d, d);
  for (long i = 0; i < d; ++i) {
    double lam = es.values(i);
    if (lam <= -band) continue;
    Vector v = es.vectors.col(i);
    double w = std::max(0.0, (v.adjoint() * omega * v)(0, 0).real());
    if (lam > band) {
      out.p_above += v * v.adjoint();
      out.mass_above += w;
    } else {
      out.p_band += v * v.adjoint();
      out.mass_band += w;
    }
  }
  return out;
}

struct NpOutcome {
  double value = kInf;
  double threshold = 0.0;
  Matrix lambda;
};

// Support projector of a PSD matrix (relative eigenvalue cut).
Matrix support_projector(const Matrix& m, double rel_cut = 1e-12) {
  HermEig es = herm_eig(m);
  long d = m.rows();
  double cut = rel_cut * std::max(1.0, es.values.cwiseAbs().maxCoeff());
  Matrix p = Matrix::Zero(d, d);
  for (long i = 0; i < d; ++i) {
    if (es.values(i) > cut) p += es.vectors.col(i) * es.vectors.col(i).adjoint();
  }
  return p;
}

std::optional<NpOutcome> d_hypo_neyman_pearson(const Matrix& omega, const Matrix& tau,
                                               double eps) {
  long d = omega.rows();
  double target = 1.0 - eps;

  if (eps == 0.0) {
    // Tr[Lambda omega] = 1 forces Lambda to act as identity on supp(omega),
    // and then 0 <= Lambda <= I forces the off-support blocks to vanish.
    NpOutcome out;
    out.lambda = support_projector(omega);
    out.threshold = 0.0;
    double beta = std::max(0.0, (out.lambda * tau).trace().real());
    out.value = -log2_guarded(beta);
    return out;
  }

  // If enough omega-mass sits on ker(tau) a projector with zero type-II error
  // is feasible and the value is +infinity.
  {
    HermEig es = herm_eig(tau);
    double cut = 1e-12 * std::max(1.0, es.values.cwiseAbs().maxCoeff());
    Matrix kproj = Matrix::Zero(d, d);
    for (long i = 0; i < d; ++i) {
      if (es.values(i) <= cut) kproj += es.vectors.col(i) * es.vectors.col(i).adjoint();
    }
    double w_kernel = std::max(0.0, (kproj * omega).trace().real());
    if (w_kernel >= target) {
      NpOutcome out;
      out.lambda = kproj;
      out.threshold = kInf;
      out.value = kInf;
      return out;
    }
  }

  double nrm_omega = op_norm_herm(omega);
  double nrm_tau = op_norm_herm(tau);
  auto band_at = [&](double t) { return 1e-11 * (nrm_omega + t * nrm_tau + 1.0); };
  auto above_at = [&](double t) { return np_split(omega, tau, t, band_at(t)).mass_above; };

  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (above_at(hi) > target && hi < 1e30 && guard++ < 200) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (above_at(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  NpSplit split = np_split(omega, tau, hi, band_at(hi));
  double c = 0.0;
  if (split.mass_band > 1e-300) {
    c = std::clamp((target - split.mass_above) / split.mass_band, 0.0, 1.0);
  }
  NpOutcome out;
  out.lambda = split.p_above + c * split.p_band;
  out.threshold = hi;
  double alpha = split.mass_above + c * split.mass_band;
  if (alpha < target - 1e-8) return std::nullopt;  // band missed the crossing
  double beta = std::max(0.0, (out.lambda * tau).trace().real());
  out.value = -log2_guarded(beta);
  return out;
}

// `scale` multiplies the objective only; the optimal test is unchanged while
// the reported error mass and threshold are mapped back to scale one.
OneShotResult d_hypo_sdp_scaled(const Matrix& omega, const Matrix& tau, double eps,
                                double scale) {
  long d = omega.rows();
  // Blocks: 0 Lambda, 1 I - Lambda, 2 scalar slack s with Tr[Lambda omega] - s = 1 - eps.
  SdpProblem prob({d, d, 1});
  for (long i = 0; i < d; ++i) {
    for (long j = i; j < d; ++j) {
      long re = prob.new_row(i == j ? 1.0 : 0.0);
      prob.coeff(re, 0, i, j, 1.0);
      prob.coeff(re, 1, i, j, 1.0);
      if (i != j) {
        long im = prob.new_row(0.0);
        prob.coeff(im, 0, i, j, Complex(0, 1));
        prob.coeff(im, 1, i, j, Complex(0, 1));
      }
    }
  }
  long mass_row = prob.new_row(1.0 - eps);
  prob.coeff_dense(mass_row, 0, omega);
  prob.coeff(mass_row, 2, 0, 0, -1.0);
  prob.objective_dense(0, Matrix(scale * tau));

  // The log-domain value amplifies absolute error in the optimal mass, so ask
  // for much tighter residuals than the defaults; these small well-scaled
  // problems reach them in a couple of extra steps. Fall back to the default
  // request if a degenerate instance cannot.
  SdpOptions opts;
  opts.feas_tol = 1e-10;
  opts.gap_tol = 1e-10;
  SdpResult res = solve_sdp(prob, opts);
  if (!res.ok()) res = solve_sdp(prob);
  if (!res.ok()) {
    throw SolverError(std::string("hypothesis-testing SDP failed: ") + to_string(res.status));
  }
  OneShotResult out;
  out.value = -log2_guarded(std::max(0.0, res.primal_obj / scale));
  out.certified = true;
  out.lower_bound = out.value;
  out.upper_bound = out.value;
  out.threshold = res.y(mass_row) / scale;
  out.test_operator = res.x[0];
  out.spec = {eps, SmoothingMethod::kExactSdp};
  return out;
}

OneShotResult d_hypo_via_sdp(const Matrix& omega, const Matrix& tau, double eps) {
  OneShotResult out = d_hypo_sdp_scaled(omega, tau, eps, 1.0);
  // A small optimal error mass is resolved only to the solver's normalized gap
  // (absolute slack ~1e-8), which is coarse relative to the mass itself.
  // Re-solving with the objective rescaled to an O(1) optimum turns the same
  // stopping rule into a relative-accuracy guarantee.
  double beta = std::pow(2.0, -out.value);
  if (beta > 1e-30 && beta < 0.3) out = d_hypo_sdp_scaled(omega, tau, eps, 1.0 / beta);
  return out;
}

// ---------------------------------------------------------------------------
// Purified-distance ball as a semidefinite block.
//
// For a normalized center rho with spectral decomposition V diag(w) V^T
// restricted to its support (rank r), a subnormalized rho-bar satisfies
// P(rho-bar, rho) <= eps  iff  sqrt(F(rho-bar, rho)) >= sqrt(1 - eps^2), and
// the fidelity root is the optimal value of
//     max Re Tr[V G]  over  [[rho-bar, G], [G^dagger, diag(w)]] >= 0,
// so ball membership becomes one linear inequality on the joint block.
// ---------------------------------------------------------------------------

class BallConstraint {
 public:
  BallConstraint(const Matrix& center, double eps) : d_(center.rows()) {
    if (std::abs(center.trace().real() - 1.0) > tol::validate) {
      throw ValidationError("smoothing center must have unit trace");
    }
    require_eps(eps);
    HermEig es = herm_eig(center);
    double cut = tol::psd_clamp * std::max(1.0, es.values.cwiseAbs().maxCoeff());
    std::vector<long> keep;
    for (long i = 0; i < d_; ++i) {
      if (es.values(i) > cut) keep.push_back(i);
    }
    r_ = static_cast<long>(keep.size());
    basis_ = Matrix(d_, r_);
    weights_ = RealVector(r_);
    for (long k = 0; k < r_; ++k) {
      basis_.col(k) = es.vectors.col(keep[static_cast<size_t>(k)]);
      weights_(k) = es.values(keep[static_cast<size_t>(k)]);
    }
    f_req_ = std::sqrt(std::max(0.0, 1.0 - eps * eps));
  }

  long fid_dim() const { return d_ + r_; }
  long state_dim() const { return d_; }

  // fid_blk must have dimension fid_dim(); ball_slack and trace_slack are 1x1
  // blocks. The smoothing state is the top-left d x d corner of fid_blk.
  void add_rows(SdpProblem& prob, int fid_blk, int ball_slack, int trace_slack) const {
    Matrix corner = Matrix::Zero(r_, r_);
    for (long k = 0; k < r_; ++k) corner(k, k) = weights_(k);
    prob.fix_submatrix(fid_blk, d_, corner);

    long ball = prob.new_row(f_req_);
    for (long i = 0; i < d_; ++i) {
      for (long k = 0; k < r_; ++k) {
        Complex v = 0.5 * basis_(i, k);
        if (std::abs(v) > 0.0) prob.coeff(ball, fid_blk, i, d_ + k, v);
      }
    }
    prob.coeff(ball, ball_slack, 0, 0, -1.0);

    long tr = prob.new_row(1.0);
    for (long i = 0; i < d_; ++i) prob.coeff(tr, fid_blk, i, i, 1.0);
    prob.coeff(tr, trace_slack, 0, 0, 1.0);
  }

  Matrix state(const SdpResult& res, int fid_blk) const {
    return clamp_psd(res.x[static_cast<size_t>(fid_blk)].topLeftCorner(d_, d_));
  }

 private:
  long d_ = 0, r_ = 0;
  Matrix basis_;
  RealVector weights_;
  double f_req_ = 1.0;
};

// ---------------------------------------------------------------------------
// Smoothed max-relative entropy core: min lambda s.t. rho-bar in ball,
// rho-bar <= lambda * tau. Exact joint SDP; also reused by the alternating
// heuristic for the smoothed max-mutual information.
// ---------------------------------------------------------------------------

struct SmoothDmaxCore {
  SdpStatus status = SdpStatus::kNumerical;
  double lambda = kInf;
  Matrix state;
};

SmoothDmaxCore smooth_dmax_core(const Matrix& center, const Matrix& tau, double eps) {
  BallConstraint ball(center, eps);
  long d = center.rows();
  // Blocks: 0 fidelity block, 1 slack S = lambda*tau - rho-bar, 2 lambda,
  //         3 ball slack, 4 trace slack.
  SdpProblem prob({ball.fid_dim(), d, 1, 1, 1});
  ball.add_rows(prob, 0, 3, 4);
  for (long i = 0; i < d; ++i) {
    for (long j = i; j < d; ++j) {
      Complex t = tau(i, j);
      long re = prob.new_row(0.0);
      prob.coeff(re, 1, i, j, 1.0);
      prob.coeff(re, 0, i, j, 1.0);
      double re_coeff = (i == j) ? -t.real() : -2.0 * t.real();
      if (re_coeff != 0.0) prob.coeff(re, 2, 0, 0, re_coeff);
      if (i != j) {
        long im = prob.new_row(0.0);
        prob.coeff(im, 1, i, j, Complex(0, 1));
        prob.coeff(im, 0, i, j, Complex(0, 1));
        if (t.imag() != 0.0) prob.coeff(im, 2, 0, 0, -2.0 * t.imag());
      }
    }
  }
  prob.objective(2, 0, 0, 1.0);

  SdpResult res = solve_sdp(prob);
  SmoothDmaxCore out;
  out.status = res.status;
  if (res.status == SdpStatus::kOptimal) {
    out.lambda = res.primal_obj;
    out.state = ball.state(res, 0);
  }
  return out;
}

// Minimizes <cost, rho-bar> over the eps-ball around `center` (exact SDP).
struct BallLinearMin {
  SdpStatus status = SdpStatus::kNumerical;
  double value = kInf;
  Matrix state;
};

BallLinearMin minimize_linear_over_ball(const Matrix& center, const Matrix& cost, double eps) {
  BallConstraint ball(center, eps);
  long d = center.rows();
  SdpProblem prob({ball.fid_dim(), 1, 1});
  ball.add_rows(prob, 0, 1, 2);
  Matrix padded = Matrix::Zero(ball.fid_dim(), ball.fid_dim());
  padded.topLeftCorner(d, d) = cost;
  prob.objective_dense(0, padded);
  SdpResult res = solve_sdp(prob);
  BallLinearMin out;
  out.status = res.status;
  if (res.status == SdpStatus::kOptimal) {
    out.value = res.primal_obj;
    out.state = ball.state(res, 0);
  }
  return out;
}

// Gradient of rho-bar -> sqrt(F(rho-bar, tau)) = Tr sqrt(tau^1/2 rho-bar tau^1/2):
// (1/2) tau^1/2 (tau^1/2 rho-bar tau^1/2)^{-1/2} tau^1/2 (pseudo-inverse on the
// numerical support).
Matrix fidelity_root_gradient(const Matrix& rho_bar, const Matrix& tau) {
  Matrix s = sqrt_psd(tau);
  Matrix m = s * rho_bar * s;
  double scale = std::max(1.0, op_norm_herm(m));
  Matrix mis = inv_sqrt_psd(m, 1e-12 * scale);
  return 0.5 * s * mis * s;
}

// ---------------------------------------------------------------------------
// Conditional-entropy SDPs.
// ---------------------------------------------------------------------------

struct HminMatrixOut {
  double value;
  Matrix sigma;  // normalized optimizer on B
};

// -log2 min{ Tr[Sigma] : rho <= I_A (x) Sigma_B } with rho laid out as A (x) B.
HminMatrixOut h_min_matrix(const Matrix& rho, long da, long db) {
  if (db == 1) {
    HminMatrixOut out;
    out.value = -log2_guarded(op_norm_herm(rho));
    out.sigma = Matrix::Identity(1, 1);
    return out;
  }
  long dd = da * db;
  // Blocks: 0 Sigma, 1 slack S = I (x) Sigma - rho.
  SdpProblem prob({db, dd});
  for (long i = 0; i < dd; ++i) {
    long ai = i / db, bi = i % db;
    for (long j = i; j < dd; ++j) {
      long aj = j / db, bj = j % db;
      Complex r = rho(i, j);
      long re = prob.new_row(i == j ? -r.real() : -2.0 * r.real());
      prob.coeff(re, 1, i, j, 1.0);
      if (ai == aj) prob.coeff(re, 0, bi, bj, -1.0);
      if (i != j) {
        long im = prob.new_row(-2.0 * r.imag());
        prob.coeff(im, 1, i, j, Complex(0, 1));
        if (ai == aj) prob.coeff(im, 0, bi, bj, Complex(0, -1));
      }
    }
  }
  for (long b = 0; b < db; ++b) prob.objective(0, b, b, 1.0);
  SdpResult res = solve_sdp(prob);
  if (!res.ok()) {
    throw SolverError(std::string("min-conditional-entropy SDP failed: ") + to_string(res.status));
  }
  HminMatrixOut out;
  out.value = -log2_guarded(std::max(0.0, res.primal_obj));
  Matrix sigma = clamp_psd(res.x[0]);
  double tr = sigma.trace().real();
  out.sigma = (tr > 0.0) ? Matrix(sigma / tr) : Matrix(Matrix::Identity(db, db) / double(db));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API.
// ---------------------------------------------------------------------------

OneShotResult d_hypo(const DensityOperator& omega, const DensityOperator& tau, double eps) {
  require_same_register(omega, tau);
  require_normalized(omega, "first argument");
  require_normalized(tau, "second argument");
  require_eps(eps);

  std::optional<NpOutcome> np = d_hypo_neyman_pearson(omega.matrix(), tau.matrix(), eps);
  if (!np.has_value()) {
    return d_hypo_sdp(omega, tau, eps);
  }
  OneShotResult out;
  out.value = np->value;
  out.certified = true;
  out.lower_bound = out.value;
  out.upper_bound = out.value;
  out.threshold = np->threshold;
  out.test_operator = np->lambda;
  out.spec = {eps, SmoothingMethod::kExactSdp};
  return out;
}

OneShotResult d_hypo_sdp(const DensityOperator& omega, const DensityOperator& tau, double eps) {
  require_same_register(omega, tau);
  require_normalized(omega, "first argument");
  require_normalized(tau, "second argument");
  require_eps(eps);
  return d_hypo_via_sdp(omega.matrix(), tau.matrix(), eps);
}

double d_max(const DensityOperator& omega, const DensityOperator& tau, double support_tol) {
  require_same_register(omega, tau);
  DmaxMatrixEval ev = d_max_matrix(omega.matrix(), tau.matrix(), support_tol, support_tol);
  if (std::isfinite(ev.value)) {
    double floor = d_min(omega, tau);
    if (std::isfinite(floor) && ev.value < floor - 1e-9) {
      throw SolverError("max-relative entropy fell below min-relative entropy");
    }
  }
  return ev.value;
}

double d_min(const DensityOperator& omega, const DensityOperator& tau) {
  require_same_register(omega, tau);
  return d_min_matrix(omega.matrix(), tau.matrix());
}

OneShotResult d_max_smooth(const DensityOperator& omega, const DensityOperator& tau, double eps) {
  require_same_register(omega, tau);
  require_normalized(omega, "first argument");
  require_eps(eps);

  OneShotResult out;
  out.spec = {eps, SmoothingMethod::kExactSdp};
  if (eps == 0.0) {
    out.value = d_max(omega, tau);
    out.certified = true;
    out.lower_bound = out.value;
    out.upper_bound = out.value;
    out.smoothing_state = omega.matrix();
    return out;
  }
  SmoothDmaxCore core = smooth_dmax_core(omega.matrix(), tau.matrix(), eps);
  if (core.status == SdpStatus::kPrimalInfeasible) {
    out.value = kInf;
    out.certified = true;
    out.lower_bound = kInf;
    out.upper_bound = kInf;
    return out;
  }
  if (core.status != SdpStatus::kOptimal) {
    throw SolverError(std::string("smoothed max-relative-entropy SDP failed: ") +
                      to_string(core.status));
  }
  out.value = log2_guarded(core.lambda);
  out.certified = true;
  out.lower_bound = out.value;
  out.upper_bound = out.value;
  out.smoothing_state = core.state;
  return out;
}

OneShotResult d_min_smooth(const DensityOperator& omega, const DensityOperator& tau, double eps) {
  require_same_register(omega, tau);
  require_normalized(omega, "first argument");
  require_eps(eps);

  OneShotResult out;
  out.spec = {eps, SmoothingMethod::kAlternatingHeuristic};
  const Matrix& center = omega.matrix();
  const Matrix& ref = tau.matrix();
  if (eps == 0.0) {
    out.value = d_min_matrix(center, ref);
    out.certified = true;
    out.lower_bound = out.value;
    out.upper_bound = out.value;
    out.smoothing_state = center;
    out.spec.method = SmoothingMethod::kExactSdp;
    return out;
  }

  // Certified upper envelope: F >= Tr[rho-bar tau] pointwise, so
  // sup -log2 F <= -log2 min Tr[rho-bar tau] (exact linear SDP over the ball).
  BallLinearMin relax = minimize_linear_over_ball(center, ref, eps);
  if (relax.status != SdpStatus::kOptimal) {
    throw SolverError(std::string("ball overlap relaxation failed: ") + to_string(relax.status));
  }
  out.upper_bound = -log2_guarded(std::max(0.0, relax.value));

  // Feasible candidates; the value is the best certified feasible point.
  std::vector<Matrix> candidates;
  candidates.push_back(center);
  candidates.push_back((1.0 - eps * eps) * center);
  candidates.push_back(relax.state);
  long d = center.rows();
  Matrix mixed = (1.0 - 0.5 * eps * eps) * center +
                 (0.5 * eps * eps) * Matrix(Matrix::Identity(d, d) / double(d));
  candidates.push_back(mixed);

  // Conditional-gradient descent on sqrt(F): minimizing a concave functional,
  // so jumping to the linearization minimizer decreases it monotonically.
  std::vector<Matrix> starts = candidates;
  for (const Matrix& s0 : starts) {
    Matrix cur = s0;
    for (int it = 0; it < 3; ++it) {
      Matrix grad = fidelity_root_gradient(cur, ref);
      BallLinearMin step = minimize_linear_over_ball(center, grad, eps);
      if (step.status != SdpStatus::kOptimal) break;
      cur = step.state;
      candidates.push_back(cur);
    }
  }

  const DensityOperator& center_state = omega;
  out.value = -kInf;
  for (const Matrix& cand : candidates) {
    Matrix c = clamp_psd(cand);
    double tr = c.trace().real();
    if (tr > 1.0) c /= tr;
    DensityOperator cs(c, omega.reg(), 1e-6);
    if (!in_epsilon_ball(cs, center_state, eps, tol::artifact)) continue;
    double v = d_min_matrix(c, ref);
    if (v > out.value) {
      out.value = v;
      out.smoothing_state = c;
    }
  }
  out.lower_bound = out.value;
  out.certified = (out.upper_bound - out.lower_bound <= kEnvelopeTol) ||
                  (!std::isfinite(out.lower_bound) && !std::isfinite(out.upper_bound) &&
                   out.lower_bound > 0 && out.upper_bound > 0);
  return out;
}

OneShotResult h_min(const DensityOperator& rho, const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  require_disjoint_groups(a, b, /*allow_empty_b=*/true);
  OrderedState os = restrict_and_order(rho, a, b);
  HminMatrixOut hm = h_min_matrix(os.mat, os.dim_a, os.dim_b);
  OneShotResult out;
  out.value = hm.value;
  out.certified = true;
  out.lower_bound = out.value;
  out.upper_bound = out.value;
  out.conditioning_state = hm.sigma;
  out.spec = {0.0, SmoothingMethod::kExactSdp};
  return out;
}

OneShotResult h_max(const DensityOperator& rho, const std::vector<std::string>& a,
                    const std::vector<std::string>& b) {
  require_disjoint_groups(a, b, /*allow_empty_b=*/true);
  OrderedState os = restrict_and_order(rho, a, b);
  OneShotResult out;
  out.spec = {0.0, SmoothingMethod::kExactSdp};
  out.certified = true;

  if (os.dim_b == 1) {
    HermEig es = herm_eig(os.mat);
    double root_sum = 0.0;
    for (long i = 0; i < es.values.size(); ++i) {
      root_sum += std::sqrt(std::max(0.0, es.values(i)));
    }
    out.value = 2.0 * log2_guarded(root_sum);
    out.lower_bound = out.value;
    out.upper_bound = out.value;
    out.conditioning_state = Matrix::Identity(1, 1);
    return out;
  }

  long dd = os.dim_a * os.dim_b;
  long db = os.dim_b;
  HermEig es = herm_eig(os.mat);
  double cut = tol::psd_clamp * std::max(1.0, es.values.cwiseAbs().maxCoeff());
  std::vector<long> keep;
  for (long i = 0; i < dd; ++i) {
    if (es.values(i) > cut) keep.push_back(i);
  }
  long r = static_cast<long>(keep.size());

  // Blocks: 0 fidelity block [[diag(w), G], [G^dagger, Y]] with Y tied to
  // I_A (x) sigma, 1 sigma.
  SdpProblem prob({r + dd, db});
  Matrix corner = Matrix::Zero(r, r);
  for (long k = 0; k < r; ++k) corner(k, k) = es.values(keep[static_cast<size_t>(k)]);
  prob.fix_submatrix(0, 0, corner);
  for (long i = 0; i < dd; ++i) {
    long ai = i / db, bi = i % db;
    for (long j = i; j < dd; ++j) {
      long aj = j / db, bj = j % db;
      long re = prob.new_row(0.0);
      prob.coeff(re, 0, r + i, r + j, 1.0);
      if (ai == aj) prob.coeff(re, 1, bi, bj, -1.0);
      if (i != j) {
        long im = prob.new_row(0.0);
        prob.coeff(im, 0, r + i, r + j, Complex(0, 1));
        if (ai == aj) prob.coeff(im, 1, bi, bj, Complex(0, -1));
      }
    }
  }
  long tr = prob.new_row(1.0);
  for (long b = 0; b < db; ++b) prob.coeff(tr, 1, b, b, 1.0);
  for (long k = 0; k < r; ++k) {
    for (long i = 0; i < dd; ++i) {
      Complex v = -0.5 * std::conj(es.vectors(i, keep[static_cast<size_t>(k)]));
      if (std::abs(v) > 0.0) prob.objective(0, k, r + i, v);
    }
  }

  SdpResult res = solve_sdp(prob);
  if (!res.ok()) {
    throw SolverError(std::string("max-conditional-entropy SDP failed: ") + to_string(res.status));
  }
  double root = std::max(0.0, -res.primal_obj);
  out.value = 2.0 * log2_guarded(root);
  out.lower_bound = out.value;
  out.upper_bound = out.value;
  Matrix sigma = clamp_psd(res.x[1]);
  double strace = sigma.trace().real();
  out.conditioning_state = (strace > 0.0) ? Matrix(sigma / strace) : sigma;
  return out;
}

OneShotResult h_min_smooth(const DensityOperator& rho, const std::vector<std::string>& a,
                           const std::vector<std::string>& b, double eps) {
  require_disjoint_groups(a, b, /*allow_empty_b=*/true);
  require_eps(eps);
  if (eps == 0.0) return h_min(rho, a, b);
  OrderedState os = restrict_and_order(rho, a, b);
  require_normalized(rho, "state");  // ball centers must be normalized
  long dd = os.dim_a * os.dim_b;
  long db = os.dim_b;

  BallConstraint ball(os.mat, eps);
  // Blocks: 0 fidelity/ball block (rho-bar in the corner), 1 Sigma,
  //         2 slack S = I (x) Sigma - rho-bar, 3 ball slack, 4 trace slack.
  SdpProblem prob({ball.fid_dim(), db, dd, 1, 1});
  ball.add_rows(prob, 0, 3, 4);
  for (long i = 0; i < dd; ++i) {
    long ai = i / db, bi = i % db;
    for (long j = i; j < dd; ++j) {
      long aj = j / db, bj = j % db;
      long re = prob.new_row(0.0);
      prob.coeff(re, 2, i, j, 1.0);
      prob.coeff(re, 0, i, j, 1.0);
      if (ai == aj) prob.coeff(re, 1, bi, bj, -1.0);
      if (i != j) {
        long im = prob.new_row(0.0);
        prob.coeff(im, 2, i, j, Complex(0, 1));
        prob.coeff(im, 0, i, j, Complex(0, 1));
        if (ai == aj) prob.coeff(im, 1, bi, bj, Complex(0, -1));
      }
    }
  }
  for (long bq = 0; bq < db; ++bq) prob.objective(1, bq, bq, 1.0);

  SdpResult res = solve_sdp(prob);
  if (!res.ok()) {
    throw SolverError(std::string("smoothed min-conditional-entropy SDP failed: ") +
                      to_string(res.status));
  }
  OneShotResult out;
  out.value = -log2_guarded(std::max(0.0, res.primal_obj));
  out.certified = true;
  out.lower_bound = out.value;
  out.upper_bound = out.value;
  out.smoothing_state = ball.state(res, 0);
  Matrix sigma = clamp_psd(res.x[1]);
  double strace = sigma.trace().real();
  out.conditioning_state = (strace > 0.0) ? Matrix(sigma / strace) : sigma;
  out.spec = {eps, SmoothingMethod::kExactSdp};
  return out;
}

OneShotResult h_max_smooth(const DensityOperator& rho, const std::vector<std::string>& a,
                           const std::vector<std::string>& b, double eps) {
  require_disjoint_groups(a, b, /*allow_empty_b=*/true);
  require_eps(eps);
  if (eps == 0.0) return h_max(rho, a, b);
  require_normalized(rho, "state");

  DensityOperator cut = marginal(rho, joined(a, b));
  std::string pur = "_C";
  {
    const std::vector<std::string> present = cut.reg().labels();
    std::set<std::string> labels(present.begin(), present.end());
    while (labels.count(pur) > 0) pur += "_";
  }
  PureState psi = purify(cut, pur);
  DensityOperator rho_ac = marginal(psi.to_density(), joined(a, {pur}));
  OneShotResult dual = h_min_smooth(rho_ac, a, {pur}, eps);

  OneShotResult out;
  out.value = -dual.value;
  out.certified = dual.certified;
  out.lower_bound = -dual.upper_bound;
  out.upper_bound = -dual.lower_bound;
  out.smoothing_state = dual.smoothing_state;  // dual-side optimizer on (a, purifier)
  out.spec = {eps, SmoothingMethod::kExactSdp};
  return out;
}

OneShotResult i_hypo(const DensityOperator& rho, const std::vector<std::string>& a,
                     const std::vector<std::string>& b, double eps) {
  require_disjoint_groups(a, b, /*allow_empty_b=*/false);
  DensityOperator joint = marginal(rho, joined(a, b));
  DensityOperator product = tensor(marginal(joint, a), marginal(joint, b));
  return d_hypo(joint, product, eps);
}

OneShotResult i_max_tilde(const DensityOperator& rho, const std::vector<std::string>& smoothed,
                          const std::vector<std::string>& fixed, double eps) {
  require_disjoint_groups(fixed, smoothed, /*allow_empty_b=*/false);
  require_eps(eps);
  require_normalized(rho, "state");

  // Lay the state out as (fixed) (x) (smoothed) = A (x) B.
  OrderedState os = restrict_and_order(rho, fixed, smoothed);
  long da = os.dim_a, db = os.dim_b, dd = da * db;
  std::vector<int> slot_dims = {static_cast<int>(da), static_cast<int>(db)};
  Matrix rho_a = partial_trace_raw(os.mat, slot_dims, {false, true});
  Matrix rho_b = partial_trace_raw(os.mat, slot_dims, {true, false});

  OneShotResult out;
  out.spec = {eps, SmoothingMethod::kExactSdp};
  double unsmoothed = d_max_matrix(os.mat, kron(rho_a, rho_b), 1e-12, tol::support).value;
  if (eps == 0.0) {
    out.value = unsmoothed;
    out.certified = true;
    out.lower_bound = unsmoothed;
    out.upper_bound = unsmoothed;
    out.smoothing_state = os.mat;
    out.conditioning_state = rho_b;
    return out;
  }

  // Both programs below share the block layout
  //   0 fidelity embed of rho-bar, 1 Y, 2 slack S = rho_A (x) Y - rho-bar,
  //   3 ball slack, 4 trace slack
  // and these rows forcing S + rho-bar - rho_A (x) Y = 0 entrywise.
  auto add_dominance_rows = [&](SdpProblem& prob) {
    for (long i = 0; i < dd; ++i) {
      long ai = i / db, bi = i % db;
      for (long j = i; j < dd; ++j) {
        long aj = j / db, bj = j % db;
        Complex ra = rho_a(ai, aj);
        long re = prob.new_row(0.0);
        prob.coeff(re, 2, i, j, 1.0);
        prob.coeff(re, 0, i, j, 1.0);
        if (bi != bj) {
          if (std::abs(ra) > 0.0) prob.coeff(re, 1, bi, bj, -std::conj(ra));
        } else if (i == j) {
          if (ra.real() != 0.0) prob.coeff(re, 1, bi, bi, -ra.real());
        } else {
          if (ra.real() != 0.0) prob.coeff(re, 1, bi, bi, -2.0 * ra.real());
        }
        if (i != j) {
          long im = prob.new_row(0.0);
          prob.coeff(im, 2, i, j, Complex(0, 1));
          prob.coeff(im, 0, i, j, Complex(0, 1));
          if (bi != bj) {
            if (std::abs(ra) > 0.0) prob.coeff(im, 1, bi, bj, Complex(0, -1) * std::conj(ra));
          } else {
            if (ra.imag() != 0.0) prob.coeff(im, 1, bi, bi, -2.0 * ra.imag());
          }
        }
      }
    }
  };

  // Certified lower bound: relax lambda * rho'_B to a free PSD matrix Y_B;
  // an optimal (rho', lambda) yields the feasible Y = lambda rho'_B with
  // Tr Y <= lambda, so log2 min Tr Y never exceeds the true value. The value
  // is also never negative: tracing rho' <= lambda rho_A (x) rho'_B gives
  // lambda >= 1 for any subnormalized rho'.
  {
    BallConstraint ball(os.mat, eps);
    SdpProblem prob({ball.fid_dim(), db, dd, 1, 1});
    ball.add_rows(prob, 0, 3, 4);
    add_dominance_rows(prob);
    for (long bq = 0; bq < db; ++bq) prob.objective(1, bq, bq, 1.0);
    SdpResult res = solve_sdp(prob);
    if (!res.ok()) {
      throw SolverError(std::string("max-mutual-information relaxation failed: ") +
                        to_string(res.status));
    }
    out.lower_bound = std::max(0.0, log2_guarded(std::max(0.0, res.primal_obj)));
  }

  // At any fixed level lambda the constraint rho-bar <= lambda rho_A (x)
  // Tr_A(rho-bar) is linear in rho-bar (add rows tying Y = lambda * rho-bar_B
  // to the dominance rows above), so the objective is quasiconvex over the
  // ball and bisection on the level converges to the global optimum. A probe
  // counts as feasible only after the returned state verifies in the ball and
  // re-evaluates exactly against its own marginal; an infeasible probe's
  // improving-ray certificate (checked inside the solver) raises the lower
  // bound. Any other outcome stops the search with the bracket reached.
  DensityOperator center_state(os.mat, SubsystemRegister({{"_A", static_cast<int>(da)},
                                                          {"_B", static_cast<int>(db)}}));
  out.value = unsmoothed;
  out.smoothing_state = os.mat;
  out.conditioning_state = rho_b;
  double lo = std::max(1.0, std::pow(2.0, out.lower_bound));
  double hi = std::pow(2.0, unsmoothed);
  for (int probe = 0; probe < 64 && hi > lo * (1.0 + 7e-10); ++probe) {
    double lam = std::sqrt(lo * hi);
    BallConstraint ball(os.mat, eps);
    SdpProblem prob({ball.fid_dim(), db, dd, 1, 1});
    ball.add_rows(prob, 0, 3, 4);
    add_dominance_rows(prob);
    for (long b = 0; b < db; ++b) {
      for (long bp = b; bp < db; ++bp) {
        long re = prob.new_row(0.0);
        if (b == bp) {
          prob.coeff(re, 1, b, b, 1.0);
          for (long a = 0; a < da; ++a) prob.coeff(re, 0, a * db + b, a * db + b, -lam);
        } else {
          prob.coeff(re, 1, b, bp, 0.5);
          long im = prob.new_row(0.0);
          prob.coeff(im, 1, b, bp, Complex(0.0, 0.5));
          for (long a = 0; a < da; ++a) {
            prob.coeff(re, 0, a * db + b, a * db + bp, Complex(-0.5 * lam, 0.0));
            prob.coeff(im, 0, a * db + b, a * db + bp, Complex(0.0, -0.5 * lam));
          }
        }
      }
    }
    prob.objective(4, 0, 0, 1.0);  // any bounded objective; prefer full mass
    SdpResult res = solve_sdp(prob);
    if (res.status == SdpStatus::kPrimalInfeasible) {
      lo = lam;
      out.lower_bound = std::max(out.lower_bound, log2_guarded(lam));
      continue;
    }
    if (res.status != SdpStatus::kOptimal) break;
    Matrix cand = ball.state(res, 0);
    double tr = cand.trace().real();
    if (tr > 1.0) cand /= tr;
    DensityOperator cs(cand, center_state.reg(), 1e-6);
    if (!in_epsilon_ball(cs, center_state, eps, tol::artifact)) break;
    Matrix cand_b = partial_trace_raw(cand, slot_dims, {true, false});
    double v = d_max_matrix(cand, kron(rho_a, cand_b), 1e-10, tol::artifact).value;
    if (!std::isfinite(v) || v > log2_guarded(lam) + 1e-6) break;
    hi = lam;
    if (v < out.value) {
      out.value = v;
      out.smoothing_state = cand;
      double btr = cand_b.trace().real();
      out.conditioning_state = (btr > 0.0) ? Matrix(cand_b / btr) : cand_b;
    }
  }
  out.upper_bound = out.value;
  out.lower_bound = std::min(out.lower_bound, out.value);
  out.certified = (out.upper_bound - out.lower_bound <= kEnvelopeTol);
  return out;
}

}  // namespace entrocap
