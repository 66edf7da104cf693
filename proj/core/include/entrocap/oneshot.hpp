#pragma once

#include "entrocap/sdp.hpp"
#include "entrocap/states.hpp"

#include <string>
#include <vector>

namespace entrocap {

// How a smoothed quantity was obtained. Exact convex / quasiconvex programs
// (and eigenvalue closed forms) report kExactSdp; nonconvex problems attacked
// by candidate descent report kAlternatingHeuristic with certified envelopes.
enum class SmoothingMethod { kExactSdp, kAlternatingHeuristic };

struct SmoothingSpec {
  double eps = 0.0;  // purified-distance radius of the ball, in [0,1)
  SmoothingMethod method = SmoothingMethod::kExactSdp;
};

// Result of a one-shot entropic computation, in bits. Optimizer artifacts are
// exposed so callers (and tests) can re-verify them; each satisfies its
// defining constraints to 1e-7. `certified` is true when the number came from
// a convergent SDP (gap below tolerance), an exact eigenvalue route, or a
// closed form; heuristic values carry certified lower/upper envelopes instead.
struct OneShotResult {
  double value = 0.0;
  bool certified = false;
  double lower_bound = -kInf;  // certified envelope (== value when certified)
  double upper_bound = kInf;   // certified envelope (== value when certified)
  double threshold = std::numeric_limits<double>::quiet_NaN();  // Neyman-Pearson t
  Matrix test_operator;       // Lambda for hypothesis-testing quantities
  Matrix smoothing_state;     // in-ball optimizer rho-bar (layout noted per op)
  Matrix conditioning_state;  // sigma_B-type optimizer
  SmoothingSpec spec;
};

// Hypothesis-testing relative entropy
//   -log2 min{ Tr[Lambda tau] : 0 <= Lambda <= I, Tr[Lambda omega] >= 1-eps }
// for normalized states on a shared register, eps in [0,1). Primary algorithm:
// bisection on the Neyman-Pearson threshold t (Lambda = spectral projector of
// omega - t*tau above zero plus a fractional weight on the boundary
// eigenspace), with the SDP route as automatic fallback. Returns the attaining
// Lambda and the threshold. If enough omega-mass sits on ker(tau) the optimal
// type-II error is zero and the value is +infinity.
OneShotResult d_hypo(const DensityOperator& omega, const DensityOperator& tau, double eps);

// Same quantity solved directly as a semidefinite program (used as an
// independent cross-check of the Neyman-Pearson route).
OneShotResult d_hypo_sdp(const DensityOperator& omega, const DensityOperator& tau, double eps);

// Max-relative entropy log2 min{ lambda : omega <= lambda tau }, computed as
// log2 lambda_max(tau^{-1/2} omega tau^{-1/2}) on supp(tau); +infinity when
// omega places more than support_tol mass outside supp(tau).
double d_max(const DensityOperator& omega, const DensityOperator& tau,
             double support_tol = tol::support);

// Min-relative entropy -log2 F(omega, tau) with F the squared fidelity;
// +infinity for orthogonal supports.
double d_min(const DensityOperator& omega, const DensityOperator& tau);

// Smoothed max-relative entropy: inf over the purified-distance eps-ball of
// subnormalized states around omega (joint SDP; exact). eps = 0 reduces to
// d_max exactly. smoothing_state holds the optimizing ball state.
OneShotResult d_max_smooth(const DensityOperator& omega, const DensityOperator& tau, double eps);

// Smoothed min-relative entropy: sup over the eps-ball of -log2 F(., tau).
// Maximizing a convex functional over a convex set is nonconvex, so the value
// is the best certified feasible point found by multi-start conditional-
// gradient descent on the fidelity; lower_bound/upper_bound bracket the truth
// (upper bound from the SDP relaxation F >= Tr[rho-bar tau]).
OneShotResult d_min_smooth(const DensityOperator& omega, const DensityOperator& tau, double eps);

// Min-conditional entropy -log2 min{ Tr[Sigma] : rho_AB <= I_A (x) Sigma_B }.
// Labels in `a` and `b` must be disjoint; the state is first restricted to
// their union, and `b` may be empty (then -log2 lambda_max(rho_A) exactly).
// conditioning_state holds the optimal normalized sigma_B (b-label order).
OneShotResult h_min(const DensityOperator& rho, const std::vector<std::string>& a,
                    const std::vector<std::string>& b);

// Max-conditional entropy log2 max_sigma F(rho_AB, I_A (x) sigma_B), solved as
// one fidelity SDP jointly over sigma (never via duality, so duality checks
// against h_min stay meaningful). Empty `b` gives log2 ||sqrt(rho_A)||_1^2.
OneShotResult h_max(const DensityOperator& rho, const std::vector<std::string>& a,
                    const std::vector<std::string>& b);

// Smoothed min-conditional entropy: sup over the eps-ball around rho_AB of
// h_min, as one joint SDP (ball membership encoded through a fidelity block
// against the center restricted to its support). eps = 0 calls h_min.
OneShotResult h_min_smooth(const DensityOperator& rho, const std::vector<std::string>& a,
                           const std::vector<std::string>& b, double eps);

// Smoothed max-conditional entropy: inf over the eps-ball of h_max, computed
// through the exact purification duality with the smoothed min-conditional
// entropy of (A | purifier). smoothing_state is the dual-side optimizer over
// (a, purifier) and is reported for provenance only.
OneShotResult h_max_smooth(const DensityOperator& rho, const std::vector<std::string>& a,
                           const std::vector<std::string>& b, double eps);

// Hypothesis-testing mutual information: d_hypo(rho_AB, rho_A (x) rho_B, eps).
OneShotResult i_hypo(const DensityOperator& rho, const std::vector<std::string>& a,
                     const std::vector<std::string>& b, double eps);

// Smoothed max-mutual information with a moving second marginal:
//   inf over rho' in the eps-ball around rho of
//       D_max( rho'_{AB} || rho_A (x) rho'_B ),
// where `fixed` labels the subsystem whose ORIGINAL marginal rho_A enters the
// reference state and `smoothed` labels the one whose marginal follows the
// ball state. Although the objective couples rho' to its own marginal, at any
// fixed level lambda the sublevel set { rho' : rho' <= lambda rho_A (x) rho'_B }
// is a linear matrix inequality in rho', so the objective is quasiconvex and
// bisection over lambda (one semidefinite feasibility problem per probe)
// converges to the global optimum. value is the best feasible point found,
// re-evaluated exactly against its own marginal (never worse than the
// unsmoothed point rho' = rho), and upper_bound equals it; lower_bound
// combines an SDP relaxation (replace lambda * rho'_B by a free PSD matrix),
// the largest level the solver certified infeasible, and the floor of zero.
// certified is true when the envelopes close to 1e-6 (always at eps = 0,
// where the value is the exact unsmoothed max-mutual information).
OneShotResult i_max_tilde(const DensityOperator& rho, const std::vector<std::string>& smoothed,
                          const std::vector<std::string>& fixed, double eps);

}  // namespace entrocap
