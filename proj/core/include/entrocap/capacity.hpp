#pragma once

#include "entrocap/broadcast.hpp"
#include "entrocap/oneshot.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace entrocap {

// ---------------------------------------------------------------------------
// Entanglement-assisted private information of a broadcast channel, computed
// by gradient ascent over pure inputs, plus one-shot and second-order rate
// bounds evaluated on user-supplied input states.
// ---------------------------------------------------------------------------

struct AscentOptions {
  int restarts = 32;           // independent Haar-random starting points
  int max_iterations = 1000;   // per restart
  double gradient_tol = 1e-7;  // Euclidean norm of the real gradient at stop
  std::uint64_t seed = 7;      // master seed; restart i uses the derived stream i
  int threads = 0;             // concurrent restarts; 0 = hardware concurrency
  // Skip the degradability solve and record the channel as degraded. Only for
  // channels known degraded by construction (e.g. tensor products of factors
  // that were already certified degraded).
  bool assume_degraded = false;
};

// Outcome of a multi-restart ascent. `value` is the best objective found and
// `argmax` the attaining unit vector over `argmax_reg` (canonical label
// order, global phase fixed so the largest-magnitude component is real
// positive). `restart_values` holds one final objective per restart in
// restart order (-inf marks a restart that failed); the reported value is
// their maximum, with ties resolved toward the lowest restart index, so the
// result is deterministic in (seed, restarts) regardless of thread count.
//
// The two degradability fields are populated by the broadcast-level wrappers:
// the restriction to pure inputs is exact for degraded channels, so when the
// check does not certify degradedness the value is flagged as a pure-state-
// restricted heuristic (a valid lower bound, possibly not the supremum).
struct CapacityResult {
  double value = 0.0;
  Vector argmax;
  SubsystemRegister argmax_reg;
  double gradient_norm = kInf;  // at argmax
  bool converged = false;       // best restart met gradient_tol
  int restarts_used = 0;
  std::vector<double> restart_values;
  Degradability degradability = Degradability::kUndetermined;
  bool pure_restriction_is_heuristic = true;

  PureState argmax_state() const;  // argmax as a PureState over argmax_reg
};

// One signed von Neumann entropy term: sign * H(subsystems). Subsystem labels
// refer to the output register of the channel being optimized.
struct EntropyTerm {
  std::vector<std::string> subsystems;
  double sign = 1.0;
};

// Maximizes sum_i sign_i H(S_i) over pure input states of `channel` by
// projected gradient ascent with backtracking line search, restarted from
// `opts.restarts` Haar-random vectors. The channel should already contain any
// bystander registers (tensor with an identity) the terms refer to. The
// degradability fields of the result are left at their defaults.
CapacityResult maximize_entropy_combination(const QuantumChannel& channel,
                                            const std::vector<EntropyTerm>& terms,
                                            const AscentOptions& opts = {});

// Objective of the private-information ascent: with x a (not necessarily
// normalized) vector over reference (x) channel-input and omega the channel
// output of the induced pure state,
//   F(x) = I(R; decoding set)_omega - I(R; malicious set)_omega.
// The reference register R has the channel input dimension and carries the
// first label of the form R, R0, R1, ... that avoids the channel's labels;
// the vector layout is the canonical order of that merged register (exposed
// as ea_reference_register). F is invariant under scaling of x.
double ea_objective(const BroadcastChannel& bc, const Vector& x);

// Gradient g of ea_objective with respect to x in the Wirtinger sense:
//   dF = 2 Re <g, dx>,
// i.e. dF/dRe(x_k) = 2 Re(g_k) and dF/dIm(x_k) = 2 Im(g_k). Always orthogonal
// to x (scale invariance).
Vector ea_objective_gradient(const BroadcastChannel& bc, const Vector& x);

// Reference (x) channel-input register over which ea_objective's argument
// lives; equals CapacityResult::argmax_reg of the optimizers below.
SubsystemRegister ea_reference_register(const BroadcastChannel& bc);

// Entanglement-assisted private information
//   sup over pure phi_RA of I(R; decoding)_omega - I(R; malicious)_omega,
// dim R = channel input dimension. Runs check_degraded first (unless
// opts.assume_degraded) to decide whether the pure-input restriction is exact
// or a heuristic; see CapacityResult.
CapacityResult ea_private_information(const BroadcastChannel& bc, const AscentOptions& opts = {});

// Conditional-mutual-information form for the geometry where the decoding set
// is the full output register and the malicious set a strict subset:
//   sup over pure phi_RA of I(R; kept outputs | malicious outputs).
// Validates the geometry and reports the final value through the conditional
// mutual information (an independent evaluation path from the ascent
// objective, to which it is mathematically identical).
CapacityResult cmi_capacity(const BroadcastChannel& bc, const AscentOptions& opts = {});

// Two single-letter optimizations against one joint optimization on the
// tensor product channel. `gap` = joint - (first + second). A gap below zero
// means the joint ascent fell short of the product of the single-letter
// optimizers (an optimizer artifact, reported but tolerated); a gap above
// `tolerance` would witness superadditivity and is flagged.
struct AdditivityReport {
  CapacityResult first;
  CapacityResult second;
  CapacityResult joint;
  double sum_of_parts = 0.0;
  double joint_value = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool superadditivity_flag = false;
};

// Requires both channels certified degraded (the tensor product of degraded
// broadcasts is degraded, so the joint ascent is exact over pure inputs; the
// joint result records that without re-solving). The second channel's labels
// get a numeric suffix to keep the tensor product's label sets disjoint.
AdditivityReport additivity_check(const BroadcastChannel& a, const BroadcastChannel& b,
                                  const AscentOptions& opts = {}, double tolerance = 1e-3);

// ---------------------------------------------------------------------------
// Rate bounds on user-supplied input states.
// ---------------------------------------------------------------------------

enum class BoundKind {
  kAchievableLower,        // one-shot achievable rate (position-based coding)
  kClassicalMessageUpper,  // converse via a classical message register
  kDegradedUpper,          // converse for degraded channels
  kSecondOrder,            // Gaussian second-order expansion of n uses
};
std::string to_string(BoundKind kind);

// Itemized bound evaluation. `terms` lists the named summands (insertion
// order preserved for serialization); `params` echoes the evaluation
// parameters; `certified` is true when every one-shot sub-quantity came back
// certified. `notes` carries human-readable caveats.
struct BoundReport {
  BoundKind kind = BoundKind::kAchievableLower;
  double value = 0.0;
  bool certified = false;
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::pair<std::string, double>> params;
  std::string notes;

  double term(const std::string& name) const;  // throws if absent
};

// One-shot achievable rate of entanglement-assisted private communication
// with decoding error at most eps and secrecy leakage (purified distance to
// an ideal decoupled state) at most delta:
//   I_hypo^{eps-eta1}(R; decoding) - I_max_tilde^{sqrt(delta)-eta2}(malicious; R)
//     - log2(4 eps / eta1^2) - 2 log2(1 / eta2),
// evaluated on the channel output of `rho_ra` (reference labels = labels of
// rho_ra not consumed by the channel input). Also itemizes the message-key
// budget log2(MK) = I_hypo - log2(4 eps/eta1^2) and the key cost
// log2(K) = I_max_tilde + 2 log2(1/eta2), whose difference is the value.
// Requires 0 < eta1 < eps < 1 and 0 < eta2 < sqrt(delta), delta in (0,1).
BoundReport achievable_rate_bound(const BroadcastChannel& bc, const DensityOperator& rho_ra,
                                  double eps, double delta, double eta1, double eta2);

// Upper bound from a classical message register M (state must be classical on
// M; label "M" required):
//   H_min^{sqrt(2 delta)}(M | R, malicious) - H_max^{sqrt(2 eps)}(M | R, decoding),
// evaluated on the channel output of rho_mra. Requires sqrt(2 eps) < 1 and
// sqrt(2 delta) < 1 (eps, delta in [0, 1/2)). The bound holds for every
// feasible code, so the report is for the supplied state only; sweeping
// encodings is the caller's job.
BoundReport classical_message_upper_bound(const BroadcastChannel& bc,
                                          const DensityOperator& rho_mra, double eps,
                                          double delta);

// Upper bound for channels certified degraded, with joint smoothing radius
// s = 3 sqrt(2 eps) + 2 sqrt(2 delta):
//   H_min^s(R | malicious) - H_max^s(R | decoding)
//     - log2[(1 - sqrt(1 - 8 delta)) (1 - sqrt(1 - 8 eps))].
// Requires eps, delta in (0, 1/8) and s < 1. With pure_input_variant = true
// (rho_ra must be pure) the smoothing radius is re-derived from
// eps' = delta' = s, giving radius s' = 5 sqrt(2 s), and both penalty terms
// -log2[...](eps', delta') and -log2[...](eps, delta) are added; this is the
// form whose optimization may be restricted to pure inputs.
BoundReport degraded_upper_bound(const BroadcastChannel& bc, const DensityOperator& rho_ra,
                                 double eps, double delta, bool pure_input_variant = false);

// Gaussian expansion of the rate of n independent uses at decoding error eps
// and secrecy delta:
//   n [I(R;decoding) - I(R;malicious)]
//     + sqrt(n V(R;decoding)) Phi^{-1}(eps) + sqrt(n V(R;malicious)) Phi^{-1}(delta),
// where V(A;B) is the relative-entropy variance of rho_AB against
// rho_A (x) rho_B and Phi^{-1} the standard normal quantile. The remainder of
// logarithmic order is omitted from the value and recorded in `notes`.
BoundReport second_order_rate(const BroadcastChannel& bc, const DensityOperator& rho_ra,
                              double eps, double delta, double n);

}  // namespace entrocap
