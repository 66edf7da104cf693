#pragma once

#include "entrocap/channels.hpp"

#include <optional>
#include <string>
#include <vector>

namespace entrocap {

// One sender, one multi-part output register shared between a decoding group
// (the receiver's systems) and a malicious group (the adversary's systems).
// The two groups are index sets over the same output register and may
// overlap; both must be nonempty subsets of the output labels.
class BroadcastChannel {
 public:
  BroadcastChannel(QuantumChannel channel, std::vector<std::string> decoding_set,
                   std::vector<std::string> malicious_set);

  const QuantumChannel& channel() const { return channel_; }
  const std::vector<std::string>& decoding_set() const { return decoding_; }
  const std::vector<std::string>& malicious_set() const { return malicious_; }

 private:
  QuantumChannel channel_;
  std::vector<std::string> decoding_, malicious_;
};

// Channel keeping only the named output subsystems: its Choi matrix is the
// partial trace of the full Choi over the discarded outputs. `keep` must be a
// nonempty subset of the output labels; the result's output register holds
// the kept labels in canonical order.
QuantumChannel marginal_channel(const BroadcastChannel& bc, const std::vector<std::string>& keep);

enum class Degradability { kDegraded, kNotDegraded, kUndetermined };
const char* to_string(Degradability d);

struct DegradabilityReport {
  Degradability status = Degradability::kUndetermined;
  // Present iff status == kDegraded: a channel from the decoding-marginal
  // output register to the malicious-marginal output register.
  std::optional<QuantumChannel> degrading_map;
  // Operator norm of compose(degrading candidate, decoding marginal) minus
  // the malicious marginal, at the Choi level, recomputed exactly from the
  // extracted candidate.
  double residual = 0.0;
  // Lower bound on the residual achievable by ANY channel from the decoding
  // marginal's output to the malicious marginal's output, discounted by the
  // solve tolerance so it stays on the safe side of the certificate. Zero
  // when the underlying solve did not converge.
  double dual_margin = 0.0;
};

// Decides whether the malicious marginal factors through the decoding
// marginal, i.e. whether some channel T satisfies T(marginal to decoding) =
// (marginal to malicious). The search minimizes the operator-norm residual of
// the Choi-level identity over all channels T (a semidefinite program, exact
// spanning condition with no input sampling); the candidate's residual at or
// below 1e-6 reports degraded, a certified margin at or above 1e-4 reports
// not degraded, anything between is undetermined. T's output dimension equals
// the malicious marginal's dimension exactly.
DegradabilityReport check_degraded(const BroadcastChannel& bc);

// --- Standard examples -----------------------------------------------------
// All constructions are isometric dilations validated at build time; the
// decoding set is {B} and the malicious set {E} unless noted.

// N(rho) = rho_B (x) |0><0|_E for an input of dimension d >= 2.
BroadcastChannel identity_with_trivial_eve(int d = 2);
// Qubit phase flip with probability p to B; the dilating environment goes to E.
BroadcastChannel dephasing_broadcast(double p);
// Qubit amplitude damping with decay gamma to B; environment to E.
BroadcastChannel amplitude_damping_stinespring(double gamma);
// Qubit depolarizing rho -> (1-p) rho + p I/2 to B; 4-dimensional environment to E.
BroadcastChannel depolarizing_stinespring(double p);
// Qutrit-output erasure pair: B receives the input or an erasure flag (with
// probability p), E receives the complementary side.
BroadcastChannel erasure_broadcast(double p);
// Receiver controls the full output of `base` (labels exactly {B, E}) while
// the adversary taps E: decoding {B, E}, malicious {E}.
BroadcastChannel compromised_lab(const QuantumChannel& base);

// Dispatch by name for configuration-driven callers. Names: one of
// identity_with_trivial_eve (param = input dimension, 0 means 2),
// dephasing_broadcast, amplitude_damping_stinespring, depolarizing_stinespring,
// erasure_broadcast (param = probability). compromised_lab is not dispatchable
// here because it takes a base channel; call it directly.
BroadcastChannel channel_zoo(const std::string& name, double param = 0.0);

}  // namespace entrocap
