#include "entrocap/capacity.hpp"

#include "entrocap/entropies.hpp"
#include "entrocap/linalg.hpp"
#include "entrocap/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

namespace entrocap {

namespace {

// Eigenvalue floor inside matrix logarithms. Along a rank-preserving path the
// first-order variation of a marginal vanishes on its kernel, so the plateau
// value assigned to clamped eigenvalues never enters the directional
// derivative; it only keeps the gradient finite at rank-deficient points.
constexpr double kLogClamp = 1e-18;
// Eigenvalues below this are treated as zero when summing -lambda log lambda.
constexpr double kEntropyFloor = 1e-15;

double entropy_from_values(const RealVector& values) {
  double h = 0.0;
  for (long i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v > kEntropyFloor) h -= v * std::log2(v);
  }
  return h;
}

// Precomputed layout data for one signed entropy term over a subset of the
// output slots: which slots to trace out, and the permutation that embeds an
// operator on the kept slots back into the full output layout.
struct TermInfo {
  double sign = 1.0;
  bool keeps_all = false;
  std::vector<bool> discard;
  std::vector<int> kd_dims;  // dims in [kept..., discarded...] order
  std::vector<int> perm;     // restores canonical slot order from that layout
  long discarded_dim = 1;
};

class AscentEngine {
 public:
  AscentEngine(const QuantumChannel& channel, const std::vector<EntropyTerm>& terms)
      : ch_(channel), out_dims_(channel.out_reg().dims()) {
    if (terms.empty()) throw ValidationError("at least one entropy term is required");
    const auto& out = ch_.out_reg();
    const int slots = out.size();
    for (const EntropyTerm& t : terms) {
      if (t.subsystems.empty())
        throw ValidationError("entropy terms must name at least one subsystem");
      std::set<std::string> seen;
      TermInfo info;
      info.sign = t.sign;
      info.discard.assign(slots, true);
      for (const std::string& l : t.subsystems) {
        if (!out.has(l))
          throw ValidationError("entropy term names unknown output subsystem '" + l + "'");
        if (!seen.insert(l).second)
          throw ValidationError("entropy term repeats subsystem '" + l + "'");
        info.discard[out.index_of(l)] = false;
      }
      std::vector<int> kept, dropped;
      for (int i = 0; i < slots; ++i) (info.discard[i] ? dropped : kept).push_back(i);
      info.keeps_all = dropped.empty();
      for (int s : kept) info.kd_dims.push_back(out_dims_[s]);
      for (int s : dropped) {
        info.kd_dims.push_back(out_dims_[s]);
        info.discarded_dim *= out_dims_[s];
      }
      info.perm.resize(slots);
      std::vector<int> concat = kept;
      concat.insert(concat.end(), dropped.begin(), dropped.end());
      for (int pos = 0; pos < slots; ++pos) info.perm[concat[pos]] = pos;
      terms_.push_back(std::move(info));
    }
  }

  long dim_in() const { return ch_.dim_in(); }
  const QuantumChannel& channel() const { return ch_; }

  // Normalized channel output of the pure state induced by x.
  Matrix output_state(const Vector& x, double* norm_sq = nullptr) const {
    const double s = x.squaredNorm();
    if (!(s > 1e-300)) throw ValidationError("state vector must be nonzero");
    Matrix omega = Matrix::Zero(ch_.dim_out(), ch_.dim_out());
    for (const Matrix& k : ch_.kraus()) {
      const Vector y = k * x;
      omega.noalias() += y * y.adjoint();
    }
    omega /= s;
    if (norm_sq) *norm_sq = s;
    return omega;
  }

  double value(const Vector& x) const {
    const Matrix omega = output_state(x);
    double f = 0.0;
    for (const TermInfo& t : terms_) {
      const Matrix rho = t.keeps_all ? omega : partial_trace_raw(omega, out_dims_, t.discard);
      f += t.sign * entropy_from_values(herm_eig(rho).values);
    }
    return f;
  }

  // Returns the objective and fills `grad` with g such that dF = 2 Re<g, dx>.
  double value_and_gradient(const Vector& x, Vector* grad) const {
    double s = 0.0;
    const Matrix omega = output_state(x, &s);
    const long d = ch_.dim_out();
    double f = 0.0;
    Matrix g_out = Matrix::Zero(d, d);
    for (const TermInfo& t : terms_) {
      const Matrix rho = t.keeps_all ? omega : partial_trace_raw(omega, out_dims_, t.discard);
      const HermEig eg = herm_eig(rho);
      f += t.sign * entropy_from_values(eg.values);
      RealVector lv = eg.values;
      for (long i = 0; i < lv.size(); ++i) lv[i] = std::log2(std::max(lv[i], kLogClamp));
      const Matrix log_rho = eg.vectors * lv.cast<Complex>().asDiagonal() * eg.vectors.adjoint();
      if (t.keeps_all) {
        g_out.noalias() -= t.sign * log_rho;
      } else {
        const Matrix lifted = kron(log_rho, Matrix::Identity(t.discarded_dim, t.discarded_dim));
        g_out.noalias() -= t.sign * permute_subsystems(lifted, t.kd_dims, t.perm);
      }
    }
    const Matrix g_in = ch_.apply_adjoint_matrix(g_out);
    const Vector gx = g_in * x;
    const double mu = x.dot(gx).real() / s;
    *grad = (gx - mu * x) / s;
    return f;
  }

 private:
  const QuantumChannel& ch_;
  std::vector<int> out_dims_;
  std::vector<TermInfo> terms_;
};

struct RestartOutcome {
  double value = -kInf;
  Vector x;
  double grad_norm = kInf;
  bool converged = false;
  bool failed = false;
  std::string error;
};

RestartOutcome run_restart(const AscentEngine& eng, const AscentOptions& opts,
                           std::uint64_t stream) {
  RestartOutcome out;
  CounterRng rng(opts.seed, stream);
  Vector x = rng.haar_vector(eng.dim_in());
  Vector g(eng.dim_in());
  double f = eng.value_and_gradient(x, &g);
  double eta = 1.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double gn2 = g.squaredNorm();
    out.grad_norm = 2.0 * std::sqrt(gn2);
    if (out.grad_norm <= opts.gradient_tol) {
      out.converged = true;
      break;
    }
    eta = std::min(eta * 2.0, 8.0);
    bool accepted = false;
    Vector xn;
    while (eta > 1e-14) {
      xn = (x + eta * g).normalized();
      const double fn = eng.value(xn);
      // Armijo condition; the directional derivative along g is 2 |g|^2 and
      // renormalizing does not change it (the objective is scale invariant).
      if (fn >= f + 0.4 * eta * gn2) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;  // numerically stationary along g
    x = xn;
    f = eng.value_and_gradient(x, &g);
  }
  out.grad_norm = 2.0 * g.norm();
  out.converged = out.converged || out.grad_norm <= opts.gradient_tol;
  out.value = f;
  out.x = std::move(x);
  return out;
}

CapacityResult run_ascent(const AscentEngine& eng, const AscentOptions& opts) {
  if (opts.restarts < 1) throw ValidationError("restarts must be positive");
  if (opts.max_iterations < 1) throw ValidationError("max_iterations must be positive");
  if (!(opts.gradient_tol > 0)) throw ValidationError("gradient_tol must be positive");
  const int n = opts.restarts;
  std::vector<RestartOutcome> outcomes(n);
  auto run_one = [&](int i) {
    try {
      outcomes[i] = run_restart(eng, opts, static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      outcomes[i].failed = true;
      outcomes[i].error = e.what();
    }
  };
  int workers = opts.threads > 0 ? opts.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  int best = -1;
  for (int i = 0; i < n; ++i) {
    if (outcomes[i].failed) continue;
    if (best < 0 || outcomes[i].value > outcomes[best].value) best = i;
  }
  if (best < 0) {
    throw SolverError("every ascent restart failed; first error: " + outcomes[0].error);
  }

  CapacityResult res;
  res.value = outcomes[best].value;
  res.gradient_norm = outcomes[best].grad_norm;
  res.converged = outcomes[best].converged;
  res.restarts_used = n;
  res.restart_values.reserve(n);
  for (const auto& o : outcomes) res.restart_values.push_back(o.failed ? -kInf : o.value);

  // Deterministic global phase: largest-magnitude component real positive.
  Vector x = outcomes[best].x;
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = x[imax];
  if (std::abs(pivot) > 0) x *= std::conj(pivot) / std::abs(pivot);
  res.argmax = std::move(x);
  res.argmax_reg = eng.channel().in_reg();
  return res;
}

// First reference label of the form R, R0, R1, ... avoiding the channel's own
// labels on either side.
std::string reference_label(const BroadcastChannel& bc) {
  std::set<std::string> used;
  for (const auto& l : bc.channel().in_reg().labels()) used.insert(l);
  for (const auto& l : bc.channel().out_reg().labels()) used.insert(l);
  if (!used.count("R")) return "R";
  for (int k = 0;; ++k) {
    std::string cand = "R" + std::to_string(k);
    if (!used.count(cand)) return cand;
  }
}

QuantumChannel lifted_with_reference(const BroadcastChannel& bc, const std::string& ref_label) {
  const int d = static_cast<int>(bc.channel().dim_in());
  return tensor(bc.channel(),
                QuantumChannel::identity(SubsystemRegister::single(ref_label, d)));
}

// F = H(decoding) - H(R, decoding) - H(malicious) + H(R, malicious).
std::vector<EntropyTerm> private_information_terms(const BroadcastChannel& bc,
                                                   const std::string& ref_label) {
  std::vector<std::string> dec = bc.decoding_set();
  std::vector<std::string> mal = bc.malicious_set();
  std::vector<std::string> rdec = dec;
  rdec.push_back(ref_label);
  std::vector<std::string> rmal = mal;
  rmal.push_back(ref_label);
  return {{dec, 1.0}, {rdec, -1.0}, {mal, -1.0}, {rmal, 1.0}};
}

// Shared prologue of the bound evaluators: identifies the reference labels of
// the supplied input state and pushes it through the channel.
struct BoundSetup {
  std::vector<std::string> in_labels;
  std::vector<std::string> ref_labels;  // input labels not consumed by the channel
  DensityOperator omega;
};

BoundSetup push_through_channel(const BroadcastChannel& bc, const DensityOperator& rho,
                                bool strip_message, bool require_reference) {
  std::vector<std::string> in_labels = bc.channel().in_reg().labels();
  for (const std::string& l : in_labels) {
    if (!rho.reg().has(l))
      throw ValidationError("input state is missing the channel input subsystem '" + l + "'");
  }
  std::vector<std::string> ref_labels;
  for (const std::string& l : rho.reg().labels()) {
    if (std::find(in_labels.begin(), in_labels.end(), l) != in_labels.end()) continue;
    if (strip_message && l == "M") continue;
    ref_labels.push_back(l);
  }
  if (strip_message) {
    if (!rho.reg().has("M"))
      throw ValidationError("input state must carry a classical message subsystem labeled 'M'");
    if (std::find(in_labels.begin(), in_labels.end(), "M") != in_labels.end())
      throw ValidationError("the message subsystem 'M' must not be a channel input");
  }
  if (require_reference && ref_labels.empty())
    throw ValidationError("input state must include a reference subsystem besides the channel input");
  DensityOperator omega = apply_channel(bc.channel(), rho, in_labels);
  return BoundSetup{std::move(in_labels), std::move(ref_labels), std::move(omega)};
}

std::vector<std::string> concat_labels(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

}  // namespace

PureState CapacityResult::argmax_state() const { return PureState(argmax, argmax_reg); }

CapacityResult maximize_entropy_combination(const QuantumChannel& channel,
                                            const std::vector<EntropyTerm>& terms,
                                            const AscentOptions& opts) {
  const AscentEngine eng(channel, terms);
  return run_ascent(eng, opts);
}

SubsystemRegister ea_reference_register(const BroadcastChannel& bc) {
  const std::string ref = reference_label(bc);
  const int d = static_cast<int>(bc.channel().dim_in());
  return bc.channel().in_reg().merged(SubsystemRegister::single(ref, d));
}

double ea_objective(const BroadcastChannel& bc, const Vector& x) {
  const std::string ref = reference_label(bc);
  const QuantumChannel lifted = lifted_with_reference(bc, ref);
  if (x.size() != lifted.dim_in())
    throw ValidationError("state vector has the wrong dimension for reference (x) input");
  const AscentEngine eng(lifted, private_information_terms(bc, ref));
  return eng.value(x);
}

Vector ea_objective_gradient(const BroadcastChannel& bc, const Vector& x) {
  const std::string ref = reference_label(bc);
  const QuantumChannel lifted = lifted_with_reference(bc, ref);
  if (x.size() != lifted.dim_in())
    throw ValidationError("state vector has the wrong dimension for reference (x) input");
  const AscentEngine eng(lifted, private_information_terms(bc, ref));
  Vector g(x.size());
  eng.value_and_gradient(x, &g);
  return g;
}

CapacityResult ea_private_information(const BroadcastChannel& bc, const AscentOptions& opts) {
  const Degradability status =
      opts.assume_degraded ? Degradability::kDegraded : check_degraded(bc).status;
  const std::string ref = reference_label(bc);
  const QuantumChannel lifted = lifted_with_reference(bc, ref);
  const AscentEngine eng(lifted, private_information_terms(bc, ref));
  CapacityResult res = run_ascent(eng, opts);
  res.degradability = status;
  res.pure_restriction_is_heuristic = status != Degradability::kDegraded;
  return res;
}

CapacityResult cmi_capacity(const BroadcastChannel& bc, const AscentOptions& opts) {
  const std::vector<std::string> out_labels = bc.channel().out_reg().labels();
  if (bc.decoding_set() != out_labels)
    throw ValidationError(
        "conditional-mutual-information form requires the decoding set to be the full output "
        "register");
  if (bc.malicious_set().size() >= bc.decoding_set().size())
    throw ValidationError(
        "conditional-mutual-information form requires the malicious set to be a strict subset "
        "of the decoding set");

  CapacityResult res = ea_private_information(bc, opts);

  // Independent evaluation of the final value through the conditional mutual
  // information I(R; kept outputs | malicious outputs).
  const std::string ref = reference_label(bc);
  std::vector<std::string> kept;
  const auto& mal = bc.malicious_set();
  for (const std::string& l : out_labels) {
    if (std::find(mal.begin(), mal.end(), l) == mal.end()) kept.push_back(l);
  }
  const QuantumChannel lifted = lifted_with_reference(bc, ref);
  const DensityOperator omega(AscentEngine(lifted, private_information_terms(bc, ref))
                                  .output_state(res.argmax),
                              lifted.out_reg());
  res.value = conditional_mutual_information(omega, {ref}, kept, mal);
  return res;
}

AdditivityReport additivity_check(const BroadcastChannel& a, const BroadcastChannel& b,
                                  const AscentOptions& opts, double tolerance) {
  if (!(tolerance > 0)) throw ValidationError("additivity tolerance must be positive");
  auto certify = [&](const BroadcastChannel& bc, const char* which) {
    const Degradability st =
        opts.assume_degraded ? Degradability::kDegraded : check_degraded(bc).status;
    if (st != Degradability::kDegraded) {
      throw ValidationError(std::string("additivity check requires certified degraded channels; ") +
                            which + " channel came back '" + to_string(st) + "'");
    }
    return st;
  };
  const Degradability da = certify(a, "first");
  const Degradability db = certify(b, "second");

  // Relabel the second channel so the tensor product's label sets stay
  // disjoint. Appending the same suffix to every label must not change the
  // canonical (sorted) order; if it would, try the next suffix.
  std::set<std::string> taken;
  for (const auto& l : a.channel().in_reg().labels()) taken.insert(l);
  for (const auto& l : a.channel().out_reg().labels()) taken.insert(l);
  auto rename = [](const SubsystemRegister& r, const std::string& suffix,
                   SubsystemRegister* out) {
    std::vector<Subsystem> parts;
    parts.reserve(r.parts().size());
    for (const Subsystem& p : r.parts()) parts.push_back({p.label + suffix, p.dim});
    SubsystemRegister renamed(parts);
    for (int i = 0; i < renamed.size(); ++i) {
      if (renamed.part(i).label != r.part(i).label + suffix) return false;
    }
    *out = std::move(renamed);
    return true;
  };
  std::string suffix;
  SubsystemRegister b_in, b_out;
  for (int k = 2; k < 100 && suffix.empty(); ++k) {
    const std::string cand = std::to_string(k);
    SubsystemRegister rin, rout;
    if (!rename(b.channel().in_reg(), cand, &rin)) continue;
    if (!rename(b.channel().out_reg(), cand, &rout)) continue;
    bool collision = false;
    for (const auto& l : rin.labels()) collision = collision || taken.count(l) > 0;
    for (const auto& l : rout.labels()) collision = collision || taken.count(l) > 0;
    if (collision) continue;
    suffix = cand;
    b_in = std::move(rin);
    b_out = std::move(rout);
  }
  if (suffix.empty())
    throw ValidationError("could not find a label suffix keeping the tensor product disjoint");
  const QuantumChannel b_renamed(b.channel().kraus(), b_in, b_out);
  auto suffixed = [&](const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(l + suffix);
    return out;
  };
  const BroadcastChannel joint(tensor(a.channel(), b_renamed),
                               concat_labels(a.decoding_set(), suffixed(b.decoding_set())),
                               concat_labels(a.malicious_set(), suffixed(b.malicious_set())));

  AscentOptions sub = opts;
  sub.assume_degraded = true;  // certified above; tensor of degraded is degraded
  AdditivityReport report;
  sub.seed = opts.seed;
  report.first = ea_private_information(a, sub);
  report.first.degradability = da;
  sub.seed = opts.seed + 1;
  report.second = ea_private_information(b, sub);
  report.second.degradability = db;
  sub.seed = opts.seed + 2;
  report.joint = ea_private_information(joint, sub);

  report.sum_of_parts = report.first.value + report.second.value;
  report.joint_value = report.joint.value;
  report.gap = report.joint_value - report.sum_of_parts;
  report.tolerance = tolerance;
  report.superadditivity_flag = report.gap > tolerance;
  return report;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kAchievableLower:
      return "achievable_lower";
    case BoundKind::kClassicalMessageUpper:
      return "classical_message_upper";
    case BoundKind::kDegradedUpper:
      return "degraded_upper";
    case BoundKind::kSecondOrder:
      return "second_order";
  }
  throw ValidationError("unknown bound kind");
}

double BoundReport::term(const std::string& name) const {
  for (const auto& [key, value] : terms) {
    if (key == name) return value;
  }
  throw ValidationError("bound report has no term named '" + name + "'");
}

BoundReport achievable_rate_bound(const BroadcastChannel& bc, const DensityOperator& rho_ra,
                                  double eps, double delta, double eta1, double eta2) {
  require_finite(eps, "eps");
  require_finite(delta, "delta");
  require_finite(eta1, "eta1");
  require_finite(eta2, "eta2");
  if (!(eps > 0 && eps < 1)) throw ValidationError("eps must lie in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw ValidationError("delta must lie in (0, 1)");
  if (!(eta1 > 0 && eta1 < eps))
    throw ValidationError("eta1 must lie strictly between 0 and eps");
  if (!(eta2 > 0 && eta2 < std::sqrt(delta)))
    throw ValidationError("eta2 must lie strictly between 0 and sqrt(delta)");

  const BoundSetup setup = push_through_channel(bc, rho_ra, false, true);
  const OneShotResult ih = i_hypo(setup.omega, setup.ref_labels, bc.decoding_set(), eps - eta1);
  const OneShotResult im =
      i_max_tilde(setup.omega, bc.malicious_set(), setup.ref_labels, std::sqrt(delta) - eta2);
  const double test_penalty = std::log2(4.0 * eps / (eta1 * eta1));
  const double split_penalty = 2.0 * std::log2(1.0 / eta2);

  BoundReport report;
  report.kind = BoundKind::kAchievableLower;
  report.value = ih.value - im.value - test_penalty - split_penalty;
  report.certified = ih.certified && im.certified;
  report.terms = {{"hypothesis_testing_mi", ih.value},
                  {"max_mi_smoothed", im.value},
                  {"test_penalty", test_penalty},
                  {"split_penalty", split_penalty},
                  {"log2_message_key_pairs", ih.value - test_penalty},
                  {"log2_key_values", im.value + split_penalty}};
  report.params = {{"eps", eps}, {"delta", delta}, {"eta1", eta1}, {"eta2", eta2}};
  report.notes =
      "rate = log2_message_key_pairs - log2_key_values; the smoothed max-mutual-information "
      "term is evaluated at a certified feasible smoothing state, so the rate stays achievable "
      "even when its envelopes did not close";
  return report;
}

BoundReport classical_message_upper_bound(const BroadcastChannel& bc,
                                          const DensityOperator& rho_mra, double eps,
                                          double delta) {
  require_finite(eps, "eps");
  require_finite(delta, "delta");
  if (!(eps >= 0 && std::sqrt(2.0 * eps) < 1.0))
    throw ValidationError("eps must satisfy 0 <= eps and sqrt(2 eps) < 1");
  if (!(delta >= 0 && std::sqrt(2.0 * delta) < 1.0))
    throw ValidationError("delta must satisfy 0 <= delta and sqrt(2 delta) < 1");

  // The bound only applies to encodings that are classical on M: block
  // diagonal in the message basis.
  if (!rho_mra.reg().has("M"))
    throw ValidationError("input state must carry a classical message subsystem labeled 'M'");
  const std::vector<std::string> rest = rho_mra.reg().without({"M"}).labels();
  const Matrix blocks = rho_mra.reordered(concat_labels({"M"}, rest));
  const long dm = rho_mra.reg().dim_of("M");
  const long dr = rho_mra.dim() / dm;
  for (long p = 0; p < dm; ++p) {
    for (long q = 0; q < dm; ++q) {
      if (p == q) continue;
      const double off = blocks.block(p * dr, q * dr, dr, dr).cwiseAbs().maxCoeff();
      if (off > 1e-8)
        throw ValidationError("input state must be classical on M (coherence between message "
                              "values detected)");
    }
  }

  const BoundSetup setup = push_through_channel(bc, rho_mra, true, false);
  const double radius_adversary = std::sqrt(2.0 * delta);
  const double radius_receiver = std::sqrt(2.0 * eps);
  const OneShotResult hmin = h_min_smooth(
      setup.omega, {"M"}, concat_labels(setup.ref_labels, bc.malicious_set()), radius_adversary);
  const OneShotResult hmax = h_max_smooth(
      setup.omega, {"M"}, concat_labels(setup.ref_labels, bc.decoding_set()), radius_receiver);

  BoundReport report;
  report.kind = BoundKind::kClassicalMessageUpper;
  report.value = hmin.value - hmax.value;
  report.certified = hmin.certified && hmax.certified;
  report.terms = {{"min_entropy_message_given_adversary", hmin.value},
                  {"max_entropy_message_given_receiver", hmax.value}};
  report.params = {{"eps", eps},
                   {"delta", delta},
                   {"radius_adversary", radius_adversary},
                   {"radius_receiver", radius_receiver}};
  report.notes = "holds for every feasible code; this report evaluates the supplied encoding only";
  return report;
}

BoundReport degraded_upper_bound(const BroadcastChannel& bc, const DensityOperator& rho_ra,
                                 double eps, double delta, bool pure_input_variant) {
  require_finite(eps, "eps");
  require_finite(delta, "delta");
  if (!(eps > 0 && eps < 0.125)) throw ValidationError("eps must lie in (0, 1/8)");
  if (!(delta > 0 && delta < 0.125)) throw ValidationError("delta must lie in (0, 1/8)");
  const double s = 3.0 * std::sqrt(2.0 * eps) + 2.0 * std::sqrt(2.0 * delta);
  if (!(s < 1.0))
    throw ValidationError("combined smoothing radius 3 sqrt(2 eps) + 2 sqrt(2 delta) must stay "
                          "below one");

  const DegradabilityReport deg = check_degraded(bc);
  if (deg.status != Degradability::kDegraded) {
    throw ValidationError(std::string("this upper bound requires a certified degraded channel; "
                                      "the degradability check came back '") +
                          to_string(deg.status) + "'");
  }

  double radius = s;
  double penalty = converse_penalty(eps, delta);
  double variant_penalty = 0.0;
  if (pure_input_variant) {
    const HermEig eg = herm_eig(rho_ra.matrix());
    if (eg.values[eg.values.size() - 1] < 1.0 - 1e-8)
      throw ValidationError("pure_input_variant requires a pure input state");
    const double eps2 = s;  // re-derived decoding and secrecy parameters coincide
    if (!(eps2 < 0.125))
      throw ValidationError("pure_input_variant needs 3 sqrt(2 eps) + 2 sqrt(2 delta) < 1/8");
    radius = 5.0 * std::sqrt(2.0 * eps2);
    if (!(radius < 1.0))
      throw ValidationError("pure_input_variant smoothing radius must stay below one");
    variant_penalty = converse_penalty(eps2, eps2);
  }

  const BoundSetup setup = push_through_channel(bc, rho_ra, false, true);
  const OneShotResult hmin =
      h_min_smooth(setup.omega, setup.ref_labels, bc.malicious_set(), radius);
  const OneShotResult hmax = h_max_smooth(setup.omega, setup.ref_labels, bc.decoding_set(), radius);

  BoundReport report;
  report.kind = BoundKind::kDegradedUpper;
  report.value = hmin.value - hmax.value + penalty + variant_penalty;
  report.certified = hmin.certified && hmax.certified;
  report.terms = {{"min_entropy_reference_given_adversary", hmin.value},
                  {"max_entropy_reference_given_receiver", hmax.value},
                  {"penalty", penalty}};
  if (pure_input_variant) report.terms.emplace_back("variant_penalty", variant_penalty);
  report.params = {{"eps", eps},
                   {"delta", delta},
                   {"radius", radius},
                   {"pure_input_variant", pure_input_variant ? 1.0 : 0.0}};
  report.notes = pure_input_variant
                     ? "pure-input form: smoothing radius re-derived from the combined radius, "
                       "both penalty terms included"
                     : "holds for every input of a degraded channel at these parameters";
  return report;
}

BoundReport second_order_rate(const BroadcastChannel& bc, const DensityOperator& rho_ra,
                              double eps, double delta, double n) {
  require_finite(eps, "eps");
  require_finite(delta, "delta");
  require_finite(n, "n");
  if (!(eps > 0 && eps < 1)) throw ValidationError("eps must lie in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw ValidationError("delta must lie in (0, 1)");
  if (!(n >= 1)) throw ValidationError("n must be at least 1");

  const BoundSetup setup = push_through_channel(bc, rho_ra, false, true);
  const auto& ref = setup.ref_labels;
  const double mi_receiver = mutual_information(setup.omega, ref, bc.decoding_set());
  const double mi_adversary = mutual_information(setup.omega, ref, bc.malicious_set());
  auto variance_against_product = [&](const std::vector<std::string>& side) {
    const DensityOperator joint = marginal(setup.omega, concat_labels(ref, side));
    const DensityOperator product =
        tensor(marginal(setup.omega, ref), marginal(setup.omega, side));
    return relative_entropy_variance(joint, product);
  };
  const double var_receiver = variance_against_product(bc.decoding_set());
  const double var_adversary = variance_against_product(bc.malicious_set());

  const double first_order = n * (mi_receiver - mi_adversary);
  const double receiver_dispersion = std::sqrt(n * var_receiver) * gaussian_quantile(eps);
  const double adversary_dispersion = std::sqrt(n * var_adversary) * gaussian_quantile(delta);

  BoundReport report;
  report.kind = BoundKind::kSecondOrder;
  report.value = first_order + receiver_dispersion + adversary_dispersion;
  report.certified = true;
  report.terms = {{"first_order", first_order},
                  {"receiver_dispersion", receiver_dispersion},
                  {"adversary_dispersion", adversary_dispersion},
                  {"mi_receiver", mi_receiver},
                  {"mi_adversary", mi_adversary},
                  {"variance_receiver", var_receiver},
                  {"variance_adversary", var_adversary}};
  report.params = {{"eps", eps}, {"delta", delta}, {"n", n}};
  report.notes = "remainder of order log(n) omitted from the value: rate = value + O(log n)";
  return report;
}

}  // namespace entrocap
