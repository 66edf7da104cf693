#pragma once

#include "entrocap/states.hpp"

#include <string>
#include <vector>

namespace entrocap {

// Outcome of a relative-entropy evaluation. All entropic quantities in this
// library are measured in bits (base-2 logarithms).
struct EntropyReport {
  // D(omega || tau) in bits; +infinity when the support condition failed.
  double value = 0.0;
  // Whether the mass of omega outside supp(tau) stayed at or below support_tol.
  bool support_ok = true;
  // True when that mass fell inside the warning band (warn_tol, support_tol]:
  // the support condition held, but only marginally.
  bool support_warning = false;
  // Measured mass of omega on the numerical kernel of tau.
  double outside_mass = 0.0;
  double support_tol = tol::support;
  double warn_tol = tol::support_warn;
};

// Quantum relative entropy D(omega || tau) = Tr[omega (log2 omega - log2 tau)].
// Eigenvalues of tau at or below support_tol count as kernel directions; if
// omega places more than support_tol mass on them the result is +infinity
// (support_ok = false). Both inputs must be normalized states on the same
// register. The warning band spans (support_tol * 1e-2, support_tol].
EntropyReport relative_entropy(const DensityOperator& omega, const DensityOperator& tau,
                               double support_tol = tol::support);

// von Neumann entropy H(rho) = -Tr[rho log2 rho] in bits.
double entropy(const DensityOperator& rho);

// H(A|B) = H(AB) - H(B) for disjoint label sets a, b of rho's register.
double conditional_entropy(const DensityOperator& rho, const std::vector<std::string>& a,
                           const std::vector<std::string>& b);

// I(A;B) = H(A) + H(B) - H(AB).
double mutual_information(const DensityOperator& rho, const std::vector<std::string>& a,
                          const std::vector<std::string>& b);

// I(A;B|C) = I(A;BC) - I(A;C), evaluated as H(AC) + H(BC) - H(ABC) - H(C).
double conditional_mutual_information(const DensityOperator& rho,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c);

// Relative entropy variance V(omega || tau) = Tr{omega [log2 omega - log2 tau - D]^2}
// with D = D(omega || tau). Requires supp(omega) within supp(tau); throws
// ValidationError on a support violation.
double relative_entropy_variance(const DensityOperator& omega, const DensityOperator& tau,
                                 double support_tol = tol::support);

// Standard normal CDF Phi(a).
double gaussian_cdf(double a);

// Inverse standard normal CDF; eps must lie in (0,1). Accurate to |error| < 1e-12
// (rational initial guess refined by one Newton step on Phi).
double gaussian_quantile(double eps);

// Binary entropy h2(x) = -x log2 x - (1-x) log2(1-x), x in [0,1].
double binary_entropy(double x);

// Penalty, in bits, incurred per smoothing-parameter substitution in the
// chain rules for smoothed min/max conditional entropies:
//   -log2(1 - sqrt(1 - x^2)),  x in (0,1].
// Evaluated in a cancellation-free form; ~ 2 log2(1/x) for small x.
double chain_rule_penalty(double x);

// Additive slack in the one-shot converse bound for degraded broadcast setups:
//   -log2[(1 - sqrt(1 - 8 delta)) (1 - sqrt(1 - 8 eps))],  eps, delta in (0, 1/8].
double converse_penalty(double eps, double delta);

// Additive slack when smoothed min/max entropies of an M-dimensional message
// system are replaced by von Neumann conditional entropies:
//   8 (sqrt(2 delta) + sqrt(2 eps)) log2(M) + 2 [h2(sqrt(8 delta)) + h2(2 sqrt(8 eps))],
// requiring delta <= 1/8, eps <= 1/32, num_messages >= 1.
double converse_penalty(double eps, double delta, double num_messages);

}  // namespace entrocap
