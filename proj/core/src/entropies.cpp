#include "entrocap/entropies.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace entrocap {

namespace {

void require_state_pair(const DensityOperator& omega, const DensityOperator& tau,
                        const char* what) {
  if (omega.reg() != tau.reg()) {
    throw ValidationError(std::string(what) + ": operands live on different registers");
  }
  if (std::abs(omega.trace() - 1.0) > tol::validate ||
      std::abs(tau.trace() - 1.0) > tol::validate) {
    throw ValidationError(std::string(what) + ": inputs must be normalized states");
  }
}

// Mass of omega on the numerical kernel of tau (eigenvalues <= cut), plus the
// eigendecomposition of tau for reuse.
struct SupportCheck {
  HermEig tau_eig;
  double outside_mass = 0.0;
};

SupportCheck check_support(const DensityOperator& omega, const DensityOperator& tau,
                           double cut) {
  SupportCheck s;
  s.tau_eig = herm_eig(tau.matrix());
  const long n = tau.dim();
  for (long j = 0; j < n; ++j) {
    if (s.tau_eig.values(j) > cut) continue;
    const Vector v = s.tau_eig.vectors.col(j);
    s.outside_mass += std::max(0.0, (v.adjoint() * omega.matrix() * v).value().real());
  }
  return s;
}

// log2 on the support: eigenvalues <= cut are treated as exact zeros and
// contribute nothing (the 0 log 0 := 0 convention in operator form).
Matrix pseudo_log2(const Matrix& h, double cut) {
  return herm_func(h, [cut](double x) { return x > cut ? std::log2(x) : 0.0; });
}

double shannon_bits(const RealVector& eigs, double cut) {
  double h = 0.0;
  for (long i = 0; i < eigs.size(); ++i) {
    const double p = eigs(i);
    if (p > cut) h -= p * std::log2(p);
  }
  return h;
}

void require_disjoint(std::initializer_list<const std::vector<std::string>*> groups,
                      const char* what) {
  std::set<std::string> seen;
  for (const auto* g : groups) {
    if (g->empty()) throw ValidationError(std::string(what) + ": empty label group");
    for (const auto& label : *g) {
      if (!seen.insert(label).second) {
        throw ValidationError(std::string(what) + ": label '" + label +
                              "' appears in more than one group");
      }
    }
  }
}

std::vector<std::string> joined(std::initializer_list<const std::vector<std::string>*> groups) {
  std::vector<std::string> out;
  for (const auto* g : groups) out.insert(out.end(), g->begin(), g->end());
  return out;
}

}  // namespace

EntropyReport relative_entropy(const DensityOperator& omega, const DensityOperator& tau,
                               double support_tol) {
  require_state_pair(omega, tau, "relative_entropy");
  EntropyReport report;
  report.support_tol = support_tol;
  report.warn_tol = support_tol * 1e-2;

  const SupportCheck sup = check_support(omega, tau, support_tol);
  report.outside_mass = sup.outside_mass;
  report.support_ok = sup.outside_mass <= support_tol;
  report.support_warning = report.support_ok && sup.outside_mass > report.warn_tol;
  if (!report.support_ok) {
    report.value = kInf;
    return report;
  }

  const HermEig we = herm_eig(omega.matrix());
  double d = -shannon_bits(we.values, support_tol);  // Tr[omega log2 omega]
  // Subtract Tr[omega log2 tau] over the support of tau.
  for (long j = 0; j < tau.dim(); ++j) {
    const double t = sup.tau_eig.values(j);
    if (t <= support_tol) continue;
    const Vector v = sup.tau_eig.vectors.col(j);
    const double mass = std::max(0.0, (v.adjoint() * omega.matrix() * v).value().real());
    d -= mass * std::log2(t);
  }
  // D >= 0 holds exactly under the support condition; tiny negatives are
  // floating-point residue.
  if (d < 0.0 && d > -1e-7) d = 0.0;
  report.value = d;
  return report;
}

double entropy(const DensityOperator& rho) {
  return shannon_bits(herm_eig(rho.matrix()).values, tol::psd_clamp);
}

double conditional_entropy(const DensityOperator& rho, const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
  require_disjoint({&a, &b}, "conditional_entropy");
  return entropy(marginal(rho, joined({&a, &b}))) - entropy(marginal(rho, b));
}

double mutual_information(const DensityOperator& rho, const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  require_disjoint({&a, &b}, "mutual_information");
  return entropy(marginal(rho, a)) + entropy(marginal(rho, b)) -
         entropy(marginal(rho, joined({&a, &b})));
}

double conditional_mutual_information(const DensityOperator& rho,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c) {
  require_disjoint({&a, &b, &c}, "conditional_mutual_information");
  return entropy(marginal(rho, joined({&a, &c}))) + entropy(marginal(rho, joined({&b, &c}))) -
         entropy(marginal(rho, joined({&a, &b, &c}))) - entropy(marginal(rho, c));
}

double relative_entropy_variance(const DensityOperator& omega, const DensityOperator& tau,
                                 double support_tol) {
  require_state_pair(omega, tau, "relative_entropy_variance");
  const SupportCheck sup = check_support(omega, tau, support_tol);
  if (sup.outside_mass > support_tol) {
    throw ValidationError("relative_entropy_variance: supp(omega) is not contained in supp(tau)");
  }
  const Matrix x = pseudo_log2(omega.matrix(), support_tol) -
                   pseudo_log2(tau.matrix(), support_tol);
  const Matrix wx = omega.matrix() * x;
  const double d = wx.trace().real();
  const double second_moment = (wx * x).trace().real();
  return std::max(0.0, second_moment - d * d);
}

double gaussian_cdf(double a) { return 0.5 * std::erfc(-a / std::sqrt(2.0)); }

double gaussian_quantile(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ValidationError("gaussian_quantile: argument must lie strictly inside (0,1)");
  }
  // Rational approximation (relative error ~1e-9), then one Newton step on Phi.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (eps < p_low) {
    const double q = std::sqrt(-2.0 * std::log(eps));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  } else if (eps <= 1.0 - p_low) {
    const double q = eps - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - eps));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
  }
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  if (pdf > 1e-280) x -= (gaussian_cdf(x) - eps) / pdf;
  return x;
}

double binary_entropy(double x) {
  if (x < -1e-12 || x > 1.0 + 1e-12) {
    throw ValidationError("binary_entropy: argument must lie in [0,1]");
  }
  x = std::clamp(x, 0.0, 1.0);
  double h = 0.0;
  if (x > 0.0) h -= x * std::log2(x);
  if (x < 1.0) h -= (1.0 - x) * std::log2(1.0 - x);
  return h;
}

double chain_rule_penalty(double x) {
  if (!(x > 0.0 && x <= 1.0)) {
    throw ValidationError("chain_rule_penalty: argument must lie in (0,1]");
  }
  // 1 - sqrt(1-x^2) = x^2 / (1 + sqrt(1-x^2)), stable for small x.
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  return std::log2((1.0 + s)) - 2.0 * std::log2(x);
}

double converse_penalty(double eps, double delta) {
  if (!(eps > 0.0 && eps <= 0.125) || !(delta > 0.0 && delta <= 0.125)) {
    throw ValidationError("converse_penalty: eps and delta must lie in (0, 1/8]");
  }
  // 1 - sqrt(1-8t) = 8t / (1 + sqrt(1-8t)), stable for small t.
  const auto log2_term = [](double t) {
    const double s = std::sqrt(std::max(0.0, 1.0 - 8.0 * t));
    return std::log2(8.0 * t) - std::log2(1.0 + s);
  };
  return -(log2_term(delta) + log2_term(eps));
}

double converse_penalty(double eps, double delta, double num_messages) {
  if (!(eps >= 0.0 && eps <= 1.0 / 32.0) || !(delta >= 0.0 && delta <= 0.125)) {
    throw ValidationError(
        "converse_penalty: need eps in [0, 1/32] and delta in [0, 1/8] for the message-count form");
  }
  if (!(num_messages >= 1.0)) {
    throw ValidationError("converse_penalty: num_messages must be >= 1");
  }
  const double log2_m = std::log2(num_messages);
  return 8.0 * (std::sqrt(2.0 * delta) + std::sqrt(2.0 * eps)) * log2_m +
         2.0 * (binary_entropy(std::sqrt(8.0 * delta)) + binary_entropy(2.0 * std::sqrt(8.0 * eps)));
}

}  // namespace entrocap
