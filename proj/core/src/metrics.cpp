#include "entrocap/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace entrocap {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError(std::string(who) + ": operands have different dimensions");
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double fidelity(const Matrix& rho, const Matrix& sigma) {
  check_same_shape(rho, sigma, "fidelity");
  Matrix sr = sqrt_psd(rho);
  Matrix inner = sr * sigma * sr;
  Matrix root = sqrt_psd(inner);
  double f = root.trace().real();
  return f * f;
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.reg() == sigma.reg())) throw ValidationError("fidelity: register mismatch");
  return fidelity(rho.matrix(), sigma.matrix());
}

double generalized_fidelity(const Matrix& rho, const Matrix& sigma) {
  check_same_shape(rho, sigma, "generalized_fidelity");
  double a = std::max(0.0, 1.0 - rho.trace().real());
  double b = std::max(0.0, 1.0 - sigma.trace().real());
  double g = std::sqrt(fidelity(rho, sigma)) + std::sqrt(a * b);
  return clamp01(g * g);
}

double generalized_fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.reg() == sigma.reg()))
    throw ValidationError("generalized_fidelity: register mismatch");
  return generalized_fidelity(rho.matrix(), sigma.matrix());
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  check_same_shape(rho, sigma, "trace_distance");
  double a = 1.0 - rho.trace().real();
  double b = 1.0 - sigma.trace().real();
  // trace norm of the embedded difference = ||rho - sigma||_1 + |a - b| on
  // the completed block
  return 0.5 * (trace_norm(rho - sigma) + std::abs(a - b));
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.reg() == sigma.reg())) throw ValidationError("trace_distance: register mismatch");
  return trace_distance(rho.matrix(), sigma.matrix());
}

double purified_distance(const Matrix& rho, const Matrix& sigma) {
  return std::sqrt(clamp01(1.0 - generalized_fidelity(rho, sigma)));
}

double purified_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (!(rho.reg() == sigma.reg()))
    throw ValidationError("purified_distance: register mismatch");
  return purified_distance(rho.matrix(), sigma.matrix());
}

bool in_epsilon_ball(const DensityOperator& candidate, const DensityOperator& center, double eps,
                     double slack) {
  if (eps < 0) throw ValidationError("in_epsilon_ball: eps must be nonnegative");
  return purified_distance(candidate, center) <= eps + slack;
}

}  // namespace entrocap
