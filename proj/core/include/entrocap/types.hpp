#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace entrocap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Default numeric tolerances used across the library. Individual operations
// accept overrides where it matters.
namespace tol {
inline constexpr double psd_clamp = 1e-12;     // eigenvalue clamp in matrix functions
inline constexpr double validate = 1e-8;       // construction-time sanity checks
inline constexpr double support = 1e-10;       // support threshold in relative entropies
inline constexpr double support_warn = 1e-12;  // lower edge of the support warning band
inline constexpr double sdp_gap = 1e-8;
inline constexpr double sdp_feas = 1e-8;
inline constexpr double artifact = 1e-7;       // returned optimizer artifacts satisfy constraints to this
inline constexpr double opt_grad = 1e-7;       // gradient-ascent stopping threshold
}  // namespace tol

// Input validation failure (bad dimensions, malformed data, domain errors).
// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure inside a solver or iterative routine.
// The CLI maps this to exit code 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entrocap
