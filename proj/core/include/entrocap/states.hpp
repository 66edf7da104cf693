#pragma once

#include "entrocap/linalg.hpp"
#include "entrocap/registers.hpp"

#include <string>
#include <vector>

namespace entrocap {

// Subnormalized density operator over a labeled register. The matrix is
// stored in the register's canonical (label-sorted) order. Hermiticity is
// enforced by symmetrization; positivity and trace <= 1 are checked to
// `check_tol` (trace strictly below 1 is allowed).
class DensityOperator {
 public:
  // `m` must already be in canonical order.
  DensityOperator(Matrix m, SubsystemRegister reg, double check_tol = tol::validate);

  // `m` is laid out per `order` (labels of reg in the given sequence);
  // permuted into canonical order on construction.
  static DensityOperator from_ordered(Matrix m, const SubsystemRegister& reg,
                                      const std::vector<std::string>& order,
                                      double check_tol = tol::validate);

  const Matrix& matrix() const { return mat_; }
  const SubsystemRegister& reg() const { return reg_; }
  long dim() const { return mat_.rows(); }
  double trace() const { return mat_.trace().real(); }

  // Matrix permuted so the tensor slots follow `order` (must list all labels).
  Matrix reordered(const std::vector<std::string>& order) const;

 private:
  SubsystemRegister reg_;
  Matrix mat_;
};

// Possibly subnormalized state vector (norm <= 1); purifications of
// subnormalized density operators keep their trace in the vector norm.
class PureState {
 public:
  // `v` must be in canonical order with norm <= 1 + check_tol.
  PureState(Vector v, SubsystemRegister reg, double check_tol = tol::validate);

  const Vector& vec() const { return vec_; }
  const SubsystemRegister& reg() const { return reg_; }
  DensityOperator to_density() const;

 private:
  SubsystemRegister reg_;
  Vector vec_;
};

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

// Trace out the listed labels.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<std::string>& discard);
// Keep exactly the listed labels.
DensityOperator marginal(const DensityOperator& rho, const std::vector<std::string>& keep);

// Purification with purifier dimension equal to rank(rho). Throws if rho
// has (numerically) zero trace or the purifier label collides.
PureState purify(const DensityOperator& rho, const std::string& purifier_label = "_P",
                 double rank_tol = tol::psd_clamp);

DensityOperator maximally_entangled(const std::string& label_a, const std::string& label_b, int d);
DensityOperator maximally_mixed(const SubsystemRegister& reg);

}  // namespace entrocap
