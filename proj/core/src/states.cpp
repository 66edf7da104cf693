#include "entrocap/states.hpp"

#include <algorithm>
#include <cmath>

namespace entrocap {

namespace {

std::vector<int> order_permutation(const SubsystemRegister& reg,
                                   const std::vector<std::string>& from_order) {
  // new_order[t] = index in from_order of the label at canonical position t
  if (static_cast<int>(from_order.size()) != reg.size())
    throw ValidationError("subsystem order must list every label exactly once");
  std::vector<int> perm(reg.size());
  std::vector<bool> used(reg.size(), false);
  for (int t = 0; t < reg.size(); ++t) {
    const std::string& want = reg.part(t).label;
    auto it = std::find(from_order.begin(), from_order.end(), want);
    if (it == from_order.end()) throw ValidationError("order missing label '" + want + "'");
    int idx = static_cast<int>(it - from_order.begin());
    if (used[idx]) throw ValidationError("order repeats label '" + want + "'");
    used[idx] = true;
    perm[t] = idx;
  }
  return perm;
}

}  // namespace

DensityOperator::DensityOperator(Matrix m, SubsystemRegister reg, double check_tol)
    : reg_(std::move(reg)) {
  if (m.rows() != m.cols()) throw ValidationError("density operator must be square");
  if (m.rows() != reg_.total_dim())
    throw ValidationError("density operator size does not match register dimension");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > check_tol * scale)
    throw ValidationError("density operator is not Hermitian");
  mat_ = 0.5 * (m + m.adjoint());
  HermEig e = herm_eig(mat_);
  if (e.values.minCoeff() < -check_tol * scale)
    throw ValidationError("density operator has a negative eigenvalue beyond tolerance");
  double tr = mat_.trace().real();
  if (tr > 1.0 + check_tol) throw ValidationError("density operator trace exceeds 1");
  if (tr < -check_tol) throw ValidationError("density operator trace is negative");
}

DensityOperator DensityOperator::from_ordered(Matrix m, const SubsystemRegister& reg,
                                              const std::vector<std::string>& order,
                                              double check_tol) {
  std::vector<int> dims_in_order;
  for (const auto& l : order) dims_in_order.push_back(reg.dim_of(l));
  Matrix canon = permute_subsystems(m, dims_in_order, order_permutation(reg, order));
  return DensityOperator(std::move(canon), reg, check_tol);
}

Matrix DensityOperator::reordered(const std::vector<std::string>& order) const {
  // inverse direction: canonical -> requested order
  std::vector<int> new_order(reg_.size());
  if (static_cast<int>(order.size()) != reg_.size())
    throw ValidationError("subsystem order must list every label exactly once");
  for (int t = 0; t < static_cast<int>(order.size()); ++t) {
    int idx = reg_.index_of(order[t]);
    if (idx < 0) throw ValidationError("order has unknown label '" + order[t] + "'");
    new_order[t] = idx;
  }
  std::vector<bool> used(reg_.size(), false);
  for (int i : new_order) {
    if (used[i]) throw ValidationError("order repeats a label");
    used[i] = true;
  }
  return permute_subsystems(mat_, reg_.dims(), new_order);
}

PureState::PureState(Vector v, SubsystemRegister reg, double check_tol)
    : reg_(std::move(reg)), vec_(std::move(v)) {
  if (vec_.size() != reg_.total_dim())
    throw ValidationError("pure state size does not match register dimension");
  if (vec_.norm() > 1.0 + check_tol)
    throw ValidationError("pure state vector has norm above 1");
}

DensityOperator PureState::to_density() const {
  return DensityOperator(vec_ * vec_.adjoint(), reg_);
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  SubsystemRegister merged = a.reg().merged(b.reg());
  Matrix big = kron(a.matrix(), b.matrix());
  std::vector<std::string> order = a.reg().labels();
  for (const auto& l : b.reg().labels()) order.push_back(l);
  // allow product of two subnormalized states (trace <= 1 each)
  return DensityOperator::from_ordered(std::move(big), merged, order, 1e-6);
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& discard) {
  const auto& reg = rho.reg();
  std::vector<bool> mask(reg.size(), false);
  for (const auto& l : discard) {
    int i = reg.index_of(l);
    if (i < 0) throw ValidationError("partial_trace: no subsystem labeled '" + l + "'");
    mask[i] = true;
  }
  Matrix reduced = partial_trace_raw(rho.matrix(), reg.dims(), mask);
  return DensityOperator(std::move(reduced), reg.without(discard), 1e-6);
}

DensityOperator marginal(const DensityOperator& rho, const std::vector<std::string>& keep) {
  std::vector<std::string> discard;
  for (const auto& l : rho.reg().labels())
    if (std::find(keep.begin(), keep.end(), l) == keep.end()) discard.push_back(l);
  // validate keep labels exist
  rho.reg().subset(keep);
  return partial_trace(rho, discard);
}

PureState purify(const DensityOperator& rho, const std::string& purifier_label, double rank_tol) {
  if (rho.reg().has(purifier_label))
    throw ValidationError("purifier label collides with '" + purifier_label + "'");
  HermEig e = herm_eig(rho.matrix());
  double scale = std::max(e.values.cwiseAbs().maxCoeff(), 0.0);
  if (scale <= 0) throw ValidationError("cannot purify the zero operator");
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > rank_tol * scale) keep.push_back(static_cast<int>(i));
  int r = static_cast<int>(keep.size());
  long d = rho.dim();
  // layout: system slots first (canonical), purifier as least significant digit;
  // purifier basis indexes the retained eigenvectors. Subnormalized input
  // purifies to a vector with ||v||^2 = tr(rho).
  Vector v = Vector::Zero(d * r);
  for (int k = 0; k < r; ++k) {
    double lam = e.values[keep[k]];
    for (long i = 0; i < d; ++i) v[i * r + k] = std::sqrt(lam) * e.vectors(i, keep[k]);
  }
  SubsystemRegister full = rho.reg().merged(SubsystemRegister::single(purifier_label, r));
  std::vector<int> dims_in_order = rho.reg().dims();
  dims_in_order.push_back(r);
  std::vector<std::string> order = rho.reg().labels();
  order.push_back(purifier_label);
  std::vector<int> perm(full.size());
  for (int t = 0; t < full.size(); ++t) {
    const std::string& want = full.part(t).label;
    for (int s = 0; s < static_cast<int>(order.size()); ++s)
      if (order[s] == want) perm[t] = s;
  }
  Vector vc = permute_subsystems_vec(v, dims_in_order, perm);
  return PureState(vc, full);
}

DensityOperator maximally_entangled(const std::string& label_a, const std::string& label_b,
                                    int d) {
  SubsystemRegister reg({{label_a, d}, {label_b, d}});
  Vector v = Vector::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v[static_cast<long>(i) * d + i] = 1.0 / std::sqrt(double(d));
  // canonical order: sorted labels; |ii> layout is symmetric under the swap,
  // so the vector is valid in either order
  return PureState(v, reg).to_density();
}

DensityOperator maximally_mixed(const SubsystemRegister& reg) {
  long d = reg.total_dim();
  return DensityOperator(Matrix::Identity(d, d) / double(d), reg);
}

}  // namespace entrocap
