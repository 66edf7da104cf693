#include "entrocap/channels.hpp"

#include <algorithm>
#include <cmath>

namespace entrocap {

namespace {

Matrix choi_from_kraus(const std::vector<Matrix>& kraus, long d_in, long d_out) {
  Matrix j = Matrix::Zero(d_in * d_out, d_in * d_out);
  for (const Matrix& k : kraus) {
    Vector w(d_in * d_out);  // w[(i,m)] = K[m,i], input index most significant
    for (long i = 0; i < d_in; ++i)
      for (long m = 0; m < d_out; ++m) w[i * d_out + m] = k(m, i);
    j += w * w.adjoint();
  }
  return j;
}

}  // namespace

QuantumChannel::QuantumChannel(std::vector<Matrix> kraus, SubsystemRegister in,
                               SubsystemRegister out, double check_tol)
    : kraus_(std::move(kraus)), in_(std::move(in)), out_(std::move(out)) {
  if (kraus_.empty()) throw ValidationError("channel needs at least one Kraus operator");
  long d_in = in_.total_dim(), d_out = out_.total_dim();
  Matrix comp = Matrix::Zero(d_in, d_in);
  for (const Matrix& k : kraus_) {
    if (k.rows() != d_out || k.cols() != d_in)
      throw ValidationError("Kraus operator shape does not match registers");
    comp += k.adjoint() * k;
  }
  if ((comp - Matrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > check_tol)
    throw ValidationError("Kraus operators do not satisfy the completeness relation");
  choi_ = choi_from_kraus(kraus_, d_in, d_out);
}

QuantumChannel QuantumChannel::from_choi(const Matrix& choi, SubsystemRegister in,
                                         SubsystemRegister out, double check_tol,
                                         double kraus_rank_tol) {
  long d_in = in.total_dim(), d_out = out.total_dim();
  if (choi.rows() != d_in * d_out || choi.cols() != d_in * d_out)
    throw ValidationError("Choi matrix size does not match registers");
  HermEig e = herm_eig(choi);
  double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  if (e.values.minCoeff() < -check_tol * scale)
    throw ValidationError("Choi matrix is not positive semidefinite");
  // trace over the output factor must give I_in
  std::vector<int> dims = {static_cast<int>(d_in), static_cast<int>(d_out)};
  Matrix tr_out = partial_trace_raw(choi, dims, {false, true});
  if ((tr_out - Matrix::Identity(d_in, d_in)).cwiseAbs().maxCoeff() > check_tol * scale)
    throw ValidationError("Choi matrix is not trace preserving");

  std::vector<Matrix> kraus;
  for (Eigen::Index c = 0; c < e.values.size(); ++c) {
    double lam = e.values[c];
    if (lam <= kraus_rank_tol * scale) continue;
    Matrix k(d_out, d_in);
    for (long i = 0; i < d_in; ++i)
      for (long m = 0; m < d_out; ++m) k(m, i) = std::sqrt(lam) * e.vectors(i * d_out + m, c);
    kraus.push_back(std::move(k));
  }
  return QuantumChannel(std::move(kraus), std::move(in), std::move(out), check_tol);
}

QuantumChannel QuantumChannel::identity(const SubsystemRegister& reg) {
  long d = reg.total_dim();
  return QuantumChannel({Matrix::Identity(d, d)}, reg, reg);
}

QuantumChannel QuantumChannel::from_isometry(const Matrix& v, SubsystemRegister in,
                                             SubsystemRegister out, double check_tol) {
  return QuantumChannel({v}, std::move(in), std::move(out), check_tol);
}

Matrix QuantumChannel::apply_matrix(const Matrix& rho) const {
  long d_in = dim_in(), d_out = dim_out();
  if (rho.rows() != d_in || rho.cols() != d_in)
    throw ValidationError("apply_matrix: input size mismatch");
  Matrix out = Matrix::Zero(d_out, d_out);
  for (const Matrix& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

Matrix QuantumChannel::apply_adjoint_matrix(const Matrix& y) const {
  long d_in = dim_in(), d_out = dim_out();
  if (y.rows() != d_out || y.cols() != d_out)
    throw ValidationError("apply_adjoint_matrix: input size mismatch");
  Matrix out = Matrix::Zero(d_in, d_in);
  for (const Matrix& k : kraus_) out += k.adjoint() * y * k;
  return out;
}

DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho,
                              const std::vector<std::string>& on) {
  const auto& reg = rho.reg();
  if (static_cast<int>(on.size()) != ch.in_reg().size())
    throw ValidationError("apply_channel: `on` must name one label per channel input slot");
  for (int i = 0; i < ch.in_reg().size(); ++i) {
    if (reg.dim_of(on[i]) != ch.in_reg().part(i).dim)
      throw ValidationError("apply_channel: dimension mismatch on '" + on[i] + "'");
  }
  SubsystemRegister rest = reg.without(on);
  SubsystemRegister out_full = rest.merged(ch.out_reg());

  // reorder so the channel input slots come first, in the channel's order
  std::vector<std::string> order = on;
  for (const auto& l : rest.labels()) order.push_back(l);
  Matrix m = rho.reordered(order);

  long d_on = ch.dim_in(), d_rest = rest.total_dim(), d_out = ch.dim_out();
  Matrix acc = Matrix::Zero(d_out * d_rest, d_out * d_rest);
  Matrix tmp(d_out * d_rest, d_on * d_rest);
  for (const Matrix& k : ch.kraus()) {
    // (K (x) I) m (K (x) I)^dagger with the channel slot most significant
    tmp.setZero();
    for (long o = 0; o < d_out; ++o)
      for (long r = 0; r < d_on; ++r) {
        Complex c = k(o, r);
        if (c == Complex(0.0)) continue;
        tmp.middleRows(o * d_rest, d_rest) += c * m.middleRows(r * d_rest, d_rest);
      }
    // columns
    for (long o = 0; o < d_out; ++o)
      for (long r = 0; r < d_on; ++r) {
        Complex c = std::conj(k(o, r));
        if (c == Complex(0.0)) continue;
        acc.middleCols(o * d_rest, d_rest) += c * tmp.middleCols(r * d_rest, d_rest);
      }
  }
  // acc is laid out [out (channel canonical), rest (canonical)]
  std::vector<std::string> acc_order = ch.out_reg().labels();
  for (const auto& l : rest.labels()) acc_order.push_back(l);
  return DensityOperator::from_ordered(std::move(acc), out_full, acc_order, 1e-6);
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (!(first.out_reg() == second.in_reg()))
    throw ValidationError("compose: register mismatch between stages");
  std::vector<Matrix> kraus;
  kraus.reserve(first.kraus().size() * second.kraus().size());
  for (const Matrix& k2 : second.kraus())
    for (const Matrix& k1 : first.kraus()) kraus.push_back(k2 * k1);
  return QuantumChannel(std::move(kraus), first.in_reg(), second.out_reg(), 1e-6);
}

QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b) {
  SubsystemRegister in = a.in_reg().merged(b.in_reg());
  SubsystemRegister out = a.out_reg().merged(b.out_reg());
  // canonical layouts may interleave a's and b's slots; build the kron in
  // concatenated order and conjugate by the permutations on both sides
  auto perm_for = [](const SubsystemRegister& canon, const SubsystemRegister& first,
                     const SubsystemRegister& second) {
    std::vector<std::string> concat = first.labels();
    for (const auto& l : second.labels()) concat.push_back(l);
    std::vector<int> dims;
    for (const auto& l : concat)
      dims.push_back(first.has(l) ? first.dim_of(l) : second.dim_of(l));
    std::vector<int> perm(canon.size());
    for (int t = 0; t < canon.size(); ++t) {
      const std::string& want = canon.part(t).label;
      for (int s = 0; s < static_cast<int>(concat.size()); ++s)
        if (concat[s] == want) perm[t] = s;
    }
    return std::pair(dims, perm);
  };
  auto [in_dims, in_perm] = perm_for(in, a.in_reg(), b.in_reg());
  auto [out_dims, out_perm] = perm_for(out, a.out_reg(), b.out_reg());

  std::vector<Matrix> kraus;
  for (const Matrix& ka : a.kraus())
    for (const Matrix& kb : b.kraus()) {
      Matrix kk = kron(ka, kb);
      // rows are in [a.out, b.out] concat order -> permute to canonical out;
      // cols in [a.in, b.in] concat order -> permute to canonical in.
      // Use vector permutation on each column/row via dense maps.
      kraus.push_back(std::move(kk));
    }
  // apply layout permutations once via conjugation with permutation maps
  long din = in.total_dim(), dout = out.total_dim();
  std::vector<long> in_map(din), out_map(dout);
  {
    // map concat index -> canonical index
    auto build_map = [](const std::vector<int>& dims, const std::vector<int>& perm,
                        std::vector<long>& map) {
      int n = static_cast<int>(dims.size());
      std::vector<long> sstr(n, 1);
      for (int i = n - 2; i >= 0; --i) sstr[i] = sstr[i + 1] * dims[i + 1];
      std::vector<int> ndims(n);
      for (int t = 0; t < n; ++t) ndims[t] = dims[perm[t]];
      std::vector<long> dstr(n, 1);
      for (int i = n - 2; i >= 0; --i) dstr[i] = dstr[i + 1] * ndims[i + 1];
      long total = 1;
      for (int d : dims) total *= d;
      std::vector<int> digits(n);
      for (long idx = 0; idx < total; ++idx) {
        long rest = idx;
        for (int i = 0; i < n; ++i) {
          digits[i] = static_cast<int>(rest / sstr[i]);
          rest %= sstr[i];
        }
        long dst = 0;
        for (int t = 0; t < n; ++t) dst += static_cast<long>(digits[perm[t]]) * dstr[t];
        map[idx] = dst;
      }
    };
    build_map(in_dims, in_perm, in_map);
    build_map(out_dims, out_perm, out_map);
  }
  for (Matrix& k : kraus) {
    Matrix kp(dout, din);
    for (long r = 0; r < dout; ++r)
      for (long c = 0; c < din; ++c) kp(out_map[r], in_map[c]) = k(r, c);
    k = std::move(kp);
  }
  return QuantumChannel(std::move(kraus), in, out, 1e-6);
}

Matrix compose_choi(const Matrix& choi_first, long d_in, long d_mid, const Matrix& choi_second,
                    long d_out) {
  if (choi_first.rows() != d_in * d_mid || choi_second.rows() != d_mid * d_out)
    throw ValidationError("compose_choi: dimension mismatch");
  Matrix out = Matrix::Zero(d_in * d_out, d_in * d_out);
  for (long i = 0; i < d_in; ++i)
    for (long j = 0; j < d_in; ++j)
      for (long e = 0; e < d_out; ++e)
        for (long ep = 0; ep < d_out; ++ep) {
          Complex acc = 0.0;
          for (long b = 0; b < d_mid; ++b)
            for (long bp = 0; bp < d_mid; ++bp)
              acc += choi_first(i * d_mid + b, j * d_mid + bp) *
                     choi_second(b * d_out + e, bp * d_out + ep);
          out(i * d_out + e, j * d_out + ep) = acc;
        }
  return out;
}

}  // namespace entrocap
