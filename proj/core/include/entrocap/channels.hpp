#pragma once

#include "entrocap/states.hpp"

#include <vector>

namespace entrocap {

// CPTP map between labeled registers, stored in Kraus form with the Choi
// matrix derived at construction. Kraus operators map the input register's
// canonical layout to the output register's canonical layout.
//
// Choi convention: J = sum_{ij} |i><j|_in (x) N(|i><j|), laid out as
// in (x) out with the input index most significant. Tr_out J = I_in.
class QuantumChannel {
 public:
  QuantumChannel(std::vector<Matrix> kraus, SubsystemRegister in, SubsystemRegister out,
                 double check_tol = tol::validate);

  static QuantumChannel from_choi(const Matrix& choi, SubsystemRegister in,
                                  SubsystemRegister out, double check_tol = tol::validate,
                                  double kraus_rank_tol = tol::psd_clamp);
  static QuantumChannel identity(const SubsystemRegister& reg);
  // Single-Kraus isometric channel (v^dagger v = I_in).
  static QuantumChannel from_isometry(const Matrix& v, SubsystemRegister in,
                                      SubsystemRegister out, double check_tol = tol::validate);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  const Matrix& choi() const { return choi_; }
  const SubsystemRegister& in_reg() const { return in_; }
  const SubsystemRegister& out_reg() const { return out_; }
  long dim_in() const { return in_.total_dim(); }
  long dim_out() const { return out_.total_dim(); }

  // Raw application to a matrix over the input register's canonical layout.
  Matrix apply_matrix(const Matrix& rho) const;
  // Adjoint (unital) map on matrices over the output layout.
  Matrix apply_adjoint_matrix(const Matrix& y) const;

 private:
  std::vector<Matrix> kraus_;
  SubsystemRegister in_, out_;
  Matrix choi_;
};

// Applies `ch` to the subsystems named in `on` (order matched against the
// channel's canonical input labels positionally), identity elsewhere. Output
// labels replace `on` and must not collide with the remaining labels.
DensityOperator apply_channel(const QuantumChannel& ch, const DensityOperator& rho,
                              const std::vector<std::string>& on);

// Composition second . first (first's out register must equal second's in).
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

// Tensor of two channels over disjoint label sets.
QuantumChannel tensor(const QuantumChannel& a, const QuantumChannel& b);

// Choi matrix of the composition T.N computed linearly from J(N) and J(T):
// [J(T.N)]_{(i e),(j e')} = sum_{b b'} [J(N)]_{(i b),(j b')} [J(T)]_{(b e),(b' e')}.
Matrix compose_choi(const Matrix& choi_first, long d_in, long d_mid, const Matrix& choi_second,
                    long d_out);

}  // namespace entrocap
