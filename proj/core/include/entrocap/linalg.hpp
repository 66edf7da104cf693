#pragma once

#include "entrocap/types.hpp"

#include <functional>
#include <vector>

namespace entrocap {

// Eigendecomposition of a Hermitian matrix (ascending eigenvalues).
// Single primitive behind every matrix function in the library.
struct HermEig {
  RealVector values;
  Matrix vectors;  // columns are eigenvectors
};
HermEig herm_eig(const Matrix& h);

// f applied through the eigendecomposition: U f(diag) U^dagger.
// Eigenvalues below `clamp` are replaced by `clamp_to` before applying f.
Matrix herm_func(const Matrix& h, const std::function<double(double)>& f,
                 double clamp = -kInf, double clamp_to = 0.0);

// PSD-safe square root / inverse square root (eigenvalues clamped at tol::psd_clamp;
// inverse square root treats clamped eigenvalues as zero, i.e. pseudo-inverse).
Matrix sqrt_psd(const Matrix& h);
Matrix inv_sqrt_psd(const Matrix& h, double rank_tol = tol::psd_clamp);

double trace_norm(const Matrix& m);   // sum of singular values (Hermitian fast path)
double op_norm_herm(const Matrix& h); // largest |eigenvalue|

Matrix kron(const Matrix& a, const Matrix& b);

// Reorders the tensor factors of a square matrix. dims[i] is the dimension of
// slot i in the current layout (row-major, slot 0 most significant). new_order
// lists current slot indices in their target sequence.
Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims,
                          const std::vector<int>& new_order);

// Same reordering applied to a state vector.
Vector permute_subsystems_vec(const Vector& v, const std::vector<int>& dims,
                              const std::vector<int>& new_order);

// Partial trace over the slots flagged in `discard` (same layout as above).
Matrix partial_trace_raw(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<bool>& discard);

bool is_hermitian(const Matrix& m, double tolerance = tol::validate);

}  // namespace entrocap
