#include "entrocap/linalg.hpp"

#include <cmath>
#include <numeric>

namespace entrocap {

HermEig herm_eig(const Matrix& h) {
  if (h.rows() != h.cols()) throw ValidationError("herm_eig: matrix not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw SolverError("herm_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix herm_func(const Matrix& h, const std::function<double(double)>& f, double clamp,
                 double clamp_to) {
  HermEig e = herm_eig(h);
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    double v = e.values[i];
    if (v < clamp) v = clamp_to;
    fv[i] = f(v);
  }
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Matrix sqrt_psd(const Matrix& h) {
  return herm_func(h, [](double x) { return std::sqrt(x > 0 ? x : 0.0); }, tol::psd_clamp, 0.0);
}

Matrix inv_sqrt_psd(const Matrix& h, double rank_tol) {
  HermEig e = herm_eig(h);
  double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    double v = e.values[i];
    fv[i] = (v > rank_tol * scale) ? 1.0 / std::sqrt(v) : 0.0;
  }
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

double trace_norm(const Matrix& m) {
  if (is_hermitian(m, 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))) {
    HermEig e = herm_eig(m);
    return e.values.cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double op_norm_herm(const Matrix& h) {
  HermEig e = herm_eig(h);
  return e.values.cwiseAbs().maxCoeff();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

// strides[i] for row-major mixed radix with the given dims
std::vector<long> make_strides(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
  return s;
}

}  // namespace

Matrix permute_subsystems(const Matrix& m, const std::vector<int>& dims,
                          const std::vector<int>& new_order) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(new_order.size()) != n)
    throw ValidationError("permute_subsystems: order size mismatch");
  long total = 1;
  for (int d : dims) total *= d;
  if (m.rows() != total || m.cols() != total)
    throw ValidationError("permute_subsystems: matrix size does not match dims");

  std::vector<int> new_dims(n);
  for (int t = 0; t < n; ++t) new_dims[t] = dims[new_order[t]];
  auto src_strides = make_strides(dims);
  auto dst_strides = make_strides(new_dims);

  // map[src_index] = dst_index
  std::vector<long> map(total);
  std::vector<int> digits(n, 0);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int i = 0; i < n; ++i) {
      digits[i] = static_cast<int>(rest / src_strides[i]);
      rest %= src_strides[i];
    }
    long dst = 0;
    for (int t = 0; t < n; ++t) dst += static_cast<long>(digits[new_order[t]]) * dst_strides[t];
    map[idx] = dst;
  }

  Matrix out(total, total);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

Vector permute_subsystems_vec(const Vector& v, const std::vector<int>& dims,
                              const std::vector<int>& new_order) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(new_order.size()) != n)
    throw ValidationError("permute_subsystems_vec: order size mismatch");
  long total = 1;
  for (int d : dims) total *= d;
  if (v.size() != total) throw ValidationError("permute_subsystems_vec: size mismatch");
  std::vector<int> new_dims(n);
  for (int t = 0; t < n; ++t) new_dims[t] = dims[new_order[t]];
  auto src_strides = make_strides(dims);
  auto dst_strides = make_strides(new_dims);
  Vector out(total);
  std::vector<int> digits(n, 0);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int i = 0; i < n; ++i) {
      digits[i] = static_cast<int>(rest / src_strides[i]);
      rest %= src_strides[i];
    }
    long dst = 0;
    for (int t = 0; t < n; ++t) dst += static_cast<long>(digits[new_order[t]]) * dst_strides[t];
    out[dst] = v[idx];
  }
  return out;
}

Matrix partial_trace_raw(const Matrix& m, const std::vector<int>& dims,
                         const std::vector<bool>& discard) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(discard.size()) != n)
    throw ValidationError("partial_trace_raw: mask size mismatch");
  long total = 1;
  for (int d : dims) total *= d;
  if (m.rows() != total || m.cols() != total)
    throw ValidationError("partial_trace_raw: matrix size does not match dims");

  long keep_dim = 1, disc_dim = 1;
  for (int i = 0; i < n; ++i) (discard[i] ? disc_dim : keep_dim) *= dims[i];

  auto strides = make_strides(dims);
  // decompose each full index into (keep part, discard part)
  std::vector<long> keep_of(total), disc_of(total);
  {
    std::vector<long> kstride, dstride;
    long kacc = 1, dacc = 1;
    // strides within keep/discard sub-spaces, same relative order as dims
    std::vector<long> ks(n, 0), ds(n, 0);
    for (int i = n - 1; i >= 0; --i) {
      if (discard[i]) {
        ds[i] = dacc;
        dacc *= dims[i];
      } else {
        ks[i] = kacc;
        kacc *= dims[i];
      }
    }
    for (long idx = 0; idx < total; ++idx) {
      long rest = idx, k = 0, d = 0;
      for (int i = 0; i < n; ++i) {
        long digit = rest / strides[i];
        rest %= strides[i];
        if (discard[i])
          d += digit * ds[i];
        else
          k += digit * ks[i];
      }
      keep_of[idx] = k;
      disc_of[idx] = d;
    }
  }

  // full index from (keep, disc) pair: build reverse lookup once
  std::vector<long> full_of(keep_dim * disc_dim);
  for (long idx = 0; idx < total; ++idx) full_of[keep_of[idx] * disc_dim + disc_of[idx]] = idx;

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (long ki = 0; ki < keep_dim; ++ki)
    for (long kj = 0; kj < keep_dim; ++kj) {
      Complex acc = 0.0;
      for (long d = 0; d < disc_dim; ++d)
        acc += m(full_of[ki * disc_dim + d], full_of[kj * disc_dim + d]);
      out(ki, kj) = acc;
    }
  return out;
}

bool is_hermitian(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

}  // namespace entrocap
