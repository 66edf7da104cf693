#include "entrocap/random.hpp"

#include <cmath>

namespace entrocap {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix2(seed, stream)) {}

CounterRng CounterRng::derive(std::uint64_t index) const {
  CounterRng r(0);
  r.key_ = mix2(key_, 0xd1b54a32d192ed03ULL + index);
  r.ctr_ = 0;
  return r;
}

std::uint64_t CounterRng::next_u64() { return mix2(key_, ++ctr_); }

double CounterRng::uniform() {
  // 53 mantissa bits, strictly inside (0,1)
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Complex CounterRng::gaussian_complex() {
  double re = gaussian(), im = gaussian();
  return Complex(re, im);
}

Vector CounterRng::haar_vector(long dim) {
  Vector v(dim);
  for (long i = 0; i < dim; ++i) v[i] = gaussian_complex();
  v.normalize();
  return v;
}

Matrix CounterRng::gaussian_matrix(long r, long c) {
  Matrix m(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) m(i, j) = gaussian_complex();
  return m;
}

Matrix CounterRng::haar_unitary(long dim) { return haar_isometry(dim, dim); }

Matrix CounterRng::haar_isometry(long rows, long cols) {
  if (rows < cols) throw ValidationError("haar_isometry: rows < cols");
  Matrix g = gaussian_matrix(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  // fix phases so the distribution is Haar (diagonal of R made positive real)
  for (long j = 0; j < cols; ++j) {
    Complex d = r(j, j);
    double ad = std::abs(d);
    Complex phase = (ad > 0) ? d / ad : Complex(1, 0);
    q.col(j) *= std::conj(phase);
  }
  return q;
}

}  // namespace entrocap
