#include <doctest.h>

#include "entrocap/linalg.hpp"
#include "entrocap/random.hpp"

using namespace entrocap;

namespace {
Matrix random_herm(CounterRng& rng, long d) {
  Matrix g = rng.gaussian_matrix(d, d);
  return 0.5 * (g + g.adjoint());
}
Matrix random_psd(CounterRng& rng, long d) {
  Matrix g = rng.gaussian_matrix(d, d);
  return g * g.adjoint();
}
}  // namespace

TEST_CASE("herm_eig reconstructs the matrix") {
  CounterRng rng(7);
  Matrix h = random_herm(rng, 6);
  HermEig e = herm_eig(h);
  Matrix back = e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
  CHECK((back - h).cwiseAbs().maxCoeff() < 1e-12 * h.cwiseAbs().maxCoeff());
}

TEST_CASE("sqrt_psd squares back") {
  CounterRng rng(8);
  Matrix p = random_psd(rng, 5);
  Matrix s = sqrt_psd(p);
  CHECK((s * s - p).cwiseAbs().maxCoeff() < 1e-10 * p.cwiseAbs().maxCoeff());
}

TEST_CASE("inv_sqrt_psd is a pseudo-inverse square root") {
  CounterRng rng(9);
  Matrix g = rng.gaussian_matrix(5, 3);
  Matrix p = g * g.adjoint();  // rank 3
  Matrix is = inv_sqrt_psd(p);
  Matrix proj = is * p * is;  // should be the support projector
  CHECK((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(proj.trace().real() - 3.0) < 1e-9);
}

TEST_CASE("kron matches manual computation") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  Matrix k = kron(a, b);
  CHECK(k(0, 1) == Complex(1));
  CHECK(k(0, 0) == Complex(0));
  CHECK(k(2, 3) == Complex(4));  // a(1,1)*b(0,1)
  CHECK(k(2, 0) == Complex(0));  // a(1,0)*b(0,0)
  CHECK(k(3, 0) == Complex(3));  // a(1,0)*b(1,0)
  CHECK(k.rows() == 4);
}

TEST_CASE("permute_subsystems swaps tensor factors") {
  CounterRng rng(10);
  Matrix a = random_herm(rng, 2), b = random_herm(rng, 3);
  Matrix ab = kron(a, b);
  Matrix ba = permute_subsystems(ab, {2, 3}, {1, 0});
  CHECK((ba - kron(b, a)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("permute_subsystems three factors") {
  CounterRng rng(11);
  Matrix a = random_herm(rng, 2), b = random_herm(rng, 2), c = random_herm(rng, 3);
  Matrix abc = kron(kron(a, b), c);
  // target order (c, a, b)
  Matrix cab = permute_subsystems(abc, {2, 2, 3}, {2, 0, 1});
  CHECK((cab - kron(kron(c, a), b)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("permute_subsystems_vec consistent with matrix version") {
  CounterRng rng(12);
  Vector v = rng.haar_vector(12);  // 2*2*3
  Matrix vv = v * v.adjoint();
  Vector pv = permute_subsystems_vec(v, {2, 2, 3}, {2, 0, 1});
  Matrix pvv = permute_subsystems(vv, {2, 2, 3}, {2, 0, 1});
  CHECK((pv * pv.adjoint() - pvv).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("partial_trace_raw on product states") {
  CounterRng rng(13);
  Matrix a = random_psd(rng, 2), b = random_psd(rng, 3);
  Matrix ab = kron(a, b);
  Matrix ta = partial_trace_raw(ab, {2, 3}, {false, true});
  CHECK((ta - a * b.trace()).cwiseAbs().maxCoeff() < 1e-12);
  Matrix tb = partial_trace_raw(ab, {2, 3}, {true, false});
  CHECK((tb - b * a.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial_trace_raw middle factor") {
  CounterRng rng(14);
  Matrix a = random_psd(rng, 2), b = random_psd(rng, 2), c = random_psd(rng, 2);
  Matrix abc = kron(kron(a, b), c);
  Matrix ac = partial_trace_raw(abc, {2, 2, 2}, {false, true, false});
  CHECK((ac - kron(a, c) * b.trace()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace_norm of Hermitian matrix") {
  Matrix m(2, 2);
  m << 1, 0, 0, -3;
  CHECK(trace_norm(m) == doctest::Approx(4.0));
}

TEST_CASE("haar_isometry columns orthonormal") {
  CounterRng rng(15);
  Matrix v = rng.haar_isometry(6, 3);
  CHECK((v.adjoint() * v - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("counter rng is reproducible and stream-independent") {
  CounterRng a(42), b(42);
  CHECK(a.next_u64() == b.next_u64());
  CounterRng c = CounterRng(42).derive(1), d = CounterRng(42).derive(2);
  CHECK(c.next_u64() != d.next_u64());
  // deriving does not disturb the parent
  CounterRng e(42);
  e.next_u64();
  CHECK(a.next_u64() == e.next_u64());
}
