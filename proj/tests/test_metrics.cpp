#include <doctest.h>

#include <cmath>

#include "entrocap/linalg.hpp"
#include "entrocap/metrics.hpp"
#include "entrocap/random.hpp"
#include "entrocap/states.hpp"

using namespace entrocap;

namespace {
Matrix random_density(CounterRng& rng, long d, double trace = 1.0) {
  Matrix g = rng.gaussian_matrix(d, d);
  Matrix p = g * g.adjoint();
  p *= trace / p.trace().real();
  return p;
}
}  // namespace

TEST_CASE("fidelity closed forms") {
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1;
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(fidelity(zero, plus) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fidelity(zero, zero) == doctest::Approx(1.0).epsilon(1e-10));
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  CHECK(fidelity(zero, one) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("fidelity of commuting states equals classical fidelity") {
  // diagonal states: F = (sum_i sqrt(p_i q_i))^2
  Matrix p = Matrix::Zero(3, 3), q = Matrix::Zero(3, 3);
  double pv[] = {0.5, 0.3, 0.2}, qv[] = {0.2, 0.2, 0.6};
  double bc = 0;
  for (int i = 0; i < 3; ++i) {
    p(i, i) = pv[i];
    q(i, i) = qv[i];
    bc += std::sqrt(pv[i] * qv[i]);
  }
  CHECK(fidelity(p, q) == doctest::Approx(bc * bc).epsilon(1e-10));
}

TEST_CASE("fidelity is symmetric and unitarily invariant") {
  CounterRng rng(51);
  Matrix a = random_density(rng, 4), b = random_density(rng, 4);
  CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)).epsilon(1e-9));
  Matrix u = rng.haar_unitary(4);
  CHECK(fidelity(u * a * u.adjoint(), u * b * u.adjoint()) ==
        doctest::Approx(fidelity(a, b)).epsilon(1e-9));
}

TEST_CASE("generalized fidelity on subnormalized pairs") {
  // for states with equal trace deficit, the closed form adds the deficit product
  CounterRng rng(52);
  Matrix a = random_density(rng, 3, 0.8), b = random_density(rng, 3, 0.6);
  double f = fidelity(a, b);
  double expected = std::sqrt(f) + std::sqrt(0.2 * 0.4);
  expected *= expected;
  CHECK(generalized_fidelity(a, b) == doctest::Approx(expected).epsilon(1e-10));
  // equal states with trace one: generalized fidelity is one
  Matrix c = random_density(rng, 3, 1.0);
  CHECK(generalized_fidelity(c, c) == doctest::Approx(1.0).epsilon(1e-10));
  // subnormalized state vs itself still reaches one (deficits align)
  CHECK(generalized_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("purified distance closed form for damped pure state") {
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1;
  Matrix damped = 0.9 * zero;
  // F_gen = (sqrt(0.9) + 0)^2 = 0.9, P = sqrt(0.1)
  CHECK(purified_distance(damped, zero) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-10));
}

TEST_CASE("trace distance embeds the trace gap") {
  Matrix zero = Matrix::Zero(2, 2);
  zero(0, 0) = 1;
  Matrix damped = 0.9 * zero;
  // operator part: 0.5*0.1, trace part: 0.5*0.1
  CHECK(trace_distance(damped, zero) == doctest::Approx(0.1).epsilon(1e-10));
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  CHECK(trace_distance(zero, one) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("trace distance never exceeds purified distance") {
  CounterRng rng(53);
  for (long d : {2L, 3L, 4L}) {
    for (int it = 0; it < 300; ++it) {
      double ta = 0.3 + 0.7 * rng.uniform();
      double tb = 0.3 + 0.7 * rng.uniform();
      Matrix a = random_density(rng, d, ta), b = random_density(rng, d, tb);
      double td = trace_distance(a, b);
      double pd = purified_distance(a, b);
      CHECK(td <= pd + 1e-10);
    }
  }
}

TEST_CASE("purified distance satisfies the triangle inequality") {
  CounterRng rng(54);
  for (int it = 0; it < 200; ++it) {
    double ta = 0.4 + 0.6 * rng.uniform();
    double tb = 0.4 + 0.6 * rng.uniform();
    double tc = 0.4 + 0.6 * rng.uniform();
    Matrix a = random_density(rng, 3, ta), b = random_density(rng, 3, tb),
           c = random_density(rng, 3, tc);
    double ab = purified_distance(a, b), bc = purified_distance(b, c),
           ac = purified_distance(a, c);
    CHECK(ac <= ab + bc + 1e-9);
  }
}

TEST_CASE("epsilon ball membership") {
  SubsystemRegister reg({{"A", 2}});
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1;
  DensityOperator zero(z, reg), damped(0.99 * z, reg);
  CHECK(in_epsilon_ball(damped, zero, 0.2));
  CHECK_FALSE(in_epsilon_ball(damped, zero, 0.05));
  CHECK(in_epsilon_ball(zero, zero, 0.0));
}

TEST_CASE("register-aware metric overloads enforce matching registers") {
  SubsystemRegister ra({{"A", 2}});
  SubsystemRegister rb({{"B", 2}});
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  DensityOperator a(m, ra), b(m, rb);
  CHECK_THROWS_AS(fidelity(a, b), ValidationError);
  DensityOperator a2(m, ra);
  CHECK(fidelity(a, a2) == doctest::Approx(1.0));
}
