#include <doctest.h>

#include "entrocap/linalg.hpp"
#include "entrocap/random.hpp"
#include "entrocap/states.hpp"

using namespace entrocap;

namespace {
DensityOperator random_state(CounterRng& rng, const SubsystemRegister& reg) {
  long d = reg.total_dim();
  Matrix g = rng.gaussian_matrix(d, d);
  Matrix p = g * g.adjoint();
  p /= p.trace().real();
  return DensityOperator(p, reg);
}
}  // namespace

TEST_CASE("density operator validates basics") {
  SubsystemRegister reg({{"A", 2}});
  Matrix ok = Matrix::Identity(2, 2) * 0.5;
  CHECK_NOTHROW(DensityOperator(ok, reg));

  Matrix neg(2, 2);
  neg << 0.8, 0, 0, -0.3;
  CHECK_THROWS_AS(DensityOperator(neg, reg), ValidationError);

  Matrix overtrace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityOperator(overtrace * 1.2, reg), ValidationError);

  Matrix nonherm(2, 2);
  nonherm << 0.5, 0.4, 0.0, 0.5;
  CHECK_THROWS_AS(DensityOperator(nonherm, reg), ValidationError);
}

TEST_CASE("subnormalized states are accepted") {
  SubsystemRegister reg({{"A", 2}});
  Matrix half = Matrix::Identity(2, 2) * 0.25;  // trace 1/2
  DensityOperator rho(half, reg);
  CHECK(rho.trace() == doctest::Approx(0.5));
}

TEST_CASE("from_ordered and reordered are mutually inverse") {
  CounterRng rng(21);
  SubsystemRegister reg({{"R", 2}, {"A", 3}, {"M", 2}});
  DensityOperator rho = random_state(rng, reg);
  std::vector<std::string> order = {"R", "M", "A"};
  Matrix view = rho.reordered(order);
  DensityOperator back = DensityOperator::from_ordered(view, reg, order);
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tensor of states matches kron in canonical order") {
  CounterRng rng(22);
  SubsystemRegister ra({{"A", 2}});
  SubsystemRegister rb({{"B", 3}});
  DensityOperator a = random_state(rng, ra), b = random_state(rng, rb);
  DensityOperator ab = tensor(a, b);
  CHECK((ab.matrix() - kron(a.matrix(), b.matrix())).cwiseAbs().maxCoeff() < 1e-12);
  // tensor in swapped argument order still lands in canonical (label-sorted) layout
  DensityOperator ba = tensor(b, a);
  CHECK((ba.matrix() - ab.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace against kron oracle") {
  CounterRng rng(23);
  SubsystemRegister ra({{"A", 2}});
  SubsystemRegister rb({{"B", 3}});
  SubsystemRegister rc({{"C", 2}});
  DensityOperator a = random_state(rng, ra), b = random_state(rng, rb), c = random_state(rng, rc);
  DensityOperator abc = tensor(tensor(a, b), c);
  DensityOperator ac = partial_trace(abc, {"B"});
  CHECK(ac.reg() == ra.merged(rc));
  CHECK((ac.matrix() - kron(a.matrix(), c.matrix())).cwiseAbs().maxCoeff() < 1e-12);
  DensityOperator only_b = marginal(abc, {"B"});
  CHECK((only_b.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("purification traces back to the state") {
  CounterRng rng(24);
  SubsystemRegister reg({{"A", 3}});
  DensityOperator rho = random_state(rng, reg);
  PureState phi = purify(rho, "_P");
  DensityOperator full = phi.to_density();
  DensityOperator back = partial_trace(full, {"_P"});
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("purification of a subnormalized state keeps the trace") {
  CounterRng rng(25);
  SubsystemRegister reg({{"A", 2}});
  Matrix g = rng.gaussian_matrix(2, 2);
  Matrix p = g * g.adjoint();
  p *= 0.7 / p.trace().real();
  DensityOperator rho(p, reg);
  PureState phi = purify(rho, "_P");
  CHECK(phi.vec().squaredNorm() == doctest::Approx(0.7));
  DensityOperator back = partial_trace(phi.to_density(), {"_P"});
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("purifier dimension equals the rank") {
  SubsystemRegister reg({{"A", 4}});
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = 0.5;
  p(1, 1) = 0.5;  // rank 2
  DensityOperator rho(p, reg);
  PureState phi = purify(rho, "_P");
  CHECK(phi.reg().dim_of("_P") == 2);
}

TEST_CASE("purification of multipartite state") {
  CounterRng rng(26);
  SubsystemRegister reg({{"A", 2}, {"B", 2}});
  DensityOperator rho = random_state(rng, reg);
  PureState phi = purify(rho, "_P");
  DensityOperator back = partial_trace(phi.to_density(), {"_P"});
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  // marginals of the purification on A alone agree as well
  DensityOperator ma = marginal(phi.to_density(), {"A"});
  DensityOperator ma2 = marginal(rho, {"A"});
  CHECK((ma.matrix() - ma2.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("maximally entangled and maximally mixed") {
  DensityOperator full = maximally_entangled("A", "B", 3);
  DensityOperator ma = marginal(full, {"A"});
  CHECK((ma.matrix() - Matrix::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff() < 1e-12);
  SubsystemRegister reg({{"X", 5}});
  DensityOperator mm = maximally_mixed(reg);
  CHECK(mm.matrix().trace().real() == doctest::Approx(1.0));
  CHECK((mm.matrix() - Matrix::Identity(5, 5) / 5.0).cwiseAbs().maxCoeff() < 1e-14);
}
