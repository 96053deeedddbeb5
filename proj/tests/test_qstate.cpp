#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "twist/kernels.hpp"
#include "twist/qstate.hpp"

using namespace twist;

namespace {

constexpr double kTol = 1e-9;

PureState fresh(int n) {
  PureState s;
  for (int i = 1; i <= n; ++i) s.alloc(i, 24);
  return s;
}

void g1(PureState& s, GateKind g, QName a) { s.apply_gate(g, {}, {a}); }
void g2(PureState& s, GateKind g, QName a, QName b) {
  s.apply_gate(g, {}, {a, b});
}

PureState bell() {
  PureState s = fresh(2);
  g1(s, GateKind::H, 1);
  g2(s, GateKind::CNOT, 1, 2);
  return s;
}

PureState random_circuit(int n, int depth, uint64_t seed) {
  PureState s = fresh(n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 8);
  std::uniform_int_distribution<int> qd(1, n);
  for (int step = 0; step < depth; ++step) {
    GateKind g = static_cast<GateKind>(pick(rng));
    int k = gate_qubits(g);
    if (k > n) {
      --step;
      continue;
    }
    std::vector<QName> ts;
    while (static_cast<int>(ts.size()) < k) {
      QName c = qd(rng);
      bool dup = false;
      for (QName t : ts) dup = dup || t == c;
      if (!dup) ts.push_back(c);
    }
    Rational ph{1, 4};
    s.apply_gate(g, ph, ts);
  }
  return s;
}

}  // namespace

TEST_CASE("every gate matrix is unitary") {
  for (int gi = 0; gi <= 8; ++gi) {
    GateKind g = static_cast<GateKind>(gi);
    for (Rational ph : {Rational{1, 4}, Rational{3, 8}, Rational{1, 1}}) {
      Eigen::MatrixXcd u = gate_matrix(g, ph);
      Eigen::MatrixXcd err =
          u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
      CHECK(err.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("allocation tensors in |0> with the first qubit most significant") {
  PureState s;
  CHECK(s.qubits() == 0);
  CHECK(s.amps().size() == 1);
  CHECK(std::abs(s.amps()(0) - 1.0) < kTol);

  s.alloc(7, 24);
  REQUIRE(s.amps().size() == 2);
  CHECK(std::abs(s.amps()(0) - 1.0) < kTol);

  g1(s, GateKind::X, 7);  // |1>
  s.alloc(9, 24);         // |1>_7 (x) |0>_9
  REQUIRE(s.amps().size() == 4);
  CHECK(std::abs(s.amps()(2) - 1.0) < kTol);  // index 0b10

  CHECK_THROWS_AS(s.alloc(7, 24), std::logic_error);
  CHECK_THROWS_AS(s.alloc(10, 2), CapacityError);
}

TEST_CASE("H produces the even superposition") {
  PureState s = fresh(1);
  g1(s, GateKind::H, 1);
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(s.amps()(0) - r) < kTol);
  CHECK(std::abs(s.amps()(1) - r) < kTol);
}

TEST_CASE("the bell state and its Schmidt spectrum") {
  PureState s = bell();
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(s.amps()(0) - r) < kTol);
  CHECK(std::abs(s.amps()(3) - r) < kTol);
  CHECK(std::abs(s.amps()(1)) < kTol);

  SchmidtResult sr = s.schmidt({1});
  REQUIRE(sr.lambda.size() == 2);
  CHECK(std::abs(sr.lambda[0] - r) < kTol);
  CHECK(std::abs(sr.lambda[1] - r) < kTol);
  CHECK(!s.separable({1}, kTol));
}

TEST_CASE("a product of two plus states is separable with lambda = (1,0)") {
  PureState s = fresh(2);
  g1(s, GateKind::H, 1);
  g1(s, GateKind::H, 2);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(s.amps()(i) - 0.5) < kTol);
  SchmidtResult sr = s.schmidt({1});
  CHECK(std::abs(sr.lambda[0] - 1.0) < kTol);
  CHECK(std::abs(sr.lambda[1]) < kTol);
  CHECK(s.separable({1}, kTol));
  CHECK(s.separable({}, kTol));
  CHECK(s.separable({1, 2}, kTol));
}

TEST_CASE("CPHASE 1/4 multiplies |11> by i and fixes the rest") {
  for (int basis = 0; basis < 4; ++basis) {
    PureState s = fresh(2);
    if (basis & 2) g1(s, GateKind::X, 1);
    if (basis & 1) g1(s, GateKind::X, 2);
    s.apply_gate(GateKind::CPHASE, {1, 4}, {1, 2});
    cplx want = basis == 3 ? cplx(0, 1) : cplx(1, 0);
    CHECK(std::abs(s.amps()(basis) - want) < kTol);
  }
}

TEST_CASE("TOF and FRED act on the expected basis states") {
  {
    PureState s = fresh(3);
    g1(s, GateKind::X, 1);
    g1(s, GateKind::X, 2);  // |110>
    s.apply_gate(GateKind::TOF, {}, {1, 2, 3});
    CHECK(std::abs(s.amps()(7) - 1.0) < kTol);  // |111>
    s.apply_gate(GateKind::TOF, {}, {1, 2, 3});
    CHECK(std::abs(s.amps()(6) - 1.0) < kTol);  // back to |110>
  }
  {
    PureState s = fresh(3);
    g1(s, GateKind::X, 1);
    g1(s, GateKind::X, 3);  // |101>
    s.apply_gate(GateKind::FRED, {}, {1, 2, 3});
    CHECK(std::abs(s.amps()(6) - 1.0) < kTol);  // |110>
  }
  {
    PureState s = fresh(3);
    g1(s, GateKind::X, 2);
    g1(s, GateKind::X, 3);  // |011>: control clear, no swap
    s.apply_gate(GateKind::FRED, {}, {1, 2, 3});
    CHECK(std::abs(s.amps()(3) - 1.0) < kTol);
  }
}

TEST_CASE("measuring a definite qubit is deterministic and removes it") {
  PureState s = fresh(1);
  g1(s, GateKind::X, 1);
  auto out = s.measure(1, 0.999999);
  CHECK(out.outcome == true);
  CHECK(std::abs(out.prob - 1.0) < kTol);
  CHECK(s.qubits() == 0);
  CHECK(std::abs(s.amps()(0) - 1.0) < kTol);
}

TEST_CASE("measuring half a bell pair collapses the other half") {
  {
    PureState s = bell();
    auto out = s.measure(1, 0.3);  // u < 1/2: outcome T
    CHECK(out.outcome == true);
    CHECK(std::abs(out.prob - 0.5) < kTol);
    REQUIRE(s.qubits() == 1);
    CHECK(std::abs(s.amps()(1) - 1.0) < kTol);  // |1>
  }
  {
    PureState s = bell();
    auto out = s.measure(1, 0.7);
    CHECK(out.outcome == false);
    CHECK(std::abs(out.prob - 0.5) < kTol);
    CHECK(std::abs(s.amps()(0) - 1.0) < kTol);  // |0>
  }
  {
    PureState a = bell(), b = bell();
    double pt = a.project(1, true), pf = b.project(1, false);
    CHECK(std::abs(pt + pf - 1.0) < 1e-12);
  }
}

TEST_CASE("gate sequences preserve the norm") {
  PureState s = random_circuit(4, 60, 11);
  CHECK(std::abs(s.norm() - 1.0) < kTol);
}

TEST_CASE("allocation order does not change the physics") {
  // same circuit on names 1,2 allocated in opposite orders
  PureState a;
  a.alloc(1, 24);
  a.alloc(2, 24);
  PureState b;
  b.alloc(2, 24);
  b.alloc(1, 24);
  for (PureState* s : {&a, &b}) {
    g1(*s, GateKind::H, 1);
    g2(*s, GateKind::CNOT, 1, 2);
    g1(*s, GateKind::Z, 2);
  }
  b.reorder({1, 2});
  CHECK(a.overlap_abs(b) >= 1.0 - kTol);
  CHECK(equal_up_to_phase(a, b, kTol));
}

TEST_CASE("factor and tensor round-trip") {
  PureState a = random_circuit(2, 25, 5);
  PureState b0 = random_circuit(2, 25, 6);
  // disjoint names for the second factor
  PureState b;
  b.alloc(11, 24);
  b.alloc(12, 24);
  std::map<QName, QName> mm{{1, 11}, {2, 12}};
  PureState bsrc = b0;
  bsrc.rename(mm);
  bsrc.reorder({11, 12});
  b = bsrc;

  PureState joint = a.tensor(b);
  CHECK(std::abs(joint.norm() - 1.0) < kTol);
  PureState fa, fb;
  REQUIRE(joint.factor({1, 2}, kTol, fa, fb));
  CHECK(equal_up_to_phase(fa, a, 1e-6));
  CHECK(equal_up_to_phase(fb, b, 1e-6));
  // and the tensor of the factors reproduces the joint state
  CHECK(equal_up_to_phase(fa.tensor(fb), joint, 1e-6));

  CHECK(!bell().factor({1}, kTol, fa, fb));
}

TEST_CASE("schmidt spectrum is invariant under local unitaries") {
  PureState s = random_circuit(4, 40, 9);
  SchmidtResult before = s.schmidt({1, 2});
  g1(s, GateKind::H, 1);
  g1(s, GateKind::Z, 2);
  g2(s, GateKind::CNOT, 1, 2);  // still local to the {1,2} block
  SchmidtResult after = s.schmidt({1, 2});
  REQUIRE(before.lambda.size() == after.lambda.size());
  for (size_t i = 0; i < before.lambda.size(); ++i)
    CHECK(std::abs(before.lambda[i] - after.lambda[i]) < kTol);
}

TEST_CASE("global phase never matters") {
  PureState s = random_circuit(3, 30, 3);
  PureState t = s;
  // CPHASE twice on |11..> subspace induces no *global* phase, so instead
  // compare against the same state directly and after a Z Z sandwich that
  // composes to a phase on a basis state amplitude pattern.
  CHECK(equal_up_to_phase(s, t, kTol));
  PureState z0 = fresh(1), z1 = fresh(1);
  g1(z1, GateKind::X, 1);
  CHECK(!equal_up_to_phase(z0, z1, kTol));
}

TEST_CASE("serial and parallel kernels agree") {
  kernels::Mode saved = kernels::mode;
  kernels::mode = kernels::Mode::Serial;
  PureState a = random_circuit(5, 80, 21);
  kernels::mode = kernels::Mode::Parallel;
  PureState b = random_circuit(5, 80, 21);
  kernels::mode = saved;
  CHECK((a.amps() - b.amps()).cwiseAbs().maxCoeff() <= 1e-12);
  double p1 = kernels::prob_one_serial(a.amps().data(), a.amps().size(), 2);
  double p2 = kernels::prob_one_parallel(a.amps().data(), a.amps().size(), 2);
  CHECK(std::abs(p1 - p2) <= 1e-12);
}

TEST_CASE("state dump lists names then one line per basis state") {
  PureState s = fresh(1);
  g1(s, GateKind::X, 1);
  CHECK(s.dump() == "names: q1\n|0> 0 0\n|1> 1 0\n");
}
