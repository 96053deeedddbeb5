#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "twist/density.hpp"
#include "twist/qstate.hpp"

using namespace twist;

namespace {

constexpr int CAP = 12;

PureState fresh(int n) {
  PureState s;
  for (int i = 1; i <= n; ++i) s.alloc(i, 24);
  return s;
}

PureState bell() {
  PureState s = fresh(2);
  s.apply_gate(GateKind::H, {}, {1});
  s.apply_gate(GateKind::CNOT, {}, {1, 2});
  return s;
}

struct Step {
  GateKind g;
  Rational phase;
  std::vector<QName> targets;
};

std::vector<Step> random_circuit(int n, int depth, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> gd(0, 8);
  std::vector<Step> out;
  while (static_cast<int>(out.size()) < depth) {
    auto g = static_cast<GateKind>(gd(rng));
    const int k = gate_qubits(g);
    if (k > n) continue;
    std::vector<QName> pool;
    for (int i = 1; i <= n; ++i) pool.push_back(i);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
    Rational ph{1, 4};
    if (g == GateKind::CPHASE && rng() % 2) ph = {3, 8};
    out.push_back({g, ph, pool});
  }
  return out;
}

PartialDensity pure_density(int n) {
  PartialDensity r;
  for (int i = 1; i <= n; ++i) r.alloc(i, CAP);
  return r;
}

}  // namespace

TEST_CASE("from_pure of |0> and of Bell") {
  PartialDensity r0 = PartialDensity::from_pure(fresh(1));
  REQUIRE(r0.qubits() == 1);
  CHECK(std::abs(r0.mat()(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(r0.mat()(0, 1)) < 1e-15);
  CHECK(std::abs(r0.mat()(1, 0)) < 1e-15);
  CHECK(std::abs(r0.mat()(1, 1)) < 1e-15);

  PartialDensity rb = PartialDensity::from_pure(bell());
  CHECK(rb.trace() == doctest::Approx(1.0).epsilon(1e-12));
  // |Phi+><Phi+|: four corner entries 1/2, all else 0.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const bool corner = (i == 0 || i == 3) && (j == 0 || j == 3);
      CHECK(std::abs(rb.mat()(i, j) - (corner ? 0.5 : 0.0)) < 1e-12);
    }
  CHECK(rb.purity_rank_test(1e-9));
}

TEST_CASE("alloc matches pure-state convention and enforces capacity") {
  PartialDensity r = pure_density(2);
  r.conjugate(GateKind::X, {}, {1});
  // |10>: first-allocated qubit is the most significant bit.
  CHECK(std::abs(r.mat()(2, 2) - 1.0) < 1e-15);

  PartialDensity s;
  s.alloc(7, 1);
  CHECK_THROWS_AS(s.alloc(8, 1), CapacityError);
  CHECK_THROWS_AS(s.alloc(7, 4), std::logic_error);
}

TEST_CASE("conjugate X on |0><0| gives |1><1|") {
  PartialDensity r = pure_density(1);
  r.conjugate(GateKind::X, {}, {1});
  CHECK(std::abs(r.mat()(1, 1) - 1.0) < 1e-14);
  CHECK(std::abs(r.mat()(0, 0)) < 1e-14);
  CHECK(std::abs(r.mat()(0, 1)) < 1e-14);
}

TEST_CASE("conjugate agrees with pure evolution on random circuits") {
  for (uint64_t seed : {11u, 22u, 33u}) {
    for (int n : {2, 4, 6}) {
      PureState s = fresh(n);
      PartialDensity r = PartialDensity::from_pure(s);
      for (const Step& st : random_circuit(n, 24, seed * 100 + n)) {
        s.apply_gate(st.g, st.phase, st.targets);
        r.conjugate(st.g, st.phase, st.targets);
      }
      PartialDensity want = PartialDensity::from_pure(s);
      CHECK(r.max_abs_diff(want) < 1e-9);
      CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("project keeps the qubit and weights the branch") {
  PartialDensity r = PartialDensity::from_pure(bell());
  PartialDensity t = r;
  t.project(1, true);
  REQUIRE(t.qubits() == 2);
  CHECK(t.trace() == doctest::Approx(0.5).epsilon(1e-12));
  // (1/2)|11><11|
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double want = (i == 3 && j == 3) ? 0.5 : 0.0;
      CHECK(std::abs(t.mat()(i, j) - want) < 1e-12);
    }

  PartialDensity f = r;
  f.project(1, false);
  CHECK(t.trace() + f.trace() == doctest::Approx(r.trace()).epsilon(1e-12));

  // Sum of the two projections equals the dephased state.
  f.accumulate(t, 1.0);
  PartialDensity d = r;
  d.dephase(1);
  CHECK(f.max_abs_diff(d) < 1e-12);
}

TEST_CASE("dephase kills cross terms only") {
  PureState s = fresh(1);
  s.apply_gate(GateKind::H, {}, {1});
  PartialDensity r = PartialDensity::from_pure(s);
  r.dephase(1);
  CHECK(std::abs(r.mat()(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(r.mat()(1, 1) - 0.5) < 1e-12);
  CHECK(std::abs(r.mat()(0, 1)) < 1e-12);
  CHECK(std::abs(r.mat()(1, 0)) < 1e-12);
  CHECK_FALSE(r.purity_rank_test(1e-9));
}

TEST_CASE("partial trace of a product recovers the factor") {
  PureState a = fresh(2);
  a.apply_gate(GateKind::H, {}, {1});
  a.apply_gate(GateKind::CPHASE, {1, 4}, {1, 2});
  PureState b = fresh(2);
  b.rename({{1, 11}, {2, 12}});
  b.apply_gate(GateKind::H, {}, {12});
  PartialDensity ra = PartialDensity::from_pure(a);
  PartialDensity rb = PartialDensity::from_pure(b);
  PartialDensity joint = ra.tensor(rb);

  PartialDensity got_b = joint.partial_trace({1, 2});
  REQUIRE(got_b.names() == std::vector<QName>({11, 12}));
  CHECK(got_b.max_abs_diff(rb) < 1e-12);

  PartialDensity got_a = joint.partial_trace({12, 11});
  REQUIRE(got_a.names() == std::vector<QName>({1, 2}));
  CHECK(got_a.max_abs_diff(ra) < 1e-12);
}

TEST_CASE("partial trace over half a Bell pair is I/2") {
  PartialDensity r = PartialDensity::from_pure(bell());
  PartialDensity h = r.partial_trace({1});
  REQUIRE(h.qubits() == 1);
  CHECK(std::abs(h.mat()(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(h.mat()(1, 1) - 0.5) < 1e-12);
  CHECK(std::abs(h.mat()(0, 1)) < 1e-12);
  CHECK_FALSE(h.purity_rank_test(1e-9));

  PartialDensity all = r.partial_trace({2, 1});
  CHECK(all.qubits() == 0);
  CHECK(all.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace is linear") {
  PartialDensity r1 = PartialDensity::from_pure(bell());
  PureState s = fresh(2);
  s.apply_gate(GateKind::X, {}, {2});
  PartialDensity r2 = PartialDensity::from_pure(s);

  PartialDensity blend = r1;
  blend.accumulate(r2, 3.0);

  PartialDensity lhs = blend.partial_trace({1});
  PartialDensity rhs = r1.partial_trace({1});
  rhs.accumulate(r2.partial_trace({1}), 3.0);
  CHECK(lhs.max_abs_diff(rhs) < 1e-12);
}

TEST_CASE("purity rank test: pure, scaled pure, maximally mixed") {
  PartialDensity pure = PartialDensity::from_pure(bell());
  CHECK(pure.purity_rank_test(1e-9));

  PartialDensity scaled = pure;
  scaled.accumulate(pure, -2.0 / 3.0);  // (1/3) rho
  CHECK(scaled.trace() == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(scaled.purity_rank_test(1e-9));

  PartialDensity mixed = pure.partial_trace({1});
  CHECK_FALSE(mixed.purity_rank_test(1e-9));

  PartialDensity zero = pure;
  zero.accumulate(pure, -1.0);
  CHECK_THROWS_AS(zero.purity_rank_test(1e-9), std::logic_error);
}

TEST_CASE("pure substate test") {
  // |1><1|_x (x) (I/2)_y: x is a pure substate, y is not.
  PartialDensity x = pure_density(1);
  x.conjugate(GateKind::X, {}, {1});
  PartialDensity y = PartialDensity::from_pure(bell()).partial_trace({1});
  y.rename({{2, 9}});
  PartialDensity joint = x.tensor(y);
  CHECK(joint.pure_substate_test({1}, 1e-9));
  CHECK_FALSE(joint.pure_substate_test({9}, 1e-9));

  // I/4 has no pure single-qubit substate.
  PartialDensity i4 = PartialDensity::from_pure(bell()).partial_trace({1});
  PartialDensity other = i4;
  other.rename({{2, 3}});
  PartialDensity quarter = i4.tensor(other);
  CHECK_FALSE(quarter.pure_substate_test({2}, 1e-9));
  CHECK_FALSE(quarter.pure_substate_test({3}, 1e-9));

  // Whole domain of a pure state passes trivially.
  PartialDensity whole = PartialDensity::from_pure(bell());
  CHECK(whole.pure_substate_test({1, 2}, 1e-9));
  // Entangled halves are not pure substates.
  CHECK_FALSE(whole.pure_substate_test({1}, 1e-9));
}

TEST_CASE("match_sizes pads with |0><0| and aligns") {
  PartialDensity a = pure_density(1);
  a.conjugate(GateKind::H, {}, {1});
  PartialDensity b;
  b.alloc(2, CAP);
  b.conjugate(GateKind::X, {}, {2});
  const double ta = a.trace(), tb = b.trace();

  PartialDensity a2 = a, b2 = b;
  PartialDensity::match_sizes(a2, b2);
  REQUIRE(a2.names() == b2.names());
  REQUIRE(a2.qubits() == 2);
  CHECK(a2.trace() == doctest::Approx(ta).epsilon(1e-12));
  CHECK(b2.trace() == doctest::Approx(tb).epsilon(1e-12));

  // The padded qubit really is |0>: tracing the original away leaves it.
  PartialDensity pad = a2.partial_trace({1});
  CHECK(std::abs(pad.mat()(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(pad.mat()(1, 1)) < 1e-12);

  // Equal domains: only alignment happens.
  PartialDensity c = PartialDensity::from_pure(bell());
  PartialDensity d = PartialDensity::from_pure(bell());
  std::vector<QName> rev = {2, 1};
  d.reorder(rev);
  PartialDensity::match_sizes(c, d);
  CHECK(c.names() == d.names());
  CHECK(c.max_abs_diff(d) < 1e-12);
}

TEST_CASE("reorder and rename") {
  PartialDensity r = PartialDensity::from_pure(bell());
  r.conjugate(GateKind::X, {}, {2});  // asymmetric under swap now
  PartialDensity t = r;
  t.reorder({2, 1});
  CHECK(t.names() == std::vector<QName>({2, 1}));
  t.reorder({1, 2});
  CHECK(t.max_abs_diff(r) < 1e-15);

  CHECK_THROWS_AS(t.rename(std::map<QName, QName>{{1, 2}}), std::logic_error);
  t.rename({{1, 5}, {2, 6}});
  CHECK(t.names() == std::vector<QName>({5, 6}));
}

TEST_CASE("hermiticity, positivity, trace bounds survive a pipeline") {
  std::mt19937_64 rng(404);
  PartialDensity r = pure_density(4);
  for (const Step& st : random_circuit(4, 16, 77)) {
    r.conjugate(st.g, st.phase, st.targets);
  }
  r.dephase(2);
  r.project(3, false);
  PartialDensity t = r.partial_trace({1});
  (void)rng;

  CHECK((t.mat() - t.mat().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.mat());
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
  CHECK(t.trace() > -1e-12);
  CHECK(t.trace() < 1.0 + 1e-12);
}

TEST_CASE("deferred measurement: dephase commutes with tracing out") {
  PureState s = fresh(3);
  for (const Step& st : random_circuit(3, 12, 909)) {
    s.apply_gate(st.g, st.phase, st.targets);
  }
  PartialDensity r = PartialDensity::from_pure(s);

  PartialDensity a = r;
  a.dephase(2);
  PartialDensity ta = a.partial_trace({2});
  PartialDensity tb = r.partial_trace({2});
  CHECK(ta.max_abs_diff(tb) < 1e-12);

  // Dephasing also commutes with gates on disjoint qubits.
  PartialDensity c = r;
  c.dephase(2);
  c.conjugate(GateKind::CNOT, {}, {1, 3});
  PartialDensity d = r;
  d.conjugate(GateKind::CNOT, {}, {1, 3});
  d.dephase(2);
  CHECK(c.max_abs_diff(d) < 1e-12);
}

TEST_CASE("tensor trace is multiplicative and domains must not overlap") {
  PartialDensity a = PartialDensity::from_pure(bell());
  a.project(1, true);  // trace 1/2
  PartialDensity b = pure_density(1);
  CHECK_THROWS_AS(a.tensor(b), std::logic_error);
  b.rename({{1, 8}});
  PartialDensity t = a.tensor(b);
  CHECK(t.trace() == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(t.names() == std::vector<QName>({1, 2, 8}));
}

TEST_CASE("dump golden") {
  PartialDensity r = pure_density(1);
  CHECK(r.dump() == "names: q1\n1+0i 0+0i\n0+0i 0+0i\n");
}
