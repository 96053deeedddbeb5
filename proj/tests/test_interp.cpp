#include <cmath>
#include <complex>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "twist/desugar.hpp"
#include "twist/interp.hpp"
#include "twist/parser.hpp"
#include "twist/typecheck.hpp"

using namespace twist;

namespace {

Program pipe(const std::string& src) {
  Program core = desugar(parse_program(src, "t.tw"));
  typecheck(core);
  return core;
}

Program pipe_nocheck(const std::string& src) {
  return desugar(parse_program(src, "t.tw"));
}

// Deferred-correction teleport: corrections are controlled gates applied
// before the ancilla measurements, so the output factors on every path.
// The prelude string prepares the message qubit from |0>.
std::string teleport_src(const std::string& prelude, bool with_cz) {
  std::string cz = with_cz
                       ? "  let (m4 : qubit<M>, b3 : qubit<M>) = CZ (m3, b2) "
                         "in\n"
                       : "  let m4 = m3 in\n  let b3 = b2 in\n";
  return
      "fun main () : qubit<P> =\n"
      "  let m = " + prelude + " in\n"
      "  let (a : qubit<M>, b : qubit<M>) = CNOT (H (qinit ()), qinit ()) "
      "in\n"
      "  let (m2 : qubit<M>, a2 : qubit<M>) = CNOT (m, a) in\n"
      "  let m3 = H (m2) in\n"
      "  let (a3 : qubit<M>, b2 : qubit<M>) = CNOT (a2, b) in\n" +
      cz +
      "  let (ma : (qubit & qubit)<P>, out : qubit<P>) =\n"
      "    split<P>(cast<P>(entangle<M>(entangle<M>(m4, a3), b3))) in\n"
      "  let (m5 : qubit<M>, a5 : qubit<M>) = ma in\n"
      "  let _ = measure m5 in\n"
      "  let _ = measure a5 in\n"
      "  out\n";
}

using C = std::complex<double>;

// 2x2 gate action on a single amplitude pair, for independent expectations.
struct Vec2 {
  C a{1.0, 0.0}, b{0.0, 0.0};
  void h() {
    const double s = 1.0 / std::sqrt(2.0);
    C na = s * (a + b), nb = s * (a - b);
    a = na;
    b = nb;
  }
  void x() { std::swap(a, b); }
  void z() { b = -b; }
};

double fidelity(const PureState& st, QName q, const Vec2& v) {
  REQUIRE(st.qubits() == 1);
  REQUIRE(st.has(q));
  Eigen::VectorXcd amps(2);
  amps << v.a, v.b;
  return std::abs(amps.dot(st.amps()));
}

template <typename F>
std::string error_text(F&& fn) {
  try {
    fn();
  } catch (const TwistError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("coin flip enumerates two half-probability branches") {
  Program p = pipe("fun main () : bool = measure (H (qinit ()))");
  RunOptions opt;
  auto br = enumerate_executions(p, opt);
  REQUIRE(br.size() == 2);
  double seen[2] = {-1, -1};
  for (const auto& b : br) {
    REQUIRE(b.value->k == ExprKind::BoolLit);
    seen[b.value->bval ? 1 : 0] = b.prob;
    CHECK(b.state.qubits() == 0);
    CHECK(b.outcomes.size() == 1);
  }
  CHECK(seen[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(seen[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("run_pure is deterministic per seed and covers both outcomes") {
  Program p = pipe("fun main () : bool = measure (H (qinit ()))");
  int heads = 0;
  for (uint64_t s = 0; s < 64; ++s) {
    RunOptions o;
    o.seed = s;
    RunResult r1 = run_pure(p, o);
    RunResult r2 = run_pure(p, o);
    REQUIRE(r1.value->k == ExprKind::BoolLit);
    CHECK(r1.value->bval == r2.value->bval);
    CHECK(r1.outcomes == r2.outcomes);
    if (r1.value->bval) ++heads;
  }
  CHECK(heads > 10);
  CHECK(heads < 54);
}

TEST_CASE("deterministic measurement prunes the impossible branch") {
  Program p = pipe("fun main () : bool = measure (qinit ())");
  auto br = enumerate_executions(p, RunOptions{});
  REQUIRE(br.size() == 1);
  CHECK(br[0].prob == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(br[0].value->bval == false);
}

TEST_CASE("teleport preserves the message on every branch") {
  struct Case {
    std::string prelude;
    std::vector<char> ops;  // applied to |0> in order
  };
  const Case cases[] = {
      {"qinit ()", {}},
      {"H (qinit ())", {'h'}},
      {"Z (H (qinit ()))", {'h', 'z'}},
      {"X (qinit ())", {'x'}},
      {"H (Z (H (qinit ())))", {'h', 'z', 'h'}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.prelude);
    Program p = pipe(teleport_src(c.prelude, true));
    Vec2 want;
    for (char op : c.ops) {
      if (op == 'h') want.h();
      if (op == 'x') want.x();
      if (op == 'z') want.z();
    }
    auto br = enumerate_executions(p, RunOptions{});
    REQUIRE(br.size() == 4);
    double psum = 0.0;
    for (const auto& b : br) {
      psum += b.prob;
      REQUIRE(value_refs(b.value).size() == 1);
      const QName out = value_refs(b.value)[0];
      CHECK(fidelity(b.state, out, want) >= 1.0 - 1e-9);
      // the explicit split<P> fired and passed
      REQUIRE(b.events.size() == 1);
      CHECK(b.events[0].passed);
      CHECK(b.events[0].is_split);
      CHECK(b.events[0].lambda2 <= 1e-9);
    }
    CHECK(psum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("teleport without the CZ correction aborts at split<P>") {
  Program p = pipe(teleport_src("H (qinit ())", false));
  CHECK_THROWS_AS(enumerate_executions(p, RunOptions{}), SplitAbort);
  try {
    enumerate_executions(p, RunOptions{});
  } catch (const SplitAbort& e) {
    REQUIRE(e.lambda.size() >= 2);
    // the discarded branch carries half the weight
    CHECK(e.lambda[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(e.diag.code == errc::split_abort);
  }
}

TEST_CASE("splitting a product state records a passing event") {
  Program p = pipe(
      "fun main () : qubit<P> * qubit<P> =\n"
      "  let (x : qubit<P>, y : qubit<P>) = CNOT (qinit (), qinit ()) in\n"
      "  (x, y)\n");
  RunResult r = run_pure(p, RunOptions{});
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].passed);
  CHECK(r.events[0].lambda2 <= 1e-12);
  CHECK(value_str(r.value) == "(q1, q2)");
  CHECK(r.state.qubits() == 2);
}

TEST_CASE("splitting a Bell pair aborts with the entangled spectrum") {
  Program p = pipe(
      "fun main () : qubit<P> * qubit<P> =\n"
      "  let (x : qubit<P>, y : qubit<P>) = CNOT (H (qinit ()), qinit ()) "
      "in\n"
      "  (x, y)\n");
  CHECK_THROWS_AS(run_pure(p, RunOptions{}), SplitAbort);
}

TEST_CASE("entangled pair values render with brackets") {
  Program p = pipe(
      "fun main () : (qubit & qubit)<M> = CNOT (H (qinit ()), qinit ())\n");
  RunResult r = run_pure(p, RunOptions{});
  CHECK(value_str(r.value) == "[q1, q2]");
  CHECK(r.events.empty());
}

TEST_CASE("function bodies are cloned per application") {
  Program p = pipe(
      "fun coin () : bool = measure (H (qinit ()))\n"
      "fun main () : bool * bool = (coin (), coin ())\n");
  auto br = enumerate_executions(p, RunOptions{});
  REQUIRE(br.size() == 4);
  std::set<std::string> vals;
  for (const auto& b : br) {
    CHECK(b.prob == doctest::Approx(0.25).epsilon(1e-12));
    vals.insert(value_str(b.value));
  }
  CHECK(vals == std::set<std::string>{"(F, F)", "(F, T)", "(T, F)",
                                      "(T, T)"});
}

TEST_CASE("purity-generic functions instantiate at each call") {
  Program p = pipe(
      "fun flip (q : qubit<'p>) : qubit<'p> = X (q)\n"
      "fun main () : bool =\n"
      "  let q = flip (qinit ()) in\n"
      "  measure q\n");
  auto br = enumerate_executions(p, RunOptions{});
  REQUIRE(br.size() == 1);
  CHECK(br[0].value->bval == true);
  CHECK(br[0].prob == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration refuses paths with too many branch points") {
  std::string src = "fun main () : bool =\n";
  for (int i = 0; i <= 20; ++i)
    src += "  let x" + std::to_string(i) + " = measure (H (qinit ())) in\n";
  src += "  x20\n";
  Program p = pipe(src);
  CHECK_THROWS_AS(enumerate_executions(p, RunOptions{}), BranchExplosion);
  // sampling one path has no such limit
  RunResult r = run_pure(p, RunOptions{});
  CHECK(r.outcomes.size() == 21);
}

TEST_CASE("measured booleans remember their source qubit") {
  Program p = pipe("fun main () : bool = measure (H (qinit ()))");
  RunResult r = run_pure(p, RunOptions{});
  REQUIRE(r.value->k == ExprKind::BoolLit);
  REQUIRE(r.value->qval != nullptr);
  CHECK(r.value->qval->leaf());
  CHECK(static_cast<QName>(r.value->qval->name) == 1);
}

TEST_CASE("instrumented runs audit pure annotations silently") {
  Program p = pipe(teleport_src("H (qinit ())", true));
  RunOptions o;
  o.instrument = true;
  for (uint64_t s = 0; s < 4; ++s) {
    o.seed = s;
    CHECK_NOTHROW(run_pure(p, o));
  }
}

TEST_CASE("strict_type accepts machine configurations and main bodies") {
  Program p = pipe(teleport_src("H (qinit ())", true));
  const FunDecl* m = p.find("main");
  TypePtr t = strict_type(m->body, p, {});
  REQUIRE(t->k == TypeKind::Quantum);
  CHECK(t->pur.is_p());
  CHECK(t->shape->leaf());
}

TEST_CASE("strict_type rejects duplicated and dropped linear bindings") {
  Program dup = pipe_nocheck(
      "fun main () : qubit<P> * qubit<P> = let x = qinit () in (x, x)\n");
  std::string msg =
      error_text([&] { strict_type(dup.find("main")->body, dup, {}); });
  CHECK(msg.find("consumed twice") != std::string::npos);

  Program drop = pipe_nocheck(
      "fun main () : bool = let x = qinit () in true\n");
  msg = error_text([&] { strict_type(drop.find("main")->body, drop, {}); });
  CHECK(msg.find("never consumed") != std::string::npos);

  Program wild = pipe_nocheck(
      "fun main () : bool = let _ = qinit () in true\n");
  msg = error_text([&] { strict_type(wild.find("main")->body, wild, {}); });
  CHECK(msg.find("wildcard discards") != std::string::npos);
}

TEST_CASE("preservation: every run_pure configuration types the same") {
  Program p = pipe(teleport_src("Z (H (qinit ()))", true));
  RunOptions o;
  o.seed = 7;
  std::vector<std::string> types;
  o.on_config = [&](const ExprPtr& e, const PureState& st) {
    TypePtr t = strict_type(e, p, st.names());
    types.push_back(type_str(t));
  };
  run_pure(p, o);
  REQUIRE(types.size() > 10);
  for (const auto& t : types) CHECK(t == types.front());
}
