#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "twist/ast.hpp"
#include "twist/density.hpp"
#include "twist/interp.hpp"
#include "twist/source.hpp"

namespace twist {

// Value of the density-matrix evaluator. Quantum registers are trees of
// Ref over Pair; a measurement result is a deferred bit (Defer) naming the
// dephased qubit that holds it.
struct DVal;
using DValPtr = std::shared_ptr<const DVal>;

enum class DValKind { Fun, Bool, Pair, Ref, Defer };

struct DVal {
  DValKind k = DValKind::Bool;
  bool b = false;     // Bool
  std::string fun;    // Fun: top-level declaration name
  DValPtr l, r;       // Pair
  QName q = 0;        // Ref / Defer

  static DValPtr boolean(bool v);
  static DValPtr fn(std::string name);
  static DValPtr pair(DValPtr a, DValPtr b);
  static DValPtr ref(QName q);
  static DValPtr defer(QName q);
};

// Ref leaves in order (the qubits of a quantum register value).
std::vector<QName> dval_refs(const DValPtr& v);
// Ref and Defer leaves in order.
std::vector<QName> dval_qubits(const DValPtr& v);
// T, F, q3, *q3 (deferred bit), (v1, v2), f.
std::string dval_str(const DValPtr& v);

// A split<P> or cast<P> purity assertion failed on the density state.
class BottomError : public TwistError {
 public:
  using TwistError::TwistError;
};

struct DenotOptions {
  int max_qubits = 12;
  double tol = 1e-9;
  // Branches whose accumulated weight falls below this are still evaluated
  // for shape, but their purity assertions are skipped: no execution
  // reaches them.
  double dead_branch = 1e-12;
};

struct DenotResult {
  PartialDensity rho;  // unnormalized only by numerical error; trace ~ 1
  DValPtr value;
  std::vector<VerifyEvent> events;
};

// Evaluates main under the density-matrix semantics. Measurement dephases
// the qubit and defers the outcome; an if over a deferred bit evaluates
// both projected branches and sums them, renaming the else-branch state
// onto the then-branch value. Purity assertions throw BottomError.
DenotResult eval_denot(const Program& p, const DenotOptions& opt);

}  // namespace twist
