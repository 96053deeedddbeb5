#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "twist/ast.hpp"
#include "twist/qstate.hpp"
#include "twist/source.hpp"

namespace twist {

// Measurement outcomes observed along one execution; one entry per qubit.
using OutcomeMap = std::map<QName, bool>;

// One runtime verification record: a split<P> separability test (pure
// simulator) or a split<P>/cast<P> density assertion (mixed evaluator).
struct VerifyEvent {
  Span span;
  int64_t origin = 0;
  bool is_split = true;
  double lambda2 = 0.0;  // largest discarded Schmidt coefficient; -1 if n/a
  bool passed = true;
};

// split<P> separability condition failed at runtime.
class SplitAbort : public TwistError {
 public:
  SplitAbort(Diagnostic d, std::vector<double> lam)
      : TwistError(std::move(d)), lambda(std::move(lam)) {}
  std::vector<double> lambda;  // Schmidt spectrum of the failing cut
};

// A well-typed configuration could not step: an interpreter bug.
class StuckError : public TwistError {
 public:
  using TwistError::TwistError;
};

class BranchExplosion : public TwistError {
 public:
  using TwistError::TwistError;
};

struct RunOptions {
  uint64_t seed = 0;
  int max_qubits = 24;
  double tol = 1e-9;
  int max_branch_points = 20;  // per path, enumeration only
  double prune = 1e-12;        // path probability floor, enumeration only
  // Audit after every step that each P-annotated value in the residual is
  // separable from the rest of the state. Slow; tests only.
  bool instrument = false;
  // Called on the initial configuration and after every step of run_pure
  // with the residual expression and the quantum state. Tests only.
  std::function<void(const ExprPtr&, const PureState&)> on_config;
};

struct RunResult {
  ExprPtr value;  // closed value expression
  PureState state;
  OutcomeMap outcomes;
  std::vector<VerifyEvent> events;
  uint64_t seed = 0;
  int64_t steps = 0;
};

struct ExecBranch {
  double prob = 1.0;
  PureState state;
  ExprPtr value;
  OutcomeMap outcomes;
  std::vector<VerifyEvent> events;
};

// State captured when a split<P> or cast<P> redex fires, before rewriting.
struct SiteSnapshot {
  int64_t origin = 0;
  int seq = 0;  // occurrence index of this origin along the path
  Span span;
  bool is_split = true;
  PureState state;
  ExprPtr operand;  // the value the assertion covers
  double prob = 1.0;
  OutcomeMap outcomes;
};

// Value predicate over configuration expressions: BoolLit, QLit, FunRef,
// and pairs of values.
bool is_value(const ExprPtr& e);
// Ordered qubit names referenced by a value expression.
std::vector<QName> value_refs(const ExprPtr& e);
// Renders a value: T, F, q3, [q1, q2], (v1, v2), f. Booleans produced by a
// measurement carry the measured qubit in Expr::qval; rendering ignores it.
std::string value_str(const ExprPtr& e);

// Seeded single run; samples each measurement. Requires a typechecked
// program (passing the static analysis first is the soundness contract for
// the unchecked cast rule; the driver enforces that, not this function).
RunResult run_pure(const Program& p, const RunOptions& opt);

// Explores both outcomes of every measurement, pruning below opt.prune.
// Optionally records assertion-site snapshots for the purity oracle.
std::vector<ExecBranch> enumerate_executions(const Program& p,
                                             const RunOptions& opt,
                                             std::vector<SiteSnapshot>* snaps);
inline std::vector<ExecBranch> enumerate_executions(const Program& p,
                                                    const RunOptions& opt) {
  return enumerate_executions(p, opt, nullptr);
}

// Re-types a closed configuration expression with quantum literals typed by
// the ambient qubit domain. Enforces linear use: every literal qubit must be
// in the domain and no qubit may be referenced twice. Returns the type;
// throws TwistError on violation. Kept independent of the elaborating
// checker so the two can serve as cross-validating oracles.
TypePtr strict_type(const ExprPtr& e, const Program& prog,
                    const std::vector<QName>& domain);

}  // namespace twist
