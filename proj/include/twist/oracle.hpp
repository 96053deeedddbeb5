#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twist/denot.hpp"
#include "twist/interp.hpp"

namespace twist {

// Measures every qubit outside keep, enumerating all outcome combinations
// above the probability floor. The surviving states live over keep only.
struct ImplicitBranch {
  double prob = 1.0;
  PureState state;
  OutcomeMap outcomes;
};
std::vector<ImplicitBranch> implicit_measure(const PureState& psi,
                                             const std::vector<QName>& keep,
                                             double prune);

// Equality of (state, value) configurations up to a renaming of qubits and
// a global phase. The states must live exactly over their values' qubits.
bool qubit_equivalent(const PureState& a, const ExprPtr& va,
                      const PureState& b, const ExprPtr& vb, double tol);
// Same, for bare register trees.
bool qubit_equivalent_q(const PureState& a, const QValPtr& qa,
                        const PureState& b, const QValPtr& qb, double tol);

// Purity of the program result: every execution, followed by every way of
// implicitly measuring the qubits outside the result value, must yield
// pairwise equivalent configurations.
struct PurityReport {
  bool pure = true;
  std::string detail;  // first counterexample when impure
};
PurityReport purity_oracle(const Program& p, const RunOptions& opt);

// The same purity check applied at each split<P>/cast<P> site, once per
// dynamic occurrence, once per component whose purity the site asserts
// (component 0 = left/whole, 1 = right of a split pair).
struct SitePurity {
  int64_t origin = 0;
  int seq = 0;
  Span span;
  bool is_split = true;
  int component = 0;
  bool pure = true;
  std::string detail;
};
std::vector<SitePurity> site_purity_oracle(const Program& p,
                                           const RunOptions& opt);

// Compares the density evaluator against the branch-sum reconstruction
// from the pure simulator: sum of p_i |psi_i><psi_i| tensor the observed
// outcomes as basis states, aligned to the density state's qubit names.
struct AgreementReport {
  bool ok = true;
  double max_dev = 0.0;   // entrywise deviation of the two density matrices
  double prob_sum = 0.0;  // enumerated path probability mass
  std::string detail;
};
AgreementReport check_agreement(const Program& p, const RunOptions& ropt,
                                const DenotOptions& dopt);

}  // namespace twist
