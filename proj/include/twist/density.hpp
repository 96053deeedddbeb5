#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "twist/qstate.hpp"

namespace twist {

// Partial density matrix over named qubits: Hermitian, positive
// semidefinite, 0 <= trace <= 1. Same axis convention as PureState
// (first name = most significant bit). Value semantics.
class PartialDensity {
 public:
  PartialDensity() : mat_(1, 1) { mat_(0, 0) = 1.0; }  // empty domain, tr 1

  static PartialDensity from_pure(const PureState& s);

  int qubits() const { return static_cast<int>(names_.size()); }
  const std::vector<QName>& names() const { return names_; }
  const Eigen::MatrixXcd& mat() const { return mat_; }
  bool has(QName a) const;
  double trace() const { return mat_.trace().real(); }

  // Tensors in |0><0| for a fresh name; capacity as in PureState.
  void alloc(QName a, int max_qubits);

  // rho -> U rho U+
  void conjugate(GateKind g, const Rational& phase,
                 const std::vector<QName>& targets);

  // Unnormalized P rho P for outcome on qubit a; the qubit stays in the
  // domain. Trace becomes the branch weight.
  void project(QName a, bool outcome);
  // P0 rho P0 + P1 rho P1: kills cross terms in a without removing it.
  void dephase(QName a);

  // Traces out the given qubits; domain shrinks to the complement.
  PartialDensity partial_trace(const std::vector<QName>& over) const;

  // tr(rho^2) == (tr rho)^2 within tol. Requires trace > tol.
  bool purity_rank_test(double tol) const;

  // True iff the reduced state on part is pure and rho factors as
  // (rho_part / tr) (x) rho_rest entrywise within tol (dimension-scaled).
  bool pure_substate_test(const std::vector<QName>& part, double tol) const;

  // Pads each side with |0><0| for names only the other side has, then
  // aligns the second to the first's axis order. Domains equal afterward.
  static void match_sizes(PartialDensity& r1, PartialDensity& r2);

  void rename(const std::map<QName, QName>& m);
  void reorder(const std::vector<QName>& order);

  // this += w * o, aligning o's axes to this domain (same name set).
  void accumulate(const PartialDensity& o, double w);
  void scale(double w) { mat_ *= w; }
  PartialDensity tensor(const PartialDensity& o) const;

  double max_abs_diff(const PartialDensity& o) const;
  std::string dump() const;

 private:
  int axis(QName a) const;

  std::vector<QName> names_;
  Eigen::MatrixXcd mat_;
};

}  // namespace twist
