#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "twist/ast.hpp"

namespace twist {

// Allocation beyond the configured qubit cap. The interpreter converts this
// into a source-located diagnostic.
class CapacityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

using cplx = std::complex<double>;

// Runtime qubit identity. Fresh names are issued by the interpreter;
// printed as q<N>.
using QName = int32_t;
std::string qname_str(QName a);

// Unitary for a gate as a 2^k x 2^k matrix over the flattened register
// order (first register component = most significant local bit).
Eigen::MatrixXcd gate_matrix(GateKind g, const Rational& phase);

struct SchmidtResult {
  std::vector<double> lambda;  // descending, padded sense: all computed values
  Eigen::VectorXcd left;       // dominant factor over A
  Eigen::VectorXcd right;      // dominant factor over the complement
};

// Pure quantum state over named qubits. First-allocated qubit is the most
// significant bit of the basis index. Value semantics throughout.
class PureState {
 public:
  PureState() : amps_(1) { amps_(0) = 1.0; }  // the empty state

  int qubits() const { return static_cast<int>(names_.size()); }
  const std::vector<QName>& names() const { return names_; }
  const Eigen::VectorXcd& amps() const { return amps_; }
  bool has(QName a) const;

  // Tensors |0> for a fresh name. Throws capacity error beyond max_qubits.
  void alloc(QName a, int max_qubits);

  void apply_gate(GateKind g, const Rational& phase,
                  const std::vector<QName>& targets);

  struct MeasureOut {
    bool outcome;
    double prob;  // probability of the outcome that occurred
  };
  // Samples with the uniform draw u in [0,1); removes the qubit.
  MeasureOut measure(QName a, double u);
  // Forces one outcome; returns its probability and removes the qubit.
  // The state is renormalized unless the probability is ~0 (then zeroed).
  double project(QName a, bool outcome);

  SchmidtResult schmidt(const std::vector<QName>& part) const;
  bool separable(const std::vector<QName>& part, double tol) const;
  // On success writes the two factors (over part / over the rest).
  bool factor(const std::vector<QName>& part, double tol, PureState& fa,
              PureState& fb) const;

  PureState tensor(const PureState& o) const;
  void rename(const std::map<QName, QName>& m);
  // Reorders the internal axes to the given name order (same name set).
  void reorder(const std::vector<QName>& order);

  double norm() const { return amps_.norm(); }
  // |<this|o>| over the same name set; o is aligned to this order first.
  double overlap_abs(const PureState& o) const;

  std::string dump() const;

 private:
  int axis(QName a) const;  // throws logic_error if absent
  void drop_axis(int ax, bool kept_bit);

  std::vector<QName> names_;
  Eigen::VectorXcd amps_;
};

bool equal_up_to_phase(const PureState& a, const PureState& b, double tol);

}  // namespace twist
