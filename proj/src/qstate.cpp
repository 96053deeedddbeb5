#include "twist/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "twist/kernels.hpp"

namespace twist {

std::string qname_str(QName a) { return "q" + std::to_string(a); }

Eigen::MatrixXcd gate_matrix(GateKind g, const Rational& phase) {
  using M = Eigen::MatrixXcd;
  const double s = 1.0 / std::numbers::sqrt2;
  switch (g) {
    case GateKind::X: {
      M m = M::Zero(2, 2);
      m(0, 1) = m(1, 0) = 1;
      return m;
    }
    case GateKind::Z: {
      M m = M::Zero(2, 2);
      m(0, 0) = 1;
      m(1, 1) = -1;
      return m;
    }
    case GateKind::H: {
      M m(2, 2);
      m << s, s, s, -s;
      return m;
    }
    case GateKind::CNOT: {
      M m = M::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    }
    case GateKind::CZ: {
      M m = M::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    }
    case GateKind::SWAP: {
      M m = M::Zero(4, 4);
      m(0, 0) = m(3, 3) = m(1, 2) = m(2, 1) = 1;
      return m;
    }
    case GateKind::TOF: {
      M m = M::Identity(8, 8);
      m(6, 6) = m(7, 7) = 0;
      m(6, 7) = m(7, 6) = 1;
      return m;
    }
    case GateKind::FRED: {
      M m = M::Identity(8, 8);
      m(5, 5) = m(6, 6) = 0;
      m(5, 6) = m(6, 5) = 1;
      return m;
    }
    case GateKind::CPHASE: {
      M m = M::Identity(4, 4);
      const double ang =
          2.0 * std::numbers::pi * double(phase.num) / double(phase.den);
      m(3, 3) = std::polar(1.0, ang);
      return m;
    }
  }
  throw std::logic_error("unknown gate");
}

bool PureState::has(QName a) const {
  return std::find(names_.begin(), names_.end(), a) != names_.end();
}

int PureState::axis(QName a) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == a) return static_cast<int>(i);
  throw std::logic_error("unknown qubit " + qname_str(a));
}

void PureState::alloc(QName a, int max_qubits) {
  if (has(a)) throw std::logic_error("duplicate qubit " + qname_str(a));
  if (qubits() >= max_qubits)
    throw CapacityError("qubit capacity " + std::to_string(max_qubits) +
                        " exceeded");
  const int64_t dim = amps_.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim * 2);
  for (int64_t i = 0; i < dim; ++i) out(i * 2) = amps_(i);
  amps_ = std::move(out);
  names_.push_back(a);
}

void PureState::apply_gate(GateKind g, const Rational& phase,
                           const std::vector<QName>& targets) {
  const int k = gate_qubits(g);
  if (static_cast<int>(targets.size()) != k)
    throw std::logic_error("gate arity mismatch");
  const int n = qubits();
  int bits[3];
  for (int t = 0; t < k; ++t) bits[t] = n - 1 - axis(targets[t]);
  for (int t1 = 0; t1 < k; ++t1)
    for (int t2 = t1 + 1; t2 < k; ++t2)
      if (bits[t1] == bits[t2]) throw std::logic_error("duplicate gate target");
  const Eigen::MatrixXcd u = gate_matrix(g, phase);
  kernels::apply(amps_.data(), amps_.size(), bits, k, u);
}

void PureState::drop_axis(int ax, bool kept_bit) {
  const int n = qubits();
  const int p = n - 1 - ax;
  const int64_t w = int64_t{1} << p;
  const int64_t dim = amps_.size();
  Eigen::VectorXcd out(dim / 2);
  for (int64_t i = 0; i < dim; ++i) {
    if (((i & w) != 0) != kept_bit) continue;
    const int64_t low = i & (w - 1);
    out(((i >> (p + 1)) << p) | low) = amps_(i);
  }
  amps_ = std::move(out);
  names_.erase(names_.begin() + ax);
}

PureState::MeasureOut PureState::measure(QName a, double u) {
  const int ax = axis(a);
  const double p1 =
      kernels::prob_one(amps_.data(), amps_.size(), qubits() - 1 - ax);
  const bool outcome = u < p1;
  const double p = outcome ? p1 : 1.0 - p1;
  drop_axis(ax, outcome);
  if (p > 1e-300) amps_ /= std::sqrt(p);
  return {outcome, p};
}

double PureState::project(QName a, bool outcome) {
  const int ax = axis(a);
  const double p1 =
      kernels::prob_one(amps_.data(), amps_.size(), qubits() - 1 - ax);
  const double p = outcome ? p1 : 1.0 - p1;
  drop_axis(ax, outcome);
  if (p > 1e-300)
    amps_ /= std::sqrt(p);
  else
    amps_.setZero();
  return p;
}

SchmidtResult PureState::schmidt(const std::vector<QName>& part) const {
  const int n = qubits();
  const int a = static_cast<int>(part.size());
  const int b = n - a;
  SchmidtResult res;
  if (a == 0 || b == 0) {
    res.lambda = {amps_.norm()};
    res.left = a == 0 ? Eigen::VectorXcd::Ones(1) : amps_;
    res.right = b == 0 ? Eigen::VectorXcd::Ones(1) : amps_;
    if (res.lambda[0] > 1e-300) {
      if (a != 0) res.left /= res.lambda[0];
      if (b != 0) res.right /= res.lambda[0];
    }
    return res;
  }

  // Reorder so the part axes lead, then view as a 2^a x 2^b matrix.
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> in_part(n, false);
  for (QName q : part) {
    const int ax = axis(q);
    if (in_part[ax]) throw std::logic_error("duplicate name in partition");
    in_part[ax] = true;
    order.push_back(ax);
  }
  for (int ax = 0; ax < n; ++ax)
    if (!in_part[ax]) order.push_back(ax);

  const int64_t rows = int64_t{1} << a, cols = int64_t{1} << b;
  Eigen::MatrixXcd m(rows, cols);
  for (int64_t idx = 0; idx < amps_.size(); ++idx) {
    int64_t to = 0;
    for (int k = 0; k < n; ++k)
      if (idx >> (n - 1 - order[k]) & 1) to |= int64_t{1} << (n - 1 - k);
    m(to >> b, to & (cols - 1)) = amps_(idx);
  }

  // Direct SVD, not the Gram matrix: squaring would turn eigensolver noise
  // of order eps into sqrt(eps) on lambda_2 and defeat a 1e-9 tolerance.
  // Jacobi keeps tiny singular values at absolute accuracy ~eps*|M|.
  const bool flip = rows < cols;  // QR preconditioner wants rows >= cols
  if (flip) m.transposeInPlace();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();  // descending
  res.lambda.assign(sv.data(), sv.data() + sv.size());
  if (flip) {
    res.left = svd.matrixV().col(0).conjugate();
    res.right = svd.matrixU().col(0);
  } else {
    res.left = svd.matrixU().col(0);
    res.right = svd.matrixV().col(0).conjugate();
  }
  return res;
}

bool PureState::separable(const std::vector<QName>& part, double tol) const {
  SchmidtResult r = schmidt(part);
  if (r.lambda.empty()) return true;
  if (r.lambda[0] < 1.0 - tol) return false;
  for (size_t i = 1; i < r.lambda.size(); ++i)
    if (r.lambda[i] > tol) return false;
  return true;
}

bool PureState::factor(const std::vector<QName>& part, double tol,
                       PureState& fa, PureState& fb) const {
  SchmidtResult r = schmidt(part);
  if (r.lambda.empty()) return true;
  if (r.lambda[0] < 1.0 - tol) return false;
  for (size_t i = 1; i < r.lambda.size(); ++i)
    if (r.lambda[i] > tol) return false;

  std::vector<QName> rest;
  for (QName q : names_)
    if (std::find(part.begin(), part.end(), q) == part.end())
      rest.push_back(q);
  fa.names_ = part;
  fa.amps_ = r.left;
  fb.names_ = rest;
  fb.amps_ = r.right;
  if (part.empty()) fa.amps_ = Eigen::VectorXcd::Ones(1);
  if (rest.empty()) fb.amps_ = Eigen::VectorXcd::Ones(1);
  return true;
}

PureState PureState::tensor(const PureState& o) const {
  for (QName q : o.names_)
    if (has(q)) throw std::logic_error("tensor domains overlap");
  PureState out;
  out.names_ = names_;
  out.names_.insert(out.names_.end(), o.names_.begin(), o.names_.end());
  const int64_t da = amps_.size(), db = o.amps_.size();
  out.amps_.resize(da * db);
  for (int64_t i = 0; i < da; ++i)
    for (int64_t j = 0; j < db; ++j) out.amps_(i * db + j) = amps_(i) * o.amps_(j);
  return out;
}

void PureState::rename(const std::map<QName, QName>& m) {
  std::vector<QName> out = names_;
  for (QName& q : out) {
    auto it = m.find(q);
    if (it != m.end()) q = it->second;
  }
  for (size_t i = 0; i < out.size(); ++i)
    for (size_t j = i + 1; j < out.size(); ++j)
      if (out[i] == out[j]) throw std::logic_error("rename collides");
  names_ = std::move(out);
}

void PureState::reorder(const std::vector<QName>& target) {
  const int n = qubits();
  if (static_cast<int>(target.size()) != n)
    throw std::logic_error("reorder domain mismatch");
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = axis(target[k]);
  const int64_t dim = amps_.size();
  Eigen::VectorXcd out(dim);
  for (int64_t idx = 0; idx < dim; ++idx) {
    int64_t to = 0;
    for (int k = 0; k < n; ++k)
      if (idx >> (n - 1 - order[k]) & 1) to |= int64_t{1} << (n - 1 - k);
    out(to) = amps_(idx);
  }
  amps_ = std::move(out);
  names_ = target;
}

double PureState::overlap_abs(const PureState& o) const {
  PureState tmp = o;
  tmp.reorder(names_);
  return std::abs(amps_.dot(tmp.amps_));
}

std::string PureState::dump() const {
  std::string s = "names:";
  for (QName q : names_) s += " " + qname_str(q);
  s += "\n";
  const int n = qubits();
  char buf[64];
  for (int64_t i = 0; i < amps_.size(); ++i) {
    std::string bits;
    for (int k = n - 1; k >= 0; --k) bits += (i >> k & 1) ? '1' : '0';
    std::snprintf(buf, sizeof buf, " %.12g %.12g", amps_(i).real(),
                  amps_(i).imag());
    s += "|" + bits + ">" + buf + "\n";
  }
  return s;
}

bool equal_up_to_phase(const PureState& a, const PureState& b, double tol) {
  if (a.qubits() != b.qubits()) return false;
  for (QName q : a.names())
    if (!b.has(q)) return false;
  return a.overlap_abs(b) >= 1.0 - tol;
}

}  // namespace twist
