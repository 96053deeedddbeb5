#include "twist/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twist/kernels.hpp"

namespace twist {

namespace {

// Index-deposit table: value v of the sub-index spread onto the given bit
// positions of the full index. positions[t] is the bit for sub-bit t
// (sub-bit 0 most significant of the sub-index).
std::vector<int64_t> deposit_table(const std::vector<int>& positions) {
  const int k = static_cast<int>(positions.size());
  std::vector<int64_t> tab(int64_t{1} << k, 0);
  for (int64_t v = 0; v < static_cast<int64_t>(tab.size()); ++v) {
    int64_t full = 0;
    for (int t = 0; t < k; ++t)
      if (v >> (k - 1 - t) & 1) full |= int64_t{1} << positions[t];
    tab[v] = full;
  }
  return tab;
}

}  // namespace

bool PartialDensity::has(QName a) const {
  return std::find(names_.begin(), names_.end(), a) != names_.end();
}

int PartialDensity::axis(QName a) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == a) return static_cast<int>(i);
  throw std::logic_error("unknown qubit " + qname_str(a));
}

PartialDensity PartialDensity::from_pure(const PureState& s) {
  PartialDensity r;
  r.names_ = s.names();
  r.mat_ = s.amps() * s.amps().adjoint();
  return r;
}

void PartialDensity::alloc(QName a, int max_qubits) {
  if (has(a)) throw std::logic_error("duplicate qubit " + qname_str(a));
  if (qubits() >= max_qubits)
    throw CapacityError("mixed-state qubit capacity " +
                        std::to_string(max_qubits) + " exceeded");
  const int64_t d = mat_.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * 2, d * 2);
  for (int64_t i = 0; i < d; ++i)
    for (int64_t j = 0; j < d; ++j) out(i * 2, j * 2) = mat_(i, j);
  mat_ = std::move(out);
  names_.push_back(a);
}

void PartialDensity::conjugate(GateKind g, const Rational& phase,
                               const std::vector<QName>& targets) {
  const int k = gate_qubits(g);
  if (static_cast<int>(targets.size()) != k)
    throw std::logic_error("gate arity mismatch");
  const int n = qubits();
  int bits[3];
  for (int t = 0; t < k; ++t) bits[t] = n - 1 - axis(targets[t]);
  const Eigen::MatrixXcd u = gate_matrix(g, phase);
  const Eigen::MatrixXcd uc = u.conjugate();
  const int64_t d = mat_.rows();
  // U rho: every column is a state vector (contiguous, column-major).
  for (int64_t c = 0; c < d; ++c)
    kernels::apply(mat_.data() + c * d, d, bits, k, u);
  // rho U+: transform each row by conj(U); rows have stride d.
  for (int64_t r = 0; r < d; ++r)
    kernels::apply(mat_.data() + r, d, bits, k, uc, d);
}

void PartialDensity::project(QName a, bool outcome) {
  const int n = qubits();
  const int64_t w = int64_t{1} << (n - 1 - axis(a));
  const int64_t d = mat_.rows();
  for (int64_t c = 0; c < d; ++c)
    for (int64_t r = 0; r < d; ++r)
      if ((((r & w) != 0) != outcome) || (((c & w) != 0) != outcome))
        mat_(r, c) = 0;
}

void PartialDensity::dephase(QName a) {
  const int n = qubits();
  const int64_t w = int64_t{1} << (n - 1 - axis(a));
  const int64_t d = mat_.rows();
  for (int64_t c = 0; c < d; ++c)
    for (int64_t r = 0; r < d; ++r)
      if (((r & w) != 0) != (((c & w) != 0))) mat_(r, c) = 0;
}

PartialDensity PartialDensity::partial_trace(
    const std::vector<QName>& over) const {
  const int n = qubits();
  std::vector<bool> traced(n, false);
  for (QName q : over) {
    const int ax = axis(q);
    if (traced[ax]) throw std::logic_error("duplicate name in partial trace");
    traced[ax] = true;
  }
  std::vector<int> keep_pos, tr_pos;
  std::vector<QName> keep_names;
  for (int ax = 0; ax < n; ++ax) {
    const int bit = n - 1 - ax;
    if (traced[ax]) {
      tr_pos.push_back(bit);
    } else {
      keep_pos.push_back(bit);
      keep_names.push_back(names_[ax]);
    }
  }
  const std::vector<int64_t> kd = deposit_table(keep_pos);
  const std::vector<int64_t> td = deposit_table(tr_pos);
  const int64_t dk = static_cast<int64_t>(kd.size());
  PartialDensity out;
  out.names_ = keep_names;
  out.mat_ = Eigen::MatrixXcd::Zero(dk, dk);
  for (int64_t j = 0; j < dk; ++j)
    for (int64_t i = 0; i < dk; ++i) {
      cplx acc = 0;
      for (int64_t t : td) acc += mat_(kd[i] | t, kd[j] | t);
      out.mat_(i, j) = acc;
    }
  return out;
}

bool PartialDensity::purity_rank_test(double tol) const {
  const double tr = trace();
  if (tr <= tol) throw std::logic_error("purity test on ~zero trace");
  const double tr2 = mat_.squaredNorm();  // Hermitian: tr(rho^2) = |rho|_F^2
  return std::abs(tr2 - tr * tr) <= tol;
}

bool PartialDensity::pure_substate_test(const std::vector<QName>& part,
                                        double tol) const {
  const double tr = trace();
  if (tr <= tol) throw std::logic_error("pure-substate test on ~zero trace");
  std::vector<QName> rest;
  for (QName q : names_)
    if (std::find(part.begin(), part.end(), q) == part.end())
      rest.push_back(q);

  PartialDensity on_part = partial_trace(rest);  // domain = part
  PartialDensity scaled = on_part;
  scaled.mat_ /= tr;
  if (!scaled.purity_rank_test(tol)) return false;

  PartialDensity on_rest = partial_trace(part);  // domain = rest, trace = tr
  PartialDensity rebuilt = scaled.tensor(on_rest);
  rebuilt.reorder(names_);
  const double scale = std::max(1.0, std::sqrt(double(mat_.rows())));
  return max_abs_diff(rebuilt) <= tol * scale;
}

void PartialDensity::match_sizes(PartialDensity& r1, PartialDensity& r2) {
  for (QName q : r2.names_)
    if (!r1.has(q)) {
      PartialDensity pad;
      pad.names_ = {q};
      pad.mat_ = Eigen::MatrixXcd::Zero(2, 2);
      pad.mat_(0, 0) = 1.0;
      r1 = r1.tensor(pad);
    }
  for (QName q : r1.names_)
    if (!r2.has(q)) {
      PartialDensity pad;
      pad.names_ = {q};
      pad.mat_ = Eigen::MatrixXcd::Zero(2, 2);
      pad.mat_(0, 0) = 1.0;
      r2 = r2.tensor(pad);
    }
  r2.reorder(r1.names_);
}

void PartialDensity::rename(const std::map<QName, QName>& m) {
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

void PartialDensity::reorder(const std::vector<QName>& target) {
  const int n = qubits();
  if (static_cast<int>(target.size()) != n)
    throw std::logic_error("reorder domain mismatch");
  if (target == names_) return;
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = axis(target[k]);
  const int64_t d = mat_.rows();
  std::vector<int64_t> map(d);
  for (int64_t idx = 0; idx < d; ++idx) {
    int64_t to = 0;
    for (int k = 0; k < n; ++k)
      if (idx >> (n - 1 - order[k]) & 1) to |= int64_t{1} << (n - 1 - k);
    map[idx] = to;
  }
  Eigen::MatrixXcd out(d, d);
  for (int64_t j = 0; j < d; ++j)
    for (int64_t i = 0; i < d; ++i) out(map[i], map[j]) = mat_(i, j);
  mat_ = std::move(out);
  names_ = target;
}

void PartialDensity::accumulate(const PartialDensity& o, double w) {
  PartialDensity tmp = o;
  tmp.reorder(names_);
  mat_ += w * tmp.mat_;
}

PartialDensity PartialDensity::tensor(const PartialDensity& o) const {
  for (QName q : o.names_)
    if (has(q)) throw std::logic_error("tensor domains overlap");
  PartialDensity out;
  out.names_ = names_;
  out.names_.insert(out.names_.end(), o.names_.begin(), o.names_.end());
  const int64_t da = mat_.rows(), db = o.mat_.rows();
  out.mat_.resize(da * db, da * db);
  for (int64_t i = 0; i < da; ++i)
    for (int64_t j = 0; j < da; ++j)
      out.mat_.block(i * db, j * db, db, db) = mat_(i, j) * o.mat_;
  return out;
}

double PartialDensity::max_abs_diff(const PartialDensity& o) const {
  PartialDensity tmp = o;
  tmp.reorder(names_);
  return (mat_ - tmp.mat_).cwiseAbs().maxCoeff();
}

std::string PartialDensity::dump() const {
  std::string s = "names:";
  for (QName q : names_) s += " " + qname_str(q);
  s += "\n";
  char buf[64];
  for (int64_t i = 0; i < mat_.rows(); ++i) {
    for (int64_t j = 0; j < mat_.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.9g%+.9gi", j ? " " : "",
                    mat_(i, j).real(), mat_(i, j).imag());
      s += buf;
    }
    s += "\n";
  }
  return s;
}

}  // namespace twist
