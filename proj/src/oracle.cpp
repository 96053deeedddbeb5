#include "twist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace twist {

namespace {

std::string outcomes_str(const OutcomeMap& o) {
  std::ostringstream os;
  os << "{";
  bool sep = false;
  for (const auto& [q, b] : o) {
    if (sep) os << ", ";
    os << qname_str(q) << "=" << (b ? "T" : "F");
    sep = true;
  }
  os << "}";
  return os.str();
}

// Builds an injective qubit correspondence from structurally identical
// register trees. Fails on shape mismatch or a non-injective requirement.
bool zip_qval(const QValPtr& a, const QValPtr& b, std::map<QName, QName>& m,
              std::set<QName>& img) {
  if (a->leaf() != b->leaf()) return false;
  if (a->leaf()) {
    const QName qa = static_cast<QName>(a->name);
    const QName qb = static_cast<QName>(b->name);
    auto it = m.find(qa);
    if (it != m.end()) return it->second == qb;
    if (img.count(qb)) return false;
    m[qa] = qb;
    img.insert(qb);
    return true;
  }
  return zip_qval(a->l, b->l, m, img) && zip_qval(a->r, b->r, m, img);
}

bool zip_vals(const ExprPtr& a, const ExprPtr& b, std::map<QName, QName>& m,
              std::set<QName>& img) {
  if (a->k != b->k) return false;
  switch (a->k) {
    case ExprKind::BoolLit:
      return a->bval == b->bval;
    case ExprKind::FunRef:
      return a->name == b->name;
    case ExprKind::Pair:
      return zip_vals(a->a, b->a, m, img) && zip_vals(a->b, b->b, m, img);
    case ExprKind::QLit:
      return a->pur == b->pur && zip_qval(a->qval, b->qval, m, img);
    default:
      return false;
  }
}

bool equivalent_mapped(const PureState& a, const PureState& b,
                       const std::map<QName, QName>& m,
                       const std::set<QName>& img, double tol) {
  if (a.qubits() != b.qubits()) return false;
  if (m.size() != static_cast<size_t>(a.qubits())) return false;
  for (QName q : a.names())
    if (!m.count(q)) return false;
  for (QName q : b.names())
    if (!img.count(q)) return false;
  PureState ra = a;
  ra.rename(m);
  return equal_up_to_phase(ra, b, tol);
}

}  // namespace

std::vector<ImplicitBranch> implicit_measure(const PureState& psi,
                                             const std::vector<QName>& keep,
                                             double prune) {
  std::set<QName> keepset(keep.begin(), keep.end());
  std::vector<QName> extra;
  for (QName q : psi.names())
    if (!keepset.count(q)) extra.push_back(q);
  std::sort(extra.begin(), extra.end());

  std::vector<ImplicitBranch> out;
  struct Item {
    PureState s;
    double p;
    OutcomeMap o;
    size_t i;
  };
  std::vector<Item> st;
  st.push_back({psi, 1.0, {}, 0});
  while (!st.empty()) {
    Item it = std::move(st.back());
    st.pop_back();
    if (it.i == extra.size()) {
      out.push_back({it.p, std::move(it.s), std::move(it.o)});
      continue;
    }
    const QName q = extra[it.i];
    for (bool b : {false, true}) {
      Item nx{it.s, it.p, it.o, it.i + 1};
      nx.p *= nx.s.project(q, b);
      nx.o[q] = b;
      if (nx.p >= prune) st.push_back(std::move(nx));
    }
  }
  return out;
}

bool qubit_equivalent(const PureState& a, const ExprPtr& va,
                      const PureState& b, const ExprPtr& vb, double tol) {
  std::map<QName, QName> m;
  std::set<QName> img;
  if (!zip_vals(va, vb, m, img)) return false;
  return equivalent_mapped(a, b, m, img, tol);
}

bool qubit_equivalent_q(const PureState& a, const QValPtr& qa,
                        const PureState& b, const QValPtr& qb, double tol) {
  std::map<QName, QName> m;
  std::set<QName> img;
  if (!zip_qval(qa, qb, m, img)) return false;
  return equivalent_mapped(a, b, m, img, tol);
}

PurityReport purity_oracle(const Program& p, const RunOptions& opt) {
  auto branches = enumerate_executions(p, opt);
  struct Cfg {
    PureState st;
    ExprPtr val;
    std::string tag;
  };
  std::vector<Cfg> cfgs;
  for (size_t i = 0; i < branches.size(); ++i) {
    const auto& br = branches[i];
    for (auto& ib :
         implicit_measure(br.state, value_refs(br.value), opt.prune)) {
      std::string tag = "path " + std::to_string(i) + " " +
                        outcomes_str(br.outcomes) + " implicit " +
                        outcomes_str(ib.outcomes);
      cfgs.push_back({std::move(ib.state), br.value, std::move(tag)});
    }
  }
  if (cfgs.empty()) return {true, "no reachable configurations"};
  for (size_t i = 1; i < cfgs.size(); ++i) {
    if (!qubit_equivalent(cfgs[0].st, cfgs[0].val, cfgs[i].st, cfgs[i].val,
                          opt.tol))
      return {false, cfgs[0].tag + " [" + value_str(cfgs[0].val) +
                         "] is not equivalent to " + cfgs[i].tag + " [" +
                         value_str(cfgs[i].val) + "]"};
  }
  return {true,
          std::to_string(cfgs.size()) + " configurations all equivalent"};
}

std::vector<SitePurity> site_purity_oracle(const Program& p,
                                           const RunOptions& opt) {
  std::vector<SiteSnapshot> snaps;
  enumerate_executions(p, opt, &snaps);

  std::map<std::pair<int64_t, int>, std::vector<const SiteSnapshot*>> groups;
  for (const auto& s : snaps) groups[{s.origin, s.seq}].push_back(&s);

  std::vector<SitePurity> out;
  for (const auto& [key, g] : groups) {
    const SiteSnapshot* head = g.front();
    const int ncomp = head->is_split ? 2 : 1;
    for (int comp = 0; comp < ncomp; ++comp) {
      SitePurity sp;
      sp.origin = key.first;
      sp.seq = key.second;
      sp.span = head->span;
      sp.is_split = head->is_split;
      sp.component = comp;
      struct Cfg {
        PureState st;
        QValPtr qv;
      };
      std::vector<Cfg> cfgs;
      for (const SiteSnapshot* s : g) {
        QValPtr qv = s->operand->qval;
        if (s->is_split) qv = comp == 0 ? qv->l : qv->r;
        std::vector<uint32_t> raw;
        qval_names(qv, raw);
        std::vector<QName> keep(raw.begin(), raw.end());
        for (auto& ib : implicit_measure(s->state, keep, opt.prune))
          cfgs.push_back({std::move(ib.state), qv});
      }
      for (size_t i = 1; i < cfgs.size(); ++i) {
        if (!qubit_equivalent_q(cfgs[0].st, cfgs[0].qv, cfgs[i].st,
                                cfgs[i].qv, opt.tol)) {
          sp.pure = false;
          sp.detail = "configuration " + std::to_string(i) +
                      " differs from configuration 0";
          break;
        }
      }
      out.push_back(std::move(sp));
    }
  }
  return out;
}

namespace {

// Correspondence from operational qubit names to density-evaluator names,
// read off structurally aligned final values. Deferred measurement bits
// match through the qubit recorded on the machine boolean.
bool zip_align(const ExprPtr& a, const DValPtr& d, std::map<QName, QName>& m,
               std::set<QName>& img) {
  switch (a->k) {
    case ExprKind::Pair:
      return d->k == DValKind::Pair && zip_align(a->a, d->l, m, img) &&
             zip_align(a->b, d->r, m, img);
    case ExprKind::FunRef:
      return d->k == DValKind::Fun && a->name == d->fun;
    case ExprKind::BoolLit: {
      if (d->k == DValKind::Bool) return a->bval == d->b;
      if (d->k != DValKind::Defer) return false;
      if (!a->qval || !a->qval->leaf()) return false;  // collapsed literal
      const QName src = static_cast<QName>(a->qval->name);
      auto it = m.find(src);
      if (it != m.end()) return it->second == d->q;
      if (img.count(d->q)) return false;
      m[src] = d->q;
      img.insert(d->q);
      return true;
    }
    case ExprKind::QLit: {
      std::function<bool(const QValPtr&, const DValPtr&)> go =
          [&](const QValPtr& q, const DValPtr& v) {
            if (q->leaf()) {
              if (v->k != DValKind::Ref) return false;
              const QName src = static_cast<QName>(q->name);
              auto it = m.find(src);
              if (it != m.end()) return it->second == v->q;
              if (img.count(v->q)) return false;
              m[src] = v->q;
              img.insert(v->q);
              return true;
            }
            return v->k == DValKind::Pair && go(q->l, v->l) && go(q->r, v->r);
          };
      return go(a->qval, d);
    }
    default:
      return false;
  }
}

}  // namespace

AgreementReport check_agreement(const Program& p, const RunOptions& ropt,
                                const DenotOptions& dopt) {
  AgreementReport rep;
  DenotResult den = eval_denot(p, dopt);
  auto branches = enumerate_executions(p, ropt);

  PartialDensity acc;
  bool first = true;
  std::vector<std::string> issues;
  for (size_t i = 0; i < branches.size(); ++i) {
    const auto& br = branches[i];
    rep.prob_sum += br.prob;

    PartialDensity recon = PartialDensity::from_pure(br.state);
    for (const auto& [q, b] : br.outcomes) {
      PureState bit;
      bit.alloc(q, 1);
      if (b) bit.apply_gate(GateKind::X, {}, {q});
      recon = recon.tensor(PartialDensity::from_pure(bit));
    }

    std::map<QName, QName> ren;
    std::set<QName> img;
    if (!zip_align(br.value, den.value, ren, img)) {
      rep.ok = false;
      issues.push_back("path " + std::to_string(i) + ": value " +
                       value_str(br.value) +
                       " does not align with density value " +
                       dval_str(den.value));
    }
    for (auto it = ren.begin(); it != ren.end();) {
      if (it->first == it->second)
        it = ren.erase(it);
      else
        ++it;
    }
    if (!ren.empty()) {
      try {
        recon.rename(ren);
      } catch (const std::logic_error&) {
        rep.ok = false;
        issues.push_back("path " + std::to_string(i) +
                         ": qubit renaming collides");
        continue;
      }
    }

    recon.scale(br.prob);
    if (first) {
      acc = std::move(recon);
      first = false;
    } else {
      PartialDensity::match_sizes(acc, recon);
      acc.accumulate(recon, 1.0);
    }
  }

  PartialDensity want = den.rho;
  PartialDensity::match_sizes(acc, want);
  rep.max_dev = acc.max_abs_diff(want);
  if (rep.max_dev > dopt.tol) {
    rep.ok = false;
    issues.push_back("density deviation " + std::to_string(rep.max_dev));
  }
  if (std::abs(rep.prob_sum - 1.0) > dopt.tol) {
    rep.ok = false;
    issues.push_back("path probabilities sum to " +
                     std::to_string(rep.prob_sum));
  }
  std::ostringstream os;
  for (size_t i = 0; i < issues.size(); ++i)
    os << (i ? "; " : "") << issues[i];
  rep.detail = os.str();
  return rep;
}

}  // namespace twist
