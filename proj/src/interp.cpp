#include "twist/interp.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>
#include <utility>

namespace twist {

namespace {

ExprPtr shallow(const ExprPtr& e) {
  auto c = std::make_shared<Expr>(*e);
  c->uid = fresh_uid();
  return c;
}

// Booleans produced by resolving a measurement carry the measured qubit in
// qval so the agreement checker can align deferred outcomes by name.
ExprPtr mk_bool(bool b, Span sp, QName src) {
  auto e = make_expr(ExprKind::BoolLit, sp);
  e->bval = b;
  e->type = Type::boolean();
  if (src > 0) e->qval = QVal::qubit(static_cast<uint32_t>(src));
  return e;
}

ExprPtr mk_qlit(QValPtr q, Purity pur, Span sp, TypePtr t, int64_t origin) {
  auto e = make_expr(ExprKind::QLit, sp);
  e->qval = std::move(q);
  e->pur = pur;
  e->type = std::move(t);
  e->origin = origin;
  return e;
}

void pattern_names(const PatPtr& p, std::vector<std::string>& out) {
  if (!p) return;
  if (p->k == PatKind::Bind) out.push_back(p->name);
  pattern_names(p->l, out);
  pattern_names(p->r, out);
}

// Capture-free substitution of closed values for free variables. Values are
// cloned per occurrence to keep node uids unique.
ExprPtr subst_vars(const ExprPtr& e,
                   const std::map<std::string, ExprPtr>& m) {
  if (!e || m.empty()) return e;
  switch (e->k) {
    case ExprKind::Var: {
      auto it = m.find(e->name);
      return it == m.end() ? e : clone_expr(it->second);
    }
    case ExprKind::BoolLit:
    case ExprKind::QInit:
    case ExprKind::QLit:
    case ExprKind::FunRef:
      return e;
    case ExprKind::Let: {
      ExprPtr a = subst_vars(e->a, m);
      std::vector<std::string> shadow;
      pattern_names(e->pat, shadow);
      std::map<std::string, ExprPtr> inner = m;
      for (const auto& n : shadow) inner.erase(n);
      ExprPtr b = subst_vars(e->b, inner);
      if (a == e->a && b == e->b) return e;
      auto c = shallow(e);
      c->a = std::move(a);
      c->b = std::move(b);
      return c;
    }
    default: {
      ExprPtr a = subst_vars(e->a, m);
      ExprPtr b = subst_vars(e->b, m);
      ExprPtr cc = subst_vars(e->c, m);
      if (a == e->a && b == e->b && cc == e->c) return e;
      auto c = shallow(e);
      c->a = std::move(a);
      c->b = std::move(b);
      c->c = std::move(cc);
      return c;
    }
  }
}

struct Machine {
  Machine(const Program& p, const RunOptions& o) : prog(p), opt(o) {}

  const Program& prog;
  const RunOptions& opt;
  PureState psi;
  OutcomeMap outcomes;
  double prob = 1.0;
  std::vector<VerifyEvent> events;
  QName next_q = 1;
  int branch_points = 0;
  int64_t steps = 0;
  std::vector<SiteSnapshot>* snaps = nullptr;
  std::map<int64_t, int> site_seq;  // per-path occurrence count by origin

  void snapshot(const ExprPtr& site, bool is_split) {
    snaps->push_back({site->origin, site_seq[site->origin]++, site->span,
                      is_split, psi, site->a, prob, outcomes});
  }

  StuckError stuck(Span sp, const std::string& msg) const {
    return StuckError({prog.file, sp, errc::arity, "stuck: " + msg});
  }
};

struct StepOut {
  enum class K { Value, Stepped, Meas };
  K k = K::Value;
  ExprPtr out;                          // Stepped
  QName mq = 0;                         // Meas: qubit under measurement
  Span mspan;                           // Meas
  std::function<ExprPtr(ExprPtr)> fill; // Meas: rebuild spine with outcome
};

StepOut step(Machine& mc, const ExprPtr& e);

// Steps a non-value child and rebuilds the spine around the result.
StepOut cong(Machine& mc, const ExprPtr& e, ExprPtr Expr::*slot) {
  StepOut r = step(mc, (*e).*slot);
  if (r.k == StepOut::K::Stepped) {
    auto c = shallow(e);
    (*c).*slot = std::move(r.out);
    r.out = std::move(c);
  } else if (r.k == StepOut::K::Meas) {
    auto inner = std::move(r.fill);
    r.fill = [e, slot, inner](ExprPtr v) {
      auto c = shallow(e);
      (*c).*slot = inner(std::move(v));
      return c;
    };
  }
  return r;
}

std::vector<QName> tree_names(const QValPtr& q) {
  std::vector<uint32_t> raw;
  qval_names(q, raw);
  return {raw.begin(), raw.end()};
}

double lambda2_of(const SchmidtResult& s) {
  return s.lambda.size() > 1 ? s.lambda[1] : 0.0;
}

bool sep_ok(const SchmidtResult& s, double tol) {
  if (s.lambda.empty()) return true;
  if (s.lambda[0] < 1.0 - tol) return false;
  for (size_t i = 1; i < s.lambda.size(); ++i)
    if (s.lambda[i] > tol) return false;
  return true;
}

std::string fmt_g(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Two bipartition tests: (Refs(q1) | rest) and (Refs(q1) u Refs(q2) | rest).
// Both passing implies the tripartite product of the split<P> premise: the
// second cut factors off the pair block, and the first makes the pair
// block's left marginal pure, so the block itself factors.
void split_check(Machine& mc, const ExprPtr& site, const std::vector<QName>& r1,
                 const std::vector<QName>& r2) {
  SchmidtResult cut1 = mc.psi.schmidt(r1);
  std::vector<QName> both = r1;
  both.insert(both.end(), r2.begin(), r2.end());
  SchmidtResult cut2 = mc.psi.schmidt(both);
  const bool ok1 = sep_ok(cut1, mc.opt.tol);
  const bool ok2 = sep_ok(cut2, mc.opt.tol);
  const double l2 = std::max(lambda2_of(cut1), lambda2_of(cut2));
  mc.events.push_back({site->span, site->origin, true, l2, ok1 && ok2});
  if (ok1 && ok2) return;
  const SchmidtResult& bad = ok1 ? cut2 : cut1;
  throw SplitAbort({mc.prog.file, site->span, errc::split_abort,
                    "split<P> separability check failed: second Schmidt "
                    "coefficient " +
                        fmt_g(lambda2_of(bad)) + " exceeds tolerance"},
                   bad.lambda);
}

void bind_pattern(Machine& mc, const PatPtr& p, const ExprPtr& v,
                  std::map<std::string, ExprPtr>& m) {
  switch (p->k) {
    case PatKind::Bind:
      m[p->name] = v;
      return;
    case PatKind::Wild:
      return;
    case PatKind::Pair:
      if (v->k != ExprKind::Pair)
        throw mc.stuck(p->span, "pair pattern against non-pair value");
      bind_pattern(mc, p->l, v->a, m);
      bind_pattern(mc, p->r, v->b, m);
      return;
  }
}

StepOut stepped(ExprPtr e) {
  return {StepOut::K::Stepped, std::move(e), 0, {}, {}};
}

StepOut step(Machine& mc, const ExprPtr& e) {
  if (is_value(e)) return {};
  switch (e->k) {
    case ExprKind::Var:
      throw mc.stuck(e->span, "free variable '" + e->name + "'");

    case ExprKind::Pair:
      return cong(mc, e, is_value(e->a) ? &Expr::b : &Expr::a);

    case ExprKind::App: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      if (!is_value(e->b)) return cong(mc, e, &Expr::b);
      if (e->a->k != ExprKind::FunRef)
        throw mc.stuck(e->span, "application of a non-function value");
      const FunDecl* d = mc.prog.find(e->a->name);
      if (!d) throw mc.stuck(e->span, "unknown function '" + e->a->name + "'");
      ExprPtr body = e->inst ? instantiate_expr(d->body, *e->inst)
                             : clone_expr(d->body);
      return stepped(subst_vars(body, {{d->param_name, e->b}}));
    }

    case ExprKind::Let: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      std::map<std::string, ExprPtr> m;
      bind_pattern(mc, e->pat, e->a, m);
      return stepped(subst_vars(e->b, m));
    }

    case ExprKind::If: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      if (e->a->k != ExprKind::BoolLit)
        throw mc.stuck(e->span, "if condition is not a boolean");
      return stepped(e->a->bval ? e->b : e->c);
    }

    case ExprKind::QInit: {
      QName q = mc.next_q++;
      mc.psi.alloc(q, mc.opt.max_qubits);
      return stepped(mk_qlit(QVal::qubit(static_cast<uint32_t>(q)),
                             Purity::pure(), e->span, e->type, e->origin));
    }

    case ExprKind::Gate: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      mc.psi.apply_gate(e->gate, e->phase, value_refs(e->a));
      return stepped(e->a);
    }

    case ExprKind::Measure: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      if (e->a->k != ExprKind::QLit || !e->a->qval->leaf())
        throw mc.stuck(e->span, "measure of a non-qubit value");
      StepOut r;
      r.k = StepOut::K::Meas;
      r.mq = static_cast<QName>(e->a->qval->name);
      r.mspan = e->span;
      r.fill = [](ExprPtr v) { return v; };
      return r;
    }

    case ExprKind::Entangle: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      if (e->pur.is_var()) throw mc.stuck(e->span, "uninstantiated purity");
      const ExprPtr& l = e->a->a;
      const ExprPtr& r = e->a->b;
      if (e->a->k != ExprKind::Pair || l->k != ExprKind::QLit ||
          r->k != ExprKind::QLit)
        throw mc.stuck(e->span, "entangle of a non-quantum pair");
      return stepped(mk_qlit(QVal::epair(l->qval, r->qval), e->pur, e->span,
                             e->type, e->origin));
    }

    case ExprKind::Split: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      if (e->pur.is_var()) throw mc.stuck(e->span, "uninstantiated purity");
      if (e->a->k != ExprKind::QLit || e->a->qval->leaf())
        throw mc.stuck(e->span, "split of a non-pair quantum value");
      const QValPtr& q = e->a->qval;
      if (e->pur.is_p()) {
        if (mc.snaps) mc.snapshot(e, true);
        split_check(mc, e, tree_names(q->l), tree_names(q->r));
      }
      auto out = make_expr(ExprKind::Pair, e->span);
      out->a = mk_qlit(q->l, e->pur, e->span, e->type ? e->type->a : nullptr,
                       e->origin);
      out->b = mk_qlit(q->r, e->pur, e->span, e->type ? e->type->b : nullptr,
                       e->origin);
      out->type = e->type;
      out->origin = e->origin;
      return stepped(std::move(out));
    }

    case ExprKind::Cast: {
      if (!is_value(e->a)) return cong(mc, e, &Expr::a);
      if (e->pur.is_var()) throw mc.stuck(e->span, "uninstantiated purity");
      if (e->a->k != ExprKind::QLit)
        throw mc.stuck(e->span, "cast of a non-quantum value");
      if (e->pur.is_p() && mc.snaps) mc.snapshot(e, false);
      return stepped(
          mk_qlit(e->a->qval, e->pur, e->span, e->type, e->origin));
    }

    case ExprKind::BoolLit:
    case ExprKind::QLit:
    case ExprKind::FunRef:
      break;  // values; unreachable
  }
  throw mc.stuck(e->span, "no step rule applies");
}

// Test-mode compatibility audit: every P-annotated quantum value in the
// residual must be separable from the rest of the state.
void audit(const Machine& mc, const ExprPtr& e) {
  if (!e) return;
  if (e->k == ExprKind::QLit && e->pur.is_p()) {
    std::vector<QName> refs = tree_names(e->qval);
    if (!mc.psi.separable(refs, mc.opt.tol))
      throw TwistError({mc.prog.file, e->span, errc::split_abort,
                        "instrumented audit: P-annotated value is entangled "
                        "with the rest of the state"});
  }
  audit(mc, e->a);
  audit(mc, e->b);
  audit(mc, e->c);
}

ExprPtr entry(const Program& prog) {
  const FunDecl* m = prog.find("main");
  if (!m)
    throw TwistError({prog.file, {}, errc::no_main, "program has no main"});
  ExprPtr body = clone_expr(m->body);
  return subst_vars(body, {{m->param_name, mk_bool(false, m->span, 0)}});
}

}  // namespace

bool is_value(const ExprPtr& e) {
  if (!e) return false;
  switch (e->k) {
    case ExprKind::BoolLit:
    case ExprKind::QLit:
    case ExprKind::FunRef:
      return true;
    case ExprKind::Pair:
      return is_value(e->a) && is_value(e->b);
    default:
      return false;
  }
}

std::vector<QName> value_refs(const ExprPtr& e) {
  std::vector<QName> out;
  std::function<void(const ExprPtr&)> go = [&](const ExprPtr& v) {
    if (!v) return;
    if (v->k == ExprKind::QLit) {
      auto names = tree_names(v->qval);
      out.insert(out.end(), names.begin(), names.end());
    } else if (v->k == ExprKind::Pair) {
      go(v->a);
      go(v->b);
    }
  };
  go(e);
  return out;
}

std::string value_str(const ExprPtr& e) {
  if (!e) return "?";
  switch (e->k) {
    case ExprKind::BoolLit:
      return e->unit_sugar ? "()" : (e->bval ? "T" : "F");
    case ExprKind::FunRef:
      return e->name;
    case ExprKind::Pair:
      return "(" + value_str(e->a) + ", " + value_str(e->b) + ")";
    case ExprKind::QLit: {
      std::function<std::string(const QValPtr&)> go =
          [&](const QValPtr& q) -> std::string {
        if (q->leaf()) return qname_str(static_cast<QName>(q->name));
        return "[" + go(q->l) + ", " + go(q->r) + "]";
      };
      return go(e->qval);
    }
    default:
      return "<non-value>";
  }
}

RunResult run_pure(const Program& p, const RunOptions& opt) {
  Machine mc{p, opt};
  ExprPtr e = entry(p);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (opt.instrument) audit(mc, e);
  if (opt.on_config) opt.on_config(e, mc.psi);
  for (;;) {
    StepOut r = step(mc, e);
    if (r.k == StepOut::K::Value) break;
    if (r.k == StepOut::K::Stepped) {
      e = std::move(r.out);
    } else {
      auto mo = mc.psi.measure(r.mq, unif(rng));
      mc.prob *= mo.prob;
      mc.outcomes[r.mq] = mo.outcome;
      e = r.fill(mk_bool(mo.outcome, r.mspan, r.mq));
    }
    ++mc.steps;
    if (opt.instrument) audit(mc, e);
    if (opt.on_config) opt.on_config(e, mc.psi);
  }
  return {std::move(e),        std::move(mc.psi), std::move(mc.outcomes),
          std::move(mc.events), opt.seed,          mc.steps};
}

std::vector<ExecBranch> enumerate_executions(
    const Program& p, const RunOptions& opt,
    std::vector<SiteSnapshot>* snaps) {
  struct Cfg {
    Machine mc;
    ExprPtr e;
  };
  std::vector<ExecBranch> out;
  std::vector<Cfg> stack;
  {
    Machine m0{p, opt};
    m0.snaps = snaps;
    stack.push_back({std::move(m0), entry(p)});
  }
  while (!stack.empty()) {
    Cfg c = std::move(stack.back());
    stack.pop_back();
    for (;;) {
      StepOut r = step(c.mc, c.e);
      if (r.k == StepOut::K::Value) {
        out.push_back({c.mc.prob, std::move(c.mc.psi), std::move(c.e),
                       std::move(c.mc.outcomes), std::move(c.mc.events)});
        break;
      }
      if (r.k == StepOut::K::Stepped) {
        c.e = std::move(r.out);
        ++c.mc.steps;
        continue;
      }
      if (++c.mc.branch_points > opt.max_branch_points)
        throw BranchExplosion(
            {p.file, r.mspan, errc::branch_explosion,
             "more than " + std::to_string(opt.max_branch_points) +
                 " measurement branch points on one path"});
      Cfg t = c;  // true successor; c continues as the false successor
      const double pt = t.mc.psi.project(r.mq, true);
      const double pf = c.mc.psi.project(r.mq, false);
      ++c.mc.steps;
      ++t.mc.steps;
      if (t.mc.prob * pt >= opt.prune) {
        t.mc.prob *= pt;
        t.mc.outcomes[r.mq] = true;
        t.e = r.fill(mk_bool(true, r.mspan, r.mq));
        stack.push_back(std::move(t));
      }
      if (c.mc.prob * pf >= opt.prune) {
        c.mc.prob *= pf;
        c.mc.outcomes[r.mq] = false;
        c.e = r.fill(mk_bool(false, r.mspan, r.mq));
        continue;
      }
      break;  // false branch pruned
    }
  }
  return out;
}

}  // namespace twist
