#include "twist/denot.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace twist {

DValPtr DVal::boolean(bool v) {
  auto d = std::make_shared<DVal>();
  d->k = DValKind::Bool;
  d->b = v;
  return d;
}
DValPtr DVal::fn(std::string name) {
  auto d = std::make_shared<DVal>();
  d->k = DValKind::Fun;
  d->fun = std::move(name);
  return d;
}
DValPtr DVal::pair(DValPtr a, DValPtr b) {
  auto d = std::make_shared<DVal>();
  d->k = DValKind::Pair;
  d->l = std::move(a);
  d->r = std::move(b);
  return d;
}
DValPtr DVal::ref(QName q) {
  auto d = std::make_shared<DVal>();
  d->k = DValKind::Ref;
  d->q = q;
  return d;
}
DValPtr DVal::defer(QName q) {
  auto d = std::make_shared<DVal>();
  d->k = DValKind::Defer;
  d->q = q;
  return d;
}

namespace {

void collect(const DValPtr& v, bool with_defer, std::vector<QName>& out) {
  if (!v) return;
  if (v->k == DValKind::Ref || (with_defer && v->k == DValKind::Defer))
    out.push_back(v->q);
  collect(v->l, with_defer, out);
  collect(v->r, with_defer, out);
}

}  // namespace

std::vector<QName> dval_refs(const DValPtr& v) {
  std::vector<QName> out;
  collect(v, false, out);
  return out;
}

std::vector<QName> dval_qubits(const DValPtr& v) {
  std::vector<QName> out;
  collect(v, true, out);
  return out;
}

std::string dval_str(const DValPtr& v) {
  if (!v) return "?";
  switch (v->k) {
    case DValKind::Bool: return v->b ? "T" : "F";
    case DValKind::Fun: return v->fun;
    case DValKind::Ref: return qname_str(v->q);
    case DValKind::Defer: return "*" + qname_str(v->q);
    case DValKind::Pair:
      return "(" + dval_str(v->l) + ", " + dval_str(v->r) + ")";
  }
  return "?";
}

namespace {

using Env = std::map<std::string, DValPtr>;

struct Denot {
  const Program& prog;
  const DenotOptions& opt;
  PartialDensity rho;
  QName next_q = 1;
  std::vector<VerifyEvent> events;
  int dead = 0;  // >0 inside a ~zero-weight branch: skip assertions

  Denot(const Program& p, const DenotOptions& o) : prog(p), opt(o) {}

  [[noreturn]] void bug(Span sp, const std::string& m) const {
    throw TwistError({prog.file, sp, errc::arity, "evaluator: " + m});
  }

  void assert_pure(const ExprPtr& site, const std::vector<QName>& part,
                   bool is_split, const char* what) {
    if (dead > 0) return;
    const bool ok = rho.pure_substate_test(part, opt.tol);
    events.push_back({site->span, site->origin, is_split, -1.0, ok});
    if (!ok)
      throw BottomError({prog.file, site->span,
                         is_split ? errc::split_abort : errc::cast_abort,
                         std::string(what) +
                             " purity assertion failed: operand is not a "
                             "pure unentangled substate"});
  }

  void bind(const PatPtr& p, const DValPtr& v, Env& env) {
    switch (p->k) {
      case PatKind::Bind:
        env[p->name] = v;
        return;
      case PatKind::Wild:
        return;
      case PatKind::Pair:
        if (v->k != DValKind::Pair)
          bug(p->span, "pair pattern against non-pair value");
        bind(p->l, v->l, env);
        bind(p->r, v->r, env);
        return;
    }
  }

  // Positional alignment of the two branch values: else-branch qubits are
  // renamed onto the then-branch names at the same value position. Bool
  // positions carry no qubit and are skipped; on a duplicate-deferred-bit
  // conflict the first mapping wins.
  void zip_rename(const DValPtr& a, const DValPtr& b,
                  std::map<QName, QName>& ren, std::set<QName>& src_done,
                  std::set<QName>& dst_done) {
    if (!a || !b) return;
    const bool qa = a->k == DValKind::Ref || a->k == DValKind::Defer;
    const bool qb = b->k == DValKind::Ref || b->k == DValKind::Defer;
    if (qa && qb) {
      if (src_done.count(b->q) || dst_done.count(a->q)) return;
      src_done.insert(b->q);
      dst_done.insert(a->q);
      if (a->q != b->q) ren[b->q] = a->q;
      return;
    }
    if (a->k == DValKind::Pair && b->k == DValKind::Pair) {
      zip_rename(a->l, b->l, ren, src_done, dst_done);
      zip_rename(a->r, b->r, ren, src_done, dst_done);
    }
  }

  DValPtr eval_if_deferred(const Env& env, const ExprPtr& e, QName alpha) {
    const QName c0 = next_q;

    PartialDensity rho_else = rho;
    rho.project(alpha, true);
    rho_else.project(alpha, false);

    const bool dead1 = rho.trace() < opt.dead_branch;
    const bool dead2 = rho_else.trace() < opt.dead_branch;

    if (dead1) ++dead;
    DValPtr v1 = eval(env, e->b);
    if (dead1) --dead;
    const QName n1 = next_q;
    PartialDensity rho_then = std::move(rho);

    next_q = c0;
    rho = std::move(rho_else);
    if (dead2) ++dead;
    DValPtr v2 = eval(env, e->c);
    if (dead2) --dead;
    const QName n2 = next_q;
    rho_else = std::move(rho);

    next_q = std::max(n1, n2);

    std::map<QName, QName> ren;
    std::set<QName> src_done, dst_done;
    zip_rename(v1, v2, ren, src_done, dst_done);
    // Spill: a rename target living in the else state under an unrelated
    // role must move out of the way first (deterministic fresh names).
    std::vector<QName> spill;
    for (const auto& [src, dst] : ren)
      if (rho_else.has(dst) && !ren.count(dst)) spill.push_back(dst);
    std::sort(spill.begin(), spill.end());
    if (!spill.empty()) {
      std::map<QName, QName> sp;
      for (QName s : spill) sp[s] = next_q++;
      rho_else.rename(sp);
    }
    if (!ren.empty()) rho_else.rename(ren);

    PartialDensity::match_sizes(rho_then, rho_else);
    rho_then.accumulate(rho_else, 1.0);
    rho = std::move(rho_then);
    return v1;
  }

  DValPtr eval(const Env& env, const ExprPtr& e) {
    switch (e->k) {
      case ExprKind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) bug(e->span, "unbound variable '" + e->name + "'");
        return it->second;
      }

      case ExprKind::FunRef:
        return DVal::fn(e->name);

      case ExprKind::App: {
        DValPtr f = eval(env, e->a);
        DValPtr arg = eval(env, e->b);
        if (f->k != DValKind::Fun)
          bug(e->span, "application of a non-function value");
        const FunDecl* d = prog.find(f->fun);
        if (!d) bug(e->span, "unknown function '" + f->fun + "'");
        ExprPtr body =
            e->inst ? instantiate_expr(d->body, *e->inst) : d->body;
        Env inner{{d->param_name, std::move(arg)}};
        return eval(inner, body);
      }

      case ExprKind::Pair: {
        DValPtr l = eval(env, e->a);
        DValPtr r = eval(env, e->b);
        return DVal::pair(std::move(l), std::move(r));
      }

      case ExprKind::Let: {
        DValPtr v = eval(env, e->a);
        Env inner = env;
        bind(e->pat, v, inner);
        return eval(inner, e->b);
      }

      case ExprKind::If: {
        DValPtr c = eval(env, e->a);
        if (c->k == DValKind::Bool) return eval(env, c->b ? e->b : e->c);
        if (c->k == DValKind::Defer) return eval_if_deferred(env, e, c->q);
        bug(e->span, "if condition is neither a bool nor a deferred bit");
      }

      case ExprKind::BoolLit:
        return DVal::boolean(e->bval);

      case ExprKind::QInit: {
        const QName q = next_q++;
        rho.alloc(q, opt.max_qubits);
        return DVal::ref(q);
      }

      case ExprKind::Gate: {
        DValPtr v = eval(env, e->a);
        rho.conjugate(e->gate, e->phase, dval_refs(v));
        return v;
      }

      case ExprKind::Measure: {
        DValPtr v = eval(env, e->a);
        if (v->k != DValKind::Ref)
          bug(e->span, "measure of a non-qubit value");
        rho.dephase(v->q);
        return DVal::defer(v->q);
      }

      case ExprKind::Entangle:
        return eval(env, e->a);

      case ExprKind::Split: {
        DValPtr v = eval(env, e->a);
        if (v->k != DValKind::Pair)
          bug(e->span, "split of a non-pair value");
        if (e->pur.is_p()) {
          assert_pure(e, dval_refs(v->l), true, "split<P>");
          assert_pure(e, dval_refs(v->r), true, "split<P>");
        }
        return v;
      }

      case ExprKind::Cast: {
        DValPtr v = eval(env, e->a);
        if (e->pur.is_p()) assert_pure(e, dval_refs(v), false, "cast<P>");
        return v;
      }

      case ExprKind::QLit:
        bug(e->span, "register literal in source");
    }
    bug(e->span, "malformed expression");
  }
};

}  // namespace

DenotResult eval_denot(const Program& p, const DenotOptions& opt) {
  const FunDecl* m = p.find("main");
  if (!m)
    throw TwistError({p.file, {}, errc::no_main, "program has no main"});
  Denot d(p, opt);
  Env env{{m->param_name, DVal::boolean(false)}};
  DValPtr v = d.eval(env, m->body);
  return {std::move(d.rho), std::move(v), std::move(d.events)};
}

}  // namespace twist
