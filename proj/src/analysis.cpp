#include "twist/analysis.hpp"

#include <map>
#include <memory>

#include "twist/source.hpp"

namespace twist {

namespace {

// Abstract value: booleans carry nothing, quantum registers carry a
// measurement history, products mirror structure, functions name a
// declaration (always monomorphic as values).
struct AbsVal;
using AbsPtr = std::shared_ptr<const AbsVal>;

struct AbsVal {
  enum class K { Bool, Quant, Prod, Fun } k = K::Bool;
  History h;
  AbsPtr l, r;
  const FunDecl* fn = nullptr;
};

AbsPtr mk_bool() {
  static const AbsPtr b = std::make_shared<AbsVal>();
  return b;
}

AbsPtr mk_quant(History h) {
  auto v = std::make_shared<AbsVal>();
  v->k = AbsVal::K::Quant;
  v->h = std::move(h);
  return v;
}

AbsPtr mk_prod(AbsPtr l, AbsPtr r) {
  auto v = std::make_shared<AbsVal>();
  v->k = AbsVal::K::Prod;
  v->l = std::move(l);
  v->r = std::move(r);
  return v;
}

AbsPtr mk_fun(const FunDecl* d) {
  auto v = std::make_shared<AbsVal>();
  v->k = AbsVal::K::Fun;
  v->fn = d;
  return v;
}

using Env = std::map<std::string, AbsPtr>;

struct Analyzer {
  const Program& prog;
  SplitIndexGen gen;
  AnalysisReport report;

  explicit Analyzer(const Program& p) : prog(p) {}

  [[noreturn]] void malformed(const Span& sp, const std::string& msg) const {
    throw TwistError({prog.file, sp, errc::arity, "analysis: " + msg});
  }

  Purity resolve(const Span& sp, const Purity& p, const PuritySubst& th) const {
    if (!p.is_var()) return p;
    auto it = th.find(p.var);
    if (it == th.end() || it->second.is_var())
      malformed(sp, "purity variable '" + p.var + "' is uninstantiated");
    return it->second;
  }

  History gate_site(const Span& sp, bool is_split, const History& f) {
    report.sites.push_back({sp, is_split, f});
    return History::pure();
  }

  AbsPtr call(const FunDecl* d, AbsPtr arg, const PuritySubst& th) {
    Env env;
    env[d->param_name] = std::move(arg);
    return walk(d->body, env, th);
  }

  AbsPtr walk(const ExprPtr& e, const Env& env, const PuritySubst& th) {
    switch (e->k) {
      case ExprKind::BoolLit:
        return mk_bool();
      case ExprKind::QInit:
        return mk_quant(History::pure());
      case ExprKind::Var: {
        auto it = env.find(e->name);
        if (it == env.end())
          malformed(e->span, "unbound variable '" + e->name + "'");
        return it->second;
      }
      case ExprKind::FunRef: {
        const FunDecl* d = prog.find(e->name);
        if (!d) malformed(e->span, "unknown function '" + e->name + "'");
        return mk_fun(d);
      }
      case ExprKind::Pair:
        return mk_prod(walk(e->a, env, th), walk(e->b, env, th));
      case ExprKind::Let: {
        AbsPtr bound = walk(e->a, env, th);
        if (bound->k != AbsVal::K::Prod)
          malformed(e->span, "let of a non-product value");
        Env inner = env;
        if (e->pat->l->k == PatKind::Bind) inner[e->pat->l->name] = bound->l;
        if (e->pat->r->k == PatKind::Bind) inner[e->pat->r->name] = bound->r;
        return walk(e->b, inner, th);
      }
      case ExprKind::If: {
        walk(e->a, env, th);
        AbsPtr t = walk(e->b, env, th);
        walk(e->c, env, th);
        // A quantum branch result decoheres; classical results carry
        // nothing, and branch shapes already agree.
        if (t->k == AbsVal::K::Quant) return mk_quant(History::mixed());
        return t;
      }
      case ExprKind::Gate:
        // Unitaries preserve the operand's history.
        return walk(e->a, env, th);
      case ExprKind::Measure:
        walk(e->a, env, th);
        return mk_bool();
      case ExprKind::Entangle: {
        AbsPtr v = walk(e->a, env, th);
        if (v->k != AbsVal::K::Prod || v->l->k != AbsVal::K::Quant ||
            v->r->k != AbsVal::K::Quant)
          malformed(e->span, "entangle of a non-register pair");
        return mk_quant(History::combine(v->l->h, v->r->h));
      }
      case ExprKind::Split: {
        AbsPtr v = walk(e->a, env, th);
        if (v->k != AbsVal::K::Quant)
          malformed(e->span, "split of a non-register");
        Purity pi = resolve(e->span, e->pur, th);
        History g = pi.is_p() ? gate_site(e->span, true, v->h)
                              : v->h.split(gen.fresh());
        return mk_prod(mk_quant(g), mk_quant(g));
      }
      case ExprKind::Cast: {
        AbsPtr v = walk(e->a, env, th);
        if (v->k != AbsVal::K::Quant)
          malformed(e->span, "cast of a non-register");
        Purity pi = resolve(e->span, e->pur, th);
        if (pi.is_p()) return mk_quant(gate_site(e->span, false, v->h));
        return v;
      }
      case ExprKind::App: {
        const FunDecl* d = nullptr;
        if (e->a->k == ExprKind::FunRef) d = prog.find(e->a->name);
        AbsPtr arg = walk(e->b, env, th);
        PuritySubst inner;
        if (d) {
          if (e->inst)
            for (const auto& [v, p] : *e->inst) inner[v] = resolve(e->span, p, th);
        } else {
          AbsPtr f = walk(e->a, env, th);
          if (f->k != AbsVal::K::Fun)
            malformed(e->a->span, "call of a non-function");
          d = f->fn;
        }
        return call(d, std::move(arg), inner);
      }
      case ExprKind::QLit:
        malformed(e->span, "quantum literal in a source program");
    }
    malformed(e->span, "malformed expression");
  }
};

}  // namespace

std::string SiteVerdict::verdict() const {
  if (pass()) return "pure";
  return residual.is_mixed() ? "mixed-leak" : "cast-not-pure";
}

bool AnalysisReport::ok() const { return first_failure() == nullptr; }

const SiteVerdict* AnalysisReport::first_failure() const {
  for (const SiteVerdict& s : sites)
    if (!s.pass()) return &s;
  return nullptr;
}

AnalysisReport analyze_program(const Program& prog) {
  const FunDecl* m = prog.find("main");
  if (!m)
    throw TwistError(
        {prog.file, {1, 1, 1, 1}, errc::no_main, "no main to analyze"});
  Analyzer an(prog);
  an.call(m, mk_bool(), {});
  return std::move(an.report);
}

}  // namespace twist
