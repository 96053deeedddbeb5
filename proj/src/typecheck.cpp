#include "twist/typecheck.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace twist {

namespace {

bool is_quantum(const TypePtr& t) { return t && t->k == TypeKind::Quantum; }

// Shape of a value viewed as one entangled register; null when a classical
// component makes that view meaningless.
QShapePtr type_shape(const TypePtr& t) {
  if (!t) return nullptr;
  if (t->k == TypeKind::Quantum) return t->shape;
  if (t->k == TypeKind::Prod) {
    QShapePtr l = type_shape(t->a), r = type_shape(t->b);
    if (!l || !r) return nullptr;
    return QShape::epair(std::move(l), std::move(r));
  }
  return nullptr;
}

bool quantum_leaves(const TypePtr& t, std::vector<Purity>& out) {
  if (!t) return false;
  if (t->k == TypeKind::Quantum) {
    out.push_back(t->pur);
    return true;
  }
  if (t->k == TypeKind::Prod)
    return quantum_leaves(t->a, out) && quantum_leaves(t->b, out);
  return false;
}

bool has_pure_leaf(const TypePtr& t) {
  if (!t) return false;
  if (t->k == TypeKind::Quantum) return t->pur.is_p();
  if (t->k == TypeKind::Prod) return has_pure_leaf(t->a) || has_pure_leaf(t->b);
  return false;
}

// Purity of an entangle inserted over these components: stays P only when
// every component is P, stays a variable only when every component is that
// same variable; any mix collapses to M.
Purity pjoin(const std::vector<Purity>& ps) {
  Purity first = ps.front();
  for (const Purity& p : ps)
    if (p != first) return Purity::mixed();
  return first;
}

bool contains_arrow(const TypePtr& t) {
  if (!t) return false;
  if (t->k == TypeKind::Arrow) return true;
  if (t->k == TypeKind::Prod)
    return contains_arrow(t->a) || contains_arrow(t->b);
  return false;
}

// Only pure quantum data may be silently dropped; classical data always can.
bool discardable(const TypePtr& t) {
  if (is_classical(t)) return true;
  if (t->k == TypeKind::Quantum) return t->pur.is_p();
  if (t->k == TypeKind::Prod) return discardable(t->a) && discardable(t->b);
  return false;
}

struct Binding {
  std::string name;
  TypePtr type;
  Span span;
  bool consumed = false;
};

struct Checker {
  Program& prog;
  const FunDecl* decl = nullptr;
  std::map<std::string, const FunDecl*> visible;
  std::vector<Binding> ctx;
  int counter = 0;

  explicit Checker(Program& p) : prog(p) {}

  [[noreturn]] void fail(const Span& sp, const char* code, std::string msg) {
    throw TwistError({prog.file, sp, code, std::move(msg)});
  }

  // ---------------------------------------------------------- fresh names

  // Synthetic binders must not collide with names already in the program
  // (including ones inserted by an earlier elaboration of the same source).
  void note_name(const std::string& n) {
    if (n.size() < 4 || n[0] != '_' || n[1] != '_') return;
    size_t i = 2;
    while (i < n.size() && std::isalpha(static_cast<unsigned char>(n[i]))) ++i;
    if (i == 2 || i >= n.size()) return;
    int v = 0;
    for (size_t j = i; j < n.size(); ++j) {
      if (!std::isdigit(static_cast<unsigned char>(n[j]))) return;
      v = v * 10 + (n[j] - '0');
    }
    if (v > counter) counter = v;
  }

  void scan_pat(const PatPtr& p) {
    if (!p) return;
    if (p->k == PatKind::Bind) note_name(p->name);
    scan_pat(p->l);
    scan_pat(p->r);
  }

  void scan_names(const ExprPtr& e) {
    if (!e) return;
    if (e->k == ExprKind::Var || e->k == ExprKind::FunRef) note_name(e->name);
    scan_pat(e->pat);
    scan_names(e->a);
    scan_names(e->b);
    scan_names(e->c);
  }

  std::string fresh() { return "__k" + std::to_string(++counter); }

  // ---------------------------------------------------------- context

  Binding* lookup(const std::string& n) {
    for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
      if (it->name == n) return &*it;
    return nullptr;
  }

  size_t push(std::string n, TypePtr t, Span sp) {
    ctx.push_back({std::move(n), std::move(t), sp, false});
    return ctx.size() - 1;
  }

  bool known_pvar(const std::string& v) const {
    for (const auto& s : decl->pvars)
      if (s == v) return true;
    return false;
  }

  void validate_vars(const TypePtr& t, const Span& sp) {
    if (!t) return;
    if (t->k == TypeKind::Quantum) {
      if (t->pur.is_var() && !known_pvar(t->pur.var))
        fail(sp, errc::purity_unification,
             "purity variable '" + t->pur.var +
                 "' is not introduced by the parameter");
      return;
    }
    validate_vars(t->a, sp);
    validate_vars(t->b, sp);
  }

  // ---------------------------------------------------------- builders

  ExprPtr mk(ExprKind k, Span sp, TypePtr t) {
    ExprPtr e = make_expr(k, sp);
    e->synthetic = true;
    e->type = std::move(t);
    return e;
  }

  ExprPtr mk_var(const std::string& n, const TypePtr& t, Span sp) {
    ExprPtr e = mk(ExprKind::Var, sp, t);
    e->name = n;
    return e;
  }

  ExprPtr mk_true(Span sp) {
    ExprPtr e = mk(ExprKind::BoolLit, sp, Type::boolean());
    e->bval = true;
    return e;
  }

  ExprPtr mk_cast(const Purity& p, ExprPtr a, Span sp) {
    ExprPtr e = mk(ExprKind::Cast, sp, Type::quantum(a->type->shape, p));
    e->pur = p;
    e->a = std::move(a);
    return e;
  }

  ExprPtr mk_pair(ExprPtr a, ExprPtr b, Span sp) {
    ExprPtr e = mk(ExprKind::Pair, sp, Type::prod(a->type, b->type));
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
  }

  ExprPtr mk_entangle(const Purity& p, ExprPtr l, ExprPtr r, Span sp) {
    auto sh = QShape::epair(l->type->shape, r->type->shape);
    ExprPtr e = mk(ExprKind::Entangle, sp, Type::quantum(std::move(sh), p));
    e->pur = p;
    e->a = mk_pair(std::move(l), std::move(r), sp);
    return e;
  }

  ExprPtr mk_split(const Purity& p, ExprPtr a, Span sp) {
    const QShapePtr& sh = a->type->shape;
    ExprPtr e = mk(ExprKind::Split, sp,
                   Type::prod(Type::quantum(sh->l, p), Type::quantum(sh->r, p)));
    e->pur = p;
    e->a = std::move(a);
    return e;
  }

  ExprPtr mk_let(PatPtr s1, PatPtr s2, ExprPtr bound, ExprPtr body, Span sp) {
    ExprPtr e = mk(ExprKind::Let, sp, body->type);
    e->pat = Pattern::pair(std::move(s1), std::move(s2), sp);
    e->a = std::move(bound);
    e->b = std::move(body);
    return e;
  }

  // let (u1, u2) = e in k(u1, u2), for product-typed e
  template <class F>
  ExprPtr destructure(ExprPtr e, F&& k) {
    Span sp = e->span;
    TypePtr ta = e->type->a, tb = e->type->b;
    std::string n1 = fresh(), n2 = fresh();
    ExprPtr body = k(mk_var(n1, ta, sp), mk_var(n2, tb, sp));
    return mk_let(Pattern::bind(n1, ta, sp), Pattern::bind(n2, tb, sp),
                  std::move(e), std::move(body), sp);
  }

  // ---------------------------------------------------------- conversion

  // View e as one register at entangle purity pi: nests entangles over
  // product structure; component casts only ever move toward M.
  ExprPtr to_reg(ExprPtr e, const Purity& pi) {
    Span sp = e->span;
    if (is_quantum(e->type)) {
      if (e->type->pur == pi) return e;
      return mk_cast(pi, std::move(e), sp);
    }
    if (e->k == ExprKind::Pair) {
      ExprPtr l = to_reg(std::move(e->a), pi);
      ExprPtr r = to_reg(std::move(e->b), pi);
      return mk_entangle(pi, std::move(l), std::move(r), sp);
    }
    return destructure(std::move(e), [&](ExprPtr u1, ExprPtr u2) {
      return mk_entangle(pi, to_reg(std::move(u1), pi),
                         to_reg(std::move(u2), pi), sp);
    });
  }

  // Type-directed conversion: returns an expression of type want or fails.
  ExprPtr convert(ExprPtr e, const TypePtr& want) {
    if (type_equal(e->type, want)) return e;
    Span sp = e->span;
    const TypePtr src = e->type;

    if (want->k == TypeKind::Quantum) {
      if (src->k == TypeKind::Quantum) {
        if (!same_shape(src->shape, want->shape))
          fail(sp, errc::no_conversion,
               "no conversion from " + type_str(src) + " to " + type_str(want));
        return mk_cast(want->pur, std::move(e), sp);
      }
      if (src->k == TypeKind::Prod) {
        std::vector<Purity> ps;
        QShapePtr sh = type_shape(src);
        if (!quantum_leaves(src, ps) || !sh || !same_shape(sh, want->shape))
          fail(sp, errc::no_conversion,
               "no conversion from " + type_str(src) + " to " + type_str(want));
        Purity pi = pjoin(ps);
        ExprPtr reg = to_reg(std::move(e), pi);
        if (pi == want->pur) return reg;
        return mk_cast(want->pur, std::move(reg), sp);
      }
      fail(sp, errc::no_conversion,
           "no conversion from " + type_str(src) + " to " + type_str(want));
    }

    if (want->k == TypeKind::Prod) {
      if (src->k == TypeKind::Prod) {
        if (e->k == ExprKind::Pair) {
          e->a = convert(std::move(e->a), want->a);
          e->b = convert(std::move(e->b), want->b);
          e->type = Type::prod(e->a->type, e->b->type);
          return e;
        }
        return destructure(std::move(e), [&](ExprPtr u1, ExprPtr u2) {
          return mk_pair(convert(std::move(u1), want->a),
                         convert(std::move(u2), want->b), sp);
        });
      }
      if (src->k == TypeKind::Quantum && !src->shape->leaf()) {
        std::vector<Purity> wl;
        if (!quantum_leaves(want, wl))
          fail(sp, errc::no_conversion,
               "no conversion from " + type_str(src) + " to " + type_str(want));
        // A pure slot anywhere forces a purifying split; otherwise split
        // mixed and cast components afterwards (the only option for
        // purity-variable slots, which split itself cannot target).
        Purity sigma =
            has_pure_leaf(want) ? Purity::pure() : Purity::mixed();
        ExprPtr root = (src->pur == sigma)
                           ? std::move(e)
                           : mk_cast(sigma, std::move(e), sp);
        ExprPtr parts = mk_split(sigma, std::move(root), sp);
        if (type_equal(parts->type, want)) return parts;
        return destructure(std::move(parts), [&](ExprPtr u1, ExprPtr u2) {
          return mk_pair(convert(std::move(u1), want->a),
                         convert(std::move(u2), want->b), sp);
        });
      }
      fail(sp, errc::no_conversion,
           "no conversion from " + type_str(src) + " to " + type_str(want));
    }

    fail(sp, errc::no_conversion,
         "no conversion from " + type_str(src) + " to " + type_str(want));
  }

  // ---------------------------------------------------------- measurement

  // Measuring a multi-qubit value measures every leaf; the result mirrors
  // the operand structure as a product of bools.
  ExprPtr measure_all(ExprPtr e) {
    Span sp = e->span;
    const TypePtr t = e->type;
    if (t->k == TypeKind::Quantum) {
      if (t->shape->leaf()) {
        ExprPtr m = mk(ExprKind::Measure, sp, Type::boolean());
        m->a = std::move(e);
        return m;
      }
      ExprPtr reg = t->pur.is_m() ? std::move(e)
                                  : mk_cast(Purity::mixed(), std::move(e), sp);
      ExprPtr parts = mk_split(Purity::mixed(), std::move(reg), sp);
      return destructure(std::move(parts), [&](ExprPtr u1, ExprPtr u2) {
        return mk_pair(measure_all(std::move(u1)), measure_all(std::move(u2)),
                       sp);
      });
    }
    if (t->k == TypeKind::Prod) {
      if (e->k == ExprKind::Pair) {
        e->a = measure_all(std::move(e->a));
        e->b = measure_all(std::move(e->b));
        e->type = Type::prod(e->a->type, e->b->type);
        return e;
      }
      return destructure(std::move(e), [&](ExprPtr u1, ExprPtr u2) {
        return mk_pair(measure_all(std::move(u1)), measure_all(std::move(u2)),
                       sp);
      });
    }
    fail(sp, errc::arity, "measure expects a quantum value, got " + type_str(t));
  }

  // ---------------------------------------------------------- discards

  // let _ = measure x in body, recursing through products; classical
  // components are dropped silently.
  ExprPtr discard_into(const std::string& name, const TypePtr& t, ExprPtr body,
                       Span sp) {
    if (is_classical(t)) return body;
    if (t->k == TypeKind::Quantum) {
      ExprPtr bound =
          mk_pair(measure_all(mk_var(name, t, sp)), mk_true(sp), sp);
      return mk_let(Pattern::wild(nullptr, sp), Pattern::wild(nullptr, sp),
                    std::move(bound), std::move(body), sp);
    }
    if (t->k == TypeKind::Prod) {
      std::string n1 = fresh(), n2 = fresh();
      ExprPtr inner = discard_into(
          n1, t->a, discard_into(n2, t->b, std::move(body), sp), sp);
      return mk_let(Pattern::bind(n1, t->a, sp), Pattern::bind(n2, t->b, sp),
                    mk_var(name, t, sp), std::move(inner), sp);
    }
    return body;
  }

  // Close the binding at ctx index i, discarding into body when legal.
  ExprPtr close_binding(size_t i, ExprPtr body) {
    Binding& b = ctx[i];
    if (b.consumed || is_classical(b.type)) return body;
    if (!discardable(b.type))
      fail(b.span, errc::linearity,
           "'" + b.name +
               "' is never used; only pure or classical values may be "
               "dropped");
    b.consumed = true;
    return discard_into(b.name, b.type, std::move(body), b.span);
  }

  // ---------------------------------------------------------- unification

  void unify(const TypePtr& p, const TypePtr& a, PuritySubst& th,
             const Span& sp) {
    if (!p || !a) return;
    switch (p->k) {
      case TypeKind::Quantum: {
        if (!p->pur.is_var()) return;
        Purity val;
        if (a->k == TypeKind::Quantum) {
          val = a->pur;
        } else if (a->k == TypeKind::Prod) {
          std::vector<Purity> ps;
          if (!quantum_leaves(a, ps)) return;
          val = pjoin(ps);
        } else {
          return;
        }
        auto it = th.find(p->pur.var);
        if (it == th.end())
          th.emplace(p->pur.var, val);
        else if (it->second != val)
          fail(sp, errc::purity_unification,
               "'" + p->pur.var + "' would need to be both " +
                   it->second.str() + " and " + val.str());
        return;
      }
      case TypeKind::Prod:
      case TypeKind::Arrow: {
        if (a->k == p->k) {
          unify(p->a, a->a, th, sp);
          unify(p->b, a->b, th, sp);
        } else if (p->k == TypeKind::Prod && a->k == TypeKind::Quantum &&
                   !a->shape->leaf()) {
          unify(p->a, Type::quantum(a->shape->l, a->pur), th, sp);
          unify(p->b, Type::quantum(a->shape->r, a->pur), th, sp);
        }
        return;
      }
      default:
        return;
    }
  }

  // ---------------------------------------------------------- expressions

  ExprPtr check_var(ExprPtr e) {
    if (Binding* b = lookup(e->name)) {
      if (!is_classical(b->type)) {
        if (b->consumed)
          fail(e->span, errc::linearity,
               "'" + e->name + "' is used more than once");
        b->consumed = true;
      }
      e->type = b->type;
      return e;
    }
    auto it = visible.find(e->name);
    if (it != visible.end()) {
      const FunDecl* d = it->second;
      if (!d->pvars.empty())
        fail(e->span, errc::purity_unification,
             "generic function '" + d->name + "' must be applied directly");
      e->k = ExprKind::FunRef;
      e->type = Type::arrow(d->param_type, d->ret_type);
      return e;
    }
    fail(e->span, errc::unknown_variable,
         "unknown variable '" + e->name + "'");
  }

  ExprPtr check_app(ExprPtr e) {
    const FunDecl* d = nullptr;
    if ((e->a->k == ExprKind::Var && !lookup(e->a->name)) ||
        e->a->k == ExprKind::FunRef) {
      auto it = visible.find(e->a->name);
      if (it != visible.end())
        d = it->second;
      else if (e->a->k == ExprKind::FunRef)
        fail(e->a->span, errc::unknown_variable,
             "unknown function '" + e->a->name + "'");
    }
    if (d) {
      e->a->k = ExprKind::FunRef;
      ExprPtr arg = check(std::move(e->b));
      PuritySubst th;
      if (!d->pvars.empty()) {
        unify(d->param_type, arg->type, th, e->span);
        for (const std::string& v : d->pvars)
          if (!th.count(v))
            fail(e->span, errc::purity_unification,
                 "cannot infer purity '" + v + "' for call to '" + d->name +
                     "'");
      }
      TypePtr pt = instantiate_type(d->param_type, th);
      TypePtr rt = instantiate_type(d->ret_type, th);
      e->b = convert(std::move(arg), pt);
      e->a->type = Type::arrow(pt, rt);
      e->inst =
          d->pvars.empty() ? nullptr : std::make_shared<PuritySubst>(th);
      e->type = rt;
      return e;
    }
    e->a = check(std::move(e->a));
    if (e->a->type->k != TypeKind::Arrow)
      fail(e->a->span, errc::arity,
           "cannot apply a value of type " + type_str(e->a->type));
    ExprPtr arg = check(std::move(e->b));
    e->b = convert(std::move(arg), e->a->type->a);
    e->type = e->a->type->b;
    return e;
  }

  ExprPtr check_let(ExprPtr e) {
    PatPtr s1 = e->pat->l, s2 = e->pat->r;
    if (s1->k == PatKind::Bind && s2->k == PatKind::Bind &&
        s1->name == s2->name)
      fail(s2->span, errc::linearity,
           "pattern binds '" + s1->name + "' twice");
    if (s1->ann) validate_vars(s1->ann, s1->span);
    if (s2->ann) validate_vars(s2->ann, s2->span);

    ExprPtr bound = check(std::move(e->a));
    const TypePtr bt = bound->type;
    TypePtr w1 = s1->ann, w2 = s2->ann;
    if (bt->k == TypeKind::Prod) {
      if (!w1) w1 = bt->a;
      if (!w2) w2 = bt->b;
    } else if (bt->k == TypeKind::Quantum && !bt->shape->leaf()) {
      // Unannotated slots of a register destructure: a pure annotation
      // anywhere selects the purifying split, otherwise split mixed.
      Purity sigma = ((w1 && has_pure_leaf(w1)) || (w2 && has_pure_leaf(w2)))
                         ? Purity::pure()
                         : Purity::mixed();
      if (!w1) w1 = Type::quantum(bt->shape->l, sigma);
      if (!w2) w2 = Type::quantum(bt->shape->r, sigma);
    } else {
      fail(e->span, errc::no_conversion,
           "cannot destructure a value of type " + type_str(bt));
    }
    e->a = convert(std::move(bound), Type::prod(w1, w2));

    size_t entry = ctx.size();
    auto bind_slot = [&](const PatPtr& s, const TypePtr& w) -> size_t {
      if (s->k == PatKind::Bind) {
        s->ann = w;
        return push(s->name, w, s->span);
      }
      if (is_classical(w)) return SIZE_MAX;
      if (!discardable(w))
        fail(s->span, errc::linearity,
             "cannot discard a value of type " + type_str(w));
      s->k = PatKind::Bind;
      s->name = fresh();
      s->ann = w;
      return push(s->name, w, s->span);
    };
    size_t i1 = bind_slot(s1, w1);
    size_t i2 = bind_slot(s2, w2);

    ExprPtr body = check(std::move(e->b));
    if (i2 != SIZE_MAX) body = close_binding(i2, std::move(body));
    if (i1 != SIZE_MAX) body = close_binding(i1, std::move(body));
    ctx.resize(entry);

    e->b = std::move(body);
    e->type = e->b->type;
    return e;
  }

  ExprPtr check_if(ExprPtr e) {
    ExprPtr c = check(std::move(e->a));
    if (c->type->k != TypeKind::Bool)
      fail(c->span, errc::no_conversion,
           "if condition must be bool, got " + type_str(c->type));
    e->a = std::move(c);

    std::vector<bool> before(ctx.size());
    for (size_t i = 0; i < ctx.size(); ++i) before[i] = ctx[i].consumed;

    ExprPtr t = check(std::move(e->b));
    std::vector<bool> after_t(ctx.size());
    for (size_t i = 0; i < ctx.size(); ++i) {
      after_t[i] = ctx[i].consumed;
      ctx[i].consumed = before[i];
    }
    ExprPtr f = check(std::move(e->c));

    // Both branches must consume the same bindings; a pure value consumed
    // in only one branch is discarded in the other.
    for (size_t i = 0; i < before.size(); ++i) {
      bool in_t = after_t[i], in_f = ctx[i].consumed;
      if (in_t == in_f) continue;
      Binding& b = ctx[i];
      if (!discardable(b.type))
        fail(e->span, errc::branch_mismatch,
             "'" + b.name + "' is consumed in only one branch of if");
      if (in_t) {
        f = discard_into(b.name, b.type, std::move(f), b.span);
        ctx[i].consumed = true;
      } else {
        t = discard_into(b.name, b.type, std::move(t), b.span);
      }
    }

    const TypePtr tt = t->type, tf = f->type;
    if (is_quantum(tt) && is_quantum(tf) && same_shape(tt->shape, tf->shape)) {
      // Measurement in a branch decoheres the result: always mixed.
      TypePtr want = Type::quantum(tt->shape, Purity::mixed());
      if (!type_equal(tt, want)) t = convert(std::move(t), want);
      if (!type_equal(tf, want)) f = convert(std::move(f), want);
      e->type = want;
    } else if (type_equal(tt, tf) && is_classical(tt)) {
      // Functions stay statically resolvable: no conditional selection.
      if (contains_arrow(tt))
        fail(e->span, errc::branch_mismatch,
             "if cannot select between functions");
      e->type = tt;
    } else {
      fail(e->span, errc::branch_mismatch,
           "if branches must agree: " + type_str(tt) + " vs " + type_str(tf) +
               " (a quantum result must be a single register)");
    }
    e->b = std::move(t);
    e->c = std::move(f);
    return e;
  }

  ExprPtr check_gate(ExprPtr e) {
    ExprPtr a = check(std::move(e->a));
    QShapePtr gs = gate_shape(e->gate);
    QShapePtr as = type_shape(a->type);
    if (!as || !same_shape(as, gs))
      fail(e->span, errc::arity,
           std::string(gate_name(e->gate)) + " expects an operand of shape " +
               shape_str(gs) + ", got " + type_str(a->type));
    Purity pi;
    if (is_quantum(a->type)) {
      pi = a->type->pur;
    } else {
      std::vector<Purity> ps;
      quantum_leaves(a->type, ps);
      pi = pjoin(ps);
    }
    e->a = convert(std::move(a), Type::quantum(gs, pi));
    e->type = Type::quantum(gs, pi);
    return e;
  }

  // Explicit entangle is strict: every component must already have exactly
  // the requested purity (no conversions are inserted).
  ExprPtr strict_component(ExprPtr e, const Purity& pi) {
    Span sp = e->span;
    if (is_quantum(e->type)) {
      if (e->type->pur != pi)
        fail(sp, errc::purity_mismatch,
             "entangle<" + pi.str() + "> requires components of purity " +
                 pi.str() + ", got " + type_str(e->type));
      return e;
    }
    if (e->type->k == TypeKind::Prod) {
      if (e->k == ExprKind::Pair) {
        ExprPtr l = strict_component(std::move(e->a), pi);
        ExprPtr r = strict_component(std::move(e->b), pi);
        return mk_entangle(pi, std::move(l), std::move(r), sp);
      }
      return destructure(std::move(e), [&](ExprPtr u1, ExprPtr u2) {
        return mk_entangle(pi, strict_component(std::move(u1), pi),
                           strict_component(std::move(u2), pi), sp);
      });
    }
    fail(sp, errc::arity,
         "entangle expects quantum components, got " + type_str(e->type));
  }

  ExprPtr check_entangle(ExprPtr e) {
    if (e->pur.is_var() && !known_pvar(e->pur.var))
      fail(e->span, errc::purity_unification,
           "purity variable '" + e->pur.var +
               "' is not introduced by the parameter");
    const Purity pi = e->pur;
    if (e->a->k == ExprKind::Pair) {
      ExprPtr l = strict_component(check(std::move(e->a->a)), pi);
      ExprPtr r = strict_component(check(std::move(e->a->b)), pi);
      auto sh = QShape::epair(l->type->shape, r->type->shape);
      e->a->a = std::move(l);
      e->a->b = std::move(r);
      e->a->type = Type::prod(e->a->a->type, e->a->b->type);
      e->type = Type::quantum(std::move(sh), pi);
      return e;
    }
    ExprPtr op = check(std::move(e->a));
    if (op->type->k != TypeKind::Prod)
      fail(e->span, errc::arity, "entangle takes two components");
    ExprPtr self = std::move(e);
    return destructure(std::move(op), [&](ExprPtr u1, ExprPtr u2) {
      ExprPtr l = strict_component(std::move(u1), pi);
      ExprPtr r = strict_component(std::move(u2), pi);
      auto sh = QShape::epair(l->type->shape, r->type->shape);
      self->a = mk_pair(std::move(l), std::move(r), self->span);
      self->type = Type::quantum(std::move(sh), pi);
      return std::move(self);
    });
  }

  ExprPtr check_split(ExprPtr e) {
    if (e->pur.is_var())
      fail(e->span, errc::purity_mismatch,
           "split requires a concrete purity (P or M); cast around split<M> "
           "instead");
    ExprPtr a = check(std::move(e->a));
    if (!is_quantum(a->type) || a->type->shape->leaf())
      fail(e->span, errc::arity,
           "split expects an entangled pair, got " + type_str(a->type));
    if (a->type->pur != e->pur)
      fail(e->span, errc::purity_mismatch,
           "split<" + e->pur.str() + "> requires operand purity " +
               e->pur.str() + ", got " + type_str(a->type));
    e->type = Type::prod(Type::quantum(a->type->shape->l, e->pur),
                         Type::quantum(a->type->shape->r, e->pur));
    e->a = std::move(a);
    return e;
  }

  ExprPtr check_cast(ExprPtr e) {
    if (e->pur.is_var() && !known_pvar(e->pur.var))
      fail(e->span, errc::purity_unification,
           "purity variable '" + e->pur.var +
               "' is not introduced by the parameter");
    ExprPtr a = check(std::move(e->a));
    if (!is_quantum(a->type))
      fail(e->span, errc::arity,
           "cast expects a quantum value, got " + type_str(a->type));
    e->type = Type::quantum(a->type->shape, e->pur);
    e->a = std::move(a);
    return e;
  }

  ExprPtr check(ExprPtr e) {
    switch (e->k) {
      case ExprKind::Var:
        return check_var(std::move(e));
      case ExprKind::FunRef: {
        auto it = visible.find(e->name);
        if (it == visible.end())
          fail(e->span, errc::unknown_variable,
               "unknown function '" + e->name + "'");
        if (!it->second->pvars.empty())
          fail(e->span, errc::purity_unification,
               "generic function '" + e->name + "' must be applied directly");
        e->type = Type::arrow(it->second->param_type, it->second->ret_type);
        return e;
      }
      case ExprKind::App:
        return check_app(std::move(e));
      case ExprKind::Pair:
        e->a = check(std::move(e->a));
        e->b = check(std::move(e->b));
        e->type = Type::prod(e->a->type, e->b->type);
        return e;
      case ExprKind::Let:
        return check_let(std::move(e));
      case ExprKind::If:
        return check_if(std::move(e));
      case ExprKind::BoolLit:
        e->type = Type::boolean();
        return e;
      case ExprKind::QInit:
        e->type = Type::quantum(QShape::qubit(), Purity::pure());
        return e;
      case ExprKind::Gate:
        return check_gate(std::move(e));
      case ExprKind::Measure: {
        ExprPtr a = check(std::move(e->a));
        if (is_quantum(a->type) && a->type->shape->leaf()) {
          e->a = std::move(a);
          e->type = Type::boolean();
          return e;
        }
        return measure_all(std::move(a));
      }
      case ExprKind::Entangle:
        return check_entangle(std::move(e));
      case ExprKind::Split:
        return check_split(std::move(e));
      case ExprKind::Cast:
        return check_cast(std::move(e));
      case ExprKind::QLit:
        fail(e->span, errc::arity,
             "quantum literal cannot appear in a source program");
    }
    fail(e->span, errc::arity, "malformed expression");
  }
};

}  // namespace

void typecheck(Program& prog) {
  Checker ck(prog);
  for (const FunDecl& d : prog.decls) {
    ck.note_name(d.name);
    ck.note_name(d.param_name);
    ck.scan_names(d.body);
  }
  std::set<std::string> seen;
  for (FunDecl& d : prog.decls) {
    if (!seen.insert(d.name).second)
      ck.fail(d.span, errc::duplicate_decl,
              "duplicate definition of '" + d.name + "'");
    ck.decl = &d;
    ck.validate_vars(d.ret_type, d.span);
    ck.ctx.clear();
    size_t pi = ck.push(d.param_name, d.param_type, d.span);
    ExprPtr body = ck.check(std::move(d.body));
    body = ck.convert(std::move(body), d.ret_type);
    body = ck.close_binding(pi, std::move(body));
    d.body = std::move(body);
    ck.ctx.clear();
    ck.visible[d.name] = &d;
  }
  const FunDecl* m = prog.find("main");
  if (!m)
    ck.fail({1, 1, 1, 1}, errc::no_main, "program must define main");
  if (!m->unit_param)
    ck.fail(m->span, errc::no_main, "main must take ()");
  if (!m->pvars.empty())
    ck.fail(m->span, errc::purity_unification, "main cannot be generic");
}

}  // namespace twist
