#include "twist/interp.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace twist {

namespace {

// Re-derives the type of a machine configuration from first principles,
// sharing no code with the elaborating typechecker. Quantum resources are
// linear: every binder of non-classical type is consumed exactly once and
// the qubit literals partition the live domain.
struct Strict {
  const Program& prog;
  std::set<QName> domain;
  std::set<QName> used;

  struct Bnd {
    TypePtr t;
    bool classical = false;
    bool consumed = false;
  };
  std::vector<std::map<std::string, Bnd>> scopes;

  TwistError err(const char* code, Span sp, const std::string& m) const {
    return TwistError({prog.file, sp, code, "strict: " + m});
  }

  Bnd* lookup(const std::string& n) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  // Consumption signature: which binders are consumed plus which qubits are
  // referenced. Branches of an if must produce identical signatures.
  using Sig = std::pair<std::vector<std::pair<size_t, std::string>>,
                        std::set<QName>>;
  Sig sig() const {
    Sig s;
    for (size_t i = 0; i < scopes.size(); ++i)
      for (const auto& [n, b] : scopes[i])
        if (b.consumed) s.first.push_back({i, n});
    std::sort(s.first.begin(), s.first.end());
    s.second = used;
    return s;
  }
  void restore(const Sig& s) {
    for (auto& sc : scopes)
      for (auto& [n, b] : sc) b.consumed = false;
    for (const auto& [i, n] : s.first) scopes[i][n].consumed = true;
    used = s.second;
  }

  void bind_pat(const PatPtr& p, const TypePtr& t) {
    switch (p->k) {
      case PatKind::Bind:
        if (p->ann && !type_equal(p->ann, t))
          throw err(errc::no_conversion, p->span,
                    "binder annotation does not match bound type");
        if (scopes.back().count(p->name))
          throw err(errc::linearity, p->span,
                    "duplicate binder '" + p->name + "' in one pattern");
        scopes.back()[p->name] = {t, is_classical(t), false};
        return;
      case PatKind::Wild:
        if (p->ann && !type_equal(p->ann, t))
          throw err(errc::no_conversion, p->span,
                    "binder annotation does not match bound type");
        if (!is_classical(t))
          throw err(errc::linearity, p->span,
                    "wildcard discards a non-classical value");
        return;
      case PatKind::Pair:
        if (t->k != TypeKind::Prod)
          throw err(errc::no_conversion, p->span,
                    "pair pattern against non-product type");
        bind_pat(p->l, t->a);
        bind_pat(p->r, t->b);
        return;
    }
  }

  void pop_scope(Span sp) {
    for (const auto& [n, b] : scopes.back())
      if (!b.classical && !b.consumed)
        throw err(errc::linearity, sp,
                  "linear binding '" + n + "' is never consumed");
    scopes.pop_back();
  }

  static bool has_arrow(const TypePtr& t) {
    switch (t->k) {
      case TypeKind::Arrow: return true;
      case TypeKind::Prod: return has_arrow(t->a) || has_arrow(t->b);
      default: return false;
    }
  }

  TypePtr fn_type(const FunDecl* d, const PuritySubst* inst, Span sp) {
    if (d->pvars.empty())
      return Type::arrow(d->param_type, d->ret_type);
    if (!inst)
      throw err(errc::purity_unification, sp,
                "purity-generic function used without instantiation");
    for (const auto& v : d->pvars) {
      auto it = inst->find(v);
      if (it == inst->end() || it->second.is_var())
        throw err(errc::purity_unification, sp,
                  "instantiation does not fix purity variable '" + v + "'");
    }
    return Type::arrow(instantiate_type(d->param_type, *inst),
                       instantiate_type(d->ret_type, *inst));
  }

  TypePtr check(const ExprPtr& e) {
    switch (e->k) {
      case ExprKind::Var: {
        Bnd* b = lookup(e->name);
        if (!b)
          throw err(errc::unknown_variable, e->span,
                    "unbound variable '" + e->name + "'");
        if (!b->classical) {
          if (b->consumed)
            throw err(errc::linearity, e->span,
                      "linear variable '" + e->name + "' consumed twice");
          b->consumed = true;
        }
        return b->t;
      }

      case ExprKind::FunRef: {
        const FunDecl* d = prog.find(e->name);
        if (!d)
          throw err(errc::unknown_variable, e->span,
                    "unknown function '" + e->name + "'");
        if (!d->pvars.empty())
          throw err(errc::purity_unification, e->span,
                    "first-class reference to a purity-generic function");
        return Type::arrow(d->param_type, d->ret_type);
      }

      case ExprKind::App: {
        TypePtr tf;
        if (e->a->k == ExprKind::FunRef) {
          const FunDecl* d = prog.find(e->a->name);
          if (!d)
            throw err(errc::unknown_variable, e->a->span,
                      "unknown function '" + e->a->name + "'");
          tf = fn_type(d, e->inst.get(), e->span);
        } else {
          tf = check(e->a);
        }
        if (tf->k != TypeKind::Arrow)
          throw err(errc::arity, e->span, "application of a non-function");
        TypePtr ta = check(e->b);
        if (!type_equal(ta, tf->a))
          throw err(errc::no_conversion, e->span,
                    "argument type " + type_str(ta) +
                        " does not match parameter " + type_str(tf->a));
        return tf->b;
      }

      case ExprKind::Pair:
        return Type::prod(check(e->a), check(e->b));

      case ExprKind::Let: {
        TypePtr ta = check(e->a);
        scopes.emplace_back();
        bind_pat(e->pat, ta);
        TypePtr tb = check(e->b);
        pop_scope(e->span);
        return tb;
      }

      case ExprKind::If: {
        TypePtr tc = check(e->a);
        if (tc->k != TypeKind::Bool)
          throw err(errc::no_conversion, e->span,
                    "if condition is not a boolean");
        Sig before = sig();
        TypePtr tt = check(e->b);
        Sig st = sig();
        restore(before);
        TypePtr tf = check(e->c);
        Sig sf = sig();
        if (st != sf)
          throw err(errc::branch_mismatch, e->span,
                    "branches consume different resources");
        if (!type_equal(tt, tf))
          throw err(errc::branch_mismatch, e->span,
                    "branch types differ: " + type_str(tt) + " vs " +
                        type_str(tf));
        if (tt->k == TypeKind::Quantum) {
          if (!tt->pur.is_m())
            throw err(errc::branch_mismatch, e->span,
                      "quantum if result must be mixed");
        } else if (is_classical(tt)) {
          if (has_arrow(tt))
            throw err(errc::branch_mismatch, e->span,
                      "if result must not contain functions");
        } else {
          throw err(errc::branch_mismatch, e->span,
                    "if result must be a single register or classical");
        }
        return tt;
      }

      case ExprKind::BoolLit:
        return Type::boolean();

      case ExprKind::QInit:
        return Type::quantum(QShape::qubit(), Purity::pure());

      case ExprKind::Gate: {
        TypePtr t = check(e->a);
        if (t->k != TypeKind::Quantum)
          throw err(errc::no_conversion, e->span,
                    "gate operand is not quantum");
        if (!same_shape(t->shape, gate_shape(e->gate)))
          throw err(errc::arity, e->span, "gate operand shape mismatch");
        return t;
      }

      case ExprKind::Measure: {
        TypePtr t = check(e->a);
        if (t->k != TypeKind::Quantum || !t->shape->leaf())
          throw err(errc::no_conversion, e->span,
                    "measure operand is not a single qubit");
        return Type::boolean();
      }

      case ExprKind::Entangle: {
        if (e->pur.is_var())
          throw err(errc::purity_unification, e->span,
                    "uninstantiated purity on entangle");
        TypePtr t = check(e->a);
        if (t->k != TypeKind::Prod || t->a->k != TypeKind::Quantum ||
            t->b->k != TypeKind::Quantum)
          throw err(errc::no_conversion, e->span,
                    "entangle operand is not a pair of registers");
        if (!(t->a->pur == e->pur) || !(t->b->pur == e->pur))
          throw err(errc::purity_mismatch, e->span,
                    "entangle operand purity differs from annotation");
        return Type::quantum(QShape::epair(t->a->shape, t->b->shape), e->pur);
      }

      case ExprKind::Split: {
        if (e->pur.is_var())
          throw err(errc::purity_unification, e->span,
                    "uninstantiated purity on split");
        TypePtr t = check(e->a);
        if (t->k != TypeKind::Quantum || t->shape->leaf())
          throw err(errc::no_conversion, e->span,
                    "split operand is not an entangled pair");
        if (!(t->pur == e->pur))
          throw err(errc::purity_mismatch, e->span,
                    "split operand purity differs from annotation");
        return Type::prod(Type::quantum(t->shape->l, e->pur),
                          Type::quantum(t->shape->r, e->pur));
      }

      case ExprKind::Cast: {
        if (e->pur.is_var())
          throw err(errc::purity_unification, e->span,
                    "uninstantiated purity on cast");
        TypePtr t = check(e->a);
        if (t->k != TypeKind::Quantum)
          throw err(errc::no_conversion, e->span,
                    "cast operand is not quantum");
        return Type::quantum(t->shape, e->pur);
      }

      case ExprKind::QLit: {
        if (e->pur.is_var())
          throw err(errc::purity_unification, e->span,
                    "uninstantiated purity on register literal");
        std::vector<uint32_t> names;
        qval_names(e->qval, names);
        for (uint32_t n : names) {
          QName q = static_cast<QName>(n);
          if (!domain.count(q))
            throw err(errc::linearity, e->span,
                      "register references a qubit outside the live domain");
          if (!used.insert(q).second)
            throw err(errc::linearity, e->span,
                      "qubit " + qname_str(q) + " referenced twice");
        }
        return Type::quantum(qval_shape(e->qval), e->pur);
      }
    }
    throw err(errc::arity, e->span, "malformed expression");
  }
};

}  // namespace

TypePtr strict_type(const ExprPtr& e, const Program& prog,
                    const std::vector<QName>& domain) {
  Strict s{prog, std::set<QName>(domain.begin(), domain.end()), {}, {}};
  s.scopes.emplace_back();
  TypePtr t = s.check(e);
  s.pop_scope(e->span);
  if (s.used != s.domain)
    throw s.err(errc::linearity, e->span,
                "configuration does not reference every live qubit");
  return t;
}

}  // namespace twist
