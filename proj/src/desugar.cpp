#include "twist/desugar.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace twist {

namespace {

class Desugarer {
 public:
  explicit Desugarer(const Program& in) : in_(in) {}

  Program run() {
    for (const auto& d : in_.decls) {
      bump_counter(d.param);
      bump_counter(d.body);
    }
    Program out;
    out.file = in_.file;
    for (const auto& a : in_.aliases) {
      if (aliases_.count(a.name))
        throw TwistError({in_.file, a.span, errc::duplicate_decl,
                          "type alias '" + a.name + "' redefined"});
      if (a.name == "bool" || a.name == "qubit")
        throw TwistError({in_.file, a.span, errc::duplicate_decl,
                          "alias may not shadow builtin type '" + a.name + "'"});
      aliases_[a.name] = resolve(a.type, a.span);
    }
    std::set<std::string> names;
    for (const auto& d : in_.decls) {
      if (!names.insert(d.name).second)
        throw TwistError({in_.file, d.span, errc::duplicate_decl,
                          "function '" + d.name + "' redefined"});
      out.decls.push_back(decl(d));
    }
    return out;
  }

 private:
  const Program& in_;
  std::map<std::string, TypePtr> aliases_;
  int counter_ = 0;

  std::string fresh(const char* base) {
    return std::string("__") + base + std::to_string(++counter_);
  }

  // Fresh names must not collide with synthetic binders already present in
  // re-parsed core output, so start above any existing __<base><n> suffix.
  void note_name(const std::string& n) {
    if (n.rfind("__", 0) != 0) return;
    size_t k = n.size();
    while (k > 2 && std::isdigit(static_cast<unsigned char>(n[k - 1]))) --k;
    if (k == n.size()) return;
    counter_ = std::max(counter_, std::stoi(n.substr(k)));
  }

  void bump_counter(const PatPtr& p) {
    if (!p) return;
    if (p->k == PatKind::Bind) note_name(p->name);
    bump_counter(p->l);
    bump_counter(p->r);
  }

  void bump_counter(const ExprPtr& e) {
    if (!e) return;
    if (e->k == ExprKind::Var) note_name(e->name);
    bump_counter(e->pat);
    bump_counter(e->a);
    bump_counter(e->b);
    bump_counter(e->c);
  }

  TypePtr resolve(const TypePtr& t, Span sp) {
    if (!t) return t;
    switch (t->k) {
      case TypeKind::Alias: {
        auto it = aliases_.find(t->alias);
        if (it == aliases_.end())
          throw TwistError({in_.file, sp, errc::unknown_alias,
                            "unknown type '" + t->alias + "'"});
        return it->second;
      }
      case TypeKind::Prod:
        return Type::prod(resolve(t->a, sp), resolve(t->b, sp));
      case TypeKind::Arrow:
        return Type::arrow(resolve(t->a, sp), resolve(t->b, sp));
      default: return t;
    }
  }

  PatPtr resolve_pat(const PatPtr& p) {
    if (!p) return p;
    auto q = std::make_shared<Pattern>(*p);
    q->ann = resolve(p->ann, p->span);
    q->l = resolve_pat(p->l);
    q->r = resolve_pat(p->r);
    return q;
  }

  static bool is_leaf(const PatPtr& p) { return p->k != PatKind::Pair; }

  // Core let: always binds a two-slot pattern of leaves.
  ExprPtr core_let(PatPtr l1, PatPtr l2, ExprPtr bound, ExprPtr body,
                   Span sp) {
    auto e = make_expr(ExprKind::Let, sp);
    e->pat = Pattern::pair(std::move(l1), std::move(l2), sp);
    e->a = std::move(bound);
    e->b = std::move(body);
    return e;
  }

  ExprPtr lower_let(const PatPtr& pat, ExprPtr bound, ExprPtr body, Span sp) {
    if (is_leaf(pat)) {
      // let x = e  ~~>  let (x, _) = (e, true)
      auto filler = make_expr(ExprKind::BoolLit, sp);
      filler->bval = true;
      filler->synthetic = true;
      auto pr = make_expr(ExprKind::Pair, sp);
      pr->a = std::move(bound);
      pr->b = std::move(filler);
      pr->synthetic = true;
      return core_let(pat, Pattern::wild(nullptr, sp), std::move(pr),
                      std::move(body), sp);
    }
    PatPtr p1 = pat->l, p2 = pat->r;
    PatPtr l1 = p1, l2 = p2;
    ExprPtr inner = std::move(body);
    if (!is_leaf(p2)) {
      std::string n = fresh("t");
      l2 = Pattern::bind(n, nullptr, p2->span);
      auto v = make_expr(ExprKind::Var, p2->span);
      v->name = n;
      inner = lower_let(p2, std::move(v), std::move(inner), sp);
    }
    if (!is_leaf(p1)) {
      std::string n = fresh("t");
      l1 = Pattern::bind(n, nullptr, p1->span);
      auto v = make_expr(ExprKind::Var, p1->span);
      v->name = n;
      inner = lower_let(p1, std::move(v), std::move(inner), sp);
    }
    return core_let(l1, l2, std::move(bound), std::move(inner), sp);
  }

  ExprPtr expr(const ExprPtr& e) {
    switch (e->k) {
      case ExprKind::Let: {
        ExprPtr bound = expr(e->a);
        ExprPtr body = expr(e->b);
        return lower_let(resolve_pat(e->pat), std::move(bound),
                         std::move(body), e->span);
      }
      case ExprKind::Measure: {
        ExprPtr arg = expr(e->a);
        if (arg->k == ExprKind::Pair) {
          // measure (a, b) ~~> (measure a, measure b), recursively
          auto wrap = [&](ExprPtr sub) {
            auto m = make_expr(ExprKind::Measure, e->span);
            m->a = std::move(sub);
            return expr(m);
          };
          auto p = make_expr(ExprKind::Pair, e->span);
          p->a = wrap(arg->a);
          p->b = wrap(arg->b);
          return p;
        }
        auto m = std::make_shared<Expr>(*e);
        m->a = std::move(arg);
        return m;
      }
      default: {
        auto c = std::make_shared<Expr>(*e);
        c->a = e->a ? expr(e->a) : nullptr;
        c->b = e->b ? expr(e->b) : nullptr;
        c->c = e->c ? expr(e->c) : nullptr;
        c->pat = resolve_pat(e->pat);
        return c;
      }
    }
  }

  TypePtr pattern_type(const PatPtr& p) {
    if (p->k == PatKind::Pair)
      return Type::prod(pattern_type(p->l), pattern_type(p->r));
    if (!p->ann)
      throw TwistError({in_.file, p->span, errc::purity_unification,
                        "parameter pattern requires a type annotation"});
    return p->ann;
  }

  void collect_pvars(const TypePtr& t, std::vector<std::string>& out) {
    if (!t) return;
    switch (t->k) {
      case TypeKind::Prod:
      case TypeKind::Arrow:
        collect_pvars(t->a, out);
        collect_pvars(t->b, out);
        return;
      case TypeKind::Quantum:
        if (t->pur.is_var()) out.push_back(t->pur.var);
        return;
      default: return;
    }
  }

  FunDecl decl(const FunDecl& d) {
    FunDecl out;
    out.name = d.name;
    out.span = d.span;
    out.unit_param = d.unit_param;
    out.ret_type = resolve(d.ret_type, d.span);

    ExprPtr body = expr(d.body);

    if (d.unit_param) {
      out.param_name = fresh("u");
      out.param_type = Type::boolean();
    } else {
      PatPtr pat = resolve_pat(d.param);
      if (pat->k == PatKind::Bind && pat->ann) {
        out.param_name = pat->name;
        out.param_type = pat->ann;
      } else {
        out.param_type = pattern_type(pat);
        out.param_name = fresh("a");
        auto v = make_expr(ExprKind::Var, pat->span);
        v->name = out.param_name;
        body = lower_let(pat, std::move(v), std::move(body), pat->span);
      }
    }

    // purity scheme: variables are introduced by the parameter only
    std::vector<std::string> pv;
    collect_pvars(out.param_type, pv);
    std::set<std::string> seen;
    for (const auto& v : pv) {
      if (!seen.insert(v).second)
        throw TwistError({in_.file, d.span, errc::purity_unification,
                          "purity variable '" + v +
                              "' introduced more than once in parameter"});
      out.pvars.push_back(v);
    }
    std::vector<std::string> rv;
    collect_pvars(out.ret_type, rv);
    for (const auto& v : rv)
      if (!seen.count(v))
        throw TwistError({in_.file, d.span, errc::purity_unification,
                          "purity variable '" + v +
                              "' not introduced by the parameter"});
    out.body = std::move(body);
    return out;
  }
};

}  // namespace

Program desugar(const Program& p) { return Desugarer(p).run(); }

}  // namespace twist
