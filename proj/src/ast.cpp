#include "twist/ast.hpp"

#include <atomic>

namespace twist {

// ---------------------------------------------------------------- shapes

bool same_shape(const QShapePtr& a, const QShapePtr& b) {
  if (a->leaf() || b->leaf()) return a->leaf() && b->leaf();
  return same_shape(a->l, b->l) && same_shape(a->r, b->r);
}

std::string shape_str(const QShapePtr& s) {
  if (s->leaf()) return "qubit";
  return "(" + shape_str(s->l) + " & " + shape_str(s->r) + ")";
}

// ---------------------------------------------------------------- types

TypePtr Type::boolean() {
  auto t = std::make_shared<Type>();
  t->k = TypeKind::Bool;
  return t;
}

TypePtr Type::prod(TypePtr a, TypePtr b) {
  auto t = std::make_shared<Type>();
  t->k = TypeKind::Prod;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

TypePtr Type::arrow(TypePtr a, TypePtr b) {
  auto t = std::make_shared<Type>();
  t->k = TypeKind::Arrow;
  t->a = std::move(a);
  t->b = std::move(b);
  return t;
}

TypePtr Type::quantum(QShapePtr s, Purity p) {
  auto t = std::make_shared<Type>();
  t->k = TypeKind::Quantum;
  t->shape = std::move(s);
  t->pur = std::move(p);
  return t;
}

TypePtr Type::alias_ref(std::string name) {
  auto t = std::make_shared<Type>();
  t->k = TypeKind::Alias;
  t->alias = std::move(name);
  return t;
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a->k != b->k) return false;
  switch (a->k) {
    case TypeKind::Bool: return true;
    case TypeKind::Prod:
    case TypeKind::Arrow:
      return type_equal(a->a, b->a) && type_equal(a->b, b->b);
    case TypeKind::Quantum:
      return same_shape(a->shape, b->shape) && a->pur == b->pur;
    case TypeKind::Alias: return a->alias == b->alias;
  }
  return false;
}

bool is_classical(const TypePtr& t) {
  switch (t->k) {
    case TypeKind::Bool: return true;
    case TypeKind::Arrow: return true;
    case TypeKind::Prod: return is_classical(t->a) && is_classical(t->b);
    default: return false;
  }
}

bool contains_purity_var(const TypePtr& t) {
  switch (t->k) {
    case TypeKind::Prod:
    case TypeKind::Arrow:
      return contains_purity_var(t->a) || contains_purity_var(t->b);
    case TypeKind::Quantum: return t->pur.is_var();
    default: return false;
  }
}

std::string type_str(const TypePtr& t) {
  switch (t->k) {
    case TypeKind::Bool: return "bool";
    case TypeKind::Prod: {
      std::string l = type_str(t->a);
      if (t->a->k == TypeKind::Prod || t->a->k == TypeKind::Arrow)
        l = "(" + l + ")";
      std::string r = type_str(t->b);
      if (t->b->k == TypeKind::Prod || t->b->k == TypeKind::Arrow)
        r = "(" + r + ")";
      return l + " * " + r;
    }
    case TypeKind::Arrow: {
      std::string l = type_str(t->a);
      if (t->a->k == TypeKind::Arrow || t->a->k == TypeKind::Prod)
        l = "(" + l + ")";
      return l + " -> " + type_str(t->b);
    }
    case TypeKind::Quantum: {
      std::string s = shape_str(t->shape);
      return s + "<" + t->pur.str() + ">";
    }
    case TypeKind::Alias: return t->alias;
  }
  return "?";
}

// ---------------------------------------------------------------- gates

int gate_qubits(GateKind g) {
  switch (g) {
    case GateKind::X:
    case GateKind::Z:
    case GateKind::H: return 1;
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP:
    case GateKind::CPHASE: return 2;
    case GateKind::TOF:
    case GateKind::FRED: return 3;
  }
  return 0;
}

QShapePtr gate_shape(GateKind g) {
  switch (gate_qubits(g)) {
    case 1: return QShape::qubit();
    case 2: return QShape::epair(QShape::qubit(), QShape::qubit());
    default:
      return QShape::epair(QShape::qubit(),
                           QShape::epair(QShape::qubit(), QShape::qubit()));
  }
}

const char* gate_name(GateKind g) {
  switch (g) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::TOF: return "TOF";
    case GateKind::FRED: return "FRED";
    case GateKind::CPHASE: return "CPHASE";
  }
  return "?";
}

bool gate_from_name(const std::string& s, GateKind& out) {
  static const std::map<std::string, GateKind> table = {
      {"X", GateKind::X},       {"Z", GateKind::Z},
      {"H", GateKind::H},       {"CNOT", GateKind::CNOT},
      {"CZ", GateKind::CZ},     {"SWAP", GateKind::SWAP},
      {"TOF", GateKind::TOF},   {"FRED", GateKind::FRED},
      {"CPHASE", GateKind::CPHASE}};
  auto it = table.find(s);
  if (it == table.end()) return false;
  out = it->second;
  return true;
}

// ---------------------------------------------------------------- patterns

PatPtr Pattern::bind(std::string n, TypePtr ann, Span sp) {
  auto p = std::make_shared<Pattern>();
  p->k = PatKind::Bind;
  p->name = std::move(n);
  p->ann = std::move(ann);
  p->span = sp;
  return p;
}

PatPtr Pattern::wild(TypePtr ann, Span sp) {
  auto p = std::make_shared<Pattern>();
  p->k = PatKind::Wild;
  p->ann = std::move(ann);
  p->span = sp;
  return p;
}

PatPtr Pattern::pair(PatPtr a, PatPtr b, Span sp) {
  auto p = std::make_shared<Pattern>();
  p->k = PatKind::Pair;
  p->l = std::move(a);
  p->r = std::move(b);
  p->span = sp;
  return p;
}

// ---------------------------------------------------------------- values

QValPtr QVal::qubit(uint32_t n) {
  auto q = std::make_shared<QVal>();
  q->name = n;
  return q;
}

QValPtr QVal::epair(QValPtr a, QValPtr b) {
  auto q = std::make_shared<QVal>();
  q->l = std::move(a);
  q->r = std::move(b);
  return q;
}

void qval_names(const QValPtr& q, std::vector<uint32_t>& out) {
  if (q->leaf()) {
    out.push_back(q->name);
    return;
  }
  qval_names(q->l, out);
  qval_names(q->r, out);
}

QShapePtr qval_shape(const QValPtr& q) {
  if (q->leaf()) return QShape::qubit();
  return QShape::epair(qval_shape(q->l), qval_shape(q->r));
}

// ---------------------------------------------------------------- exprs

int64_t fresh_uid() {
  static std::atomic<int64_t> next{1};
  return next.fetch_add(1);
}

ExprPtr make_expr(ExprKind k, Span sp) {
  auto e = std::make_shared<Expr>();
  e->k = k;
  e->span = sp;
  e->uid = fresh_uid();
  e->origin = e->uid;
  return e;
}

static PatPtr clone_pattern(const PatPtr& p) {
  if (!p) return nullptr;
  auto q = std::make_shared<Pattern>(*p);
  q->l = clone_pattern(p->l);
  q->r = clone_pattern(p->r);
  return q;
}

ExprPtr clone_expr(const ExprPtr& e) {
  if (!e) return nullptr;
  auto c = std::make_shared<Expr>(*e);
  c->uid = fresh_uid();
  c->a = clone_expr(e->a);
  c->b = clone_expr(e->b);
  c->c = clone_expr(e->c);
  c->pat = clone_pattern(e->pat);
  return c;
}

TypePtr instantiate_type(const TypePtr& t, const PuritySubst& subst) {
  if (!t) return t;
  switch (t->k) {
    case TypeKind::Prod:
      return Type::prod(instantiate_type(t->a, subst),
                        instantiate_type(t->b, subst));
    case TypeKind::Arrow:
      return Type::arrow(instantiate_type(t->a, subst),
                         instantiate_type(t->b, subst));
    case TypeKind::Quantum: {
      if (t->pur.is_var()) {
        auto it = subst.find(t->pur.var);
        if (it != subst.end()) return Type::quantum(t->shape, it->second);
      }
      return t;
    }
    default: return t;
  }
}

static Purity subst_purity(const Purity& p, const PuritySubst& subst) {
  if (p.is_var()) {
    auto it = subst.find(p.var);
    if (it != subst.end()) return it->second;
  }
  return p;
}

static PatPtr instantiate_pattern(const PatPtr& p, const PuritySubst& subst) {
  if (!p) return nullptr;
  auto q = std::make_shared<Pattern>(*p);
  q->ann = instantiate_type(p->ann, subst);
  q->l = instantiate_pattern(p->l, subst);
  q->r = instantiate_pattern(p->r, subst);
  return q;
}

ExprPtr instantiate_expr(const ExprPtr& e, const PuritySubst& subst) {
  if (!e) return nullptr;
  auto c = std::make_shared<Expr>(*e);
  c->uid = fresh_uid();
  c->a = instantiate_expr(e->a, subst);
  c->b = instantiate_expr(e->b, subst);
  c->c = instantiate_expr(e->c, subst);
  c->pat = instantiate_pattern(e->pat, subst);
  c->pur = subst_purity(e->pur, subst);
  c->type = instantiate_type(e->type, subst);
  if (e->inst) {
    auto ni = std::make_shared<PuritySubst>();
    for (const auto& [v, p] : *e->inst) (*ni)[v] = subst_purity(p, subst);
    c->inst = std::move(ni);
  }
  return c;
}

// ---------------------------------------------------------------- equality

namespace {

struct AlphaEnv {
  std::map<std::string, std::string> l2r;

  bool vars_match(const std::string& a, const std::string& b) const {
    auto it = l2r.find(a);
    if (it != l2r.end()) return it->second == b;
    return a == b;  // free variables must agree literally
  }
};

bool pat_equal(const PatPtr& a, const PatPtr& b, AlphaEnv& env) {
  if (!a || !b) return !a && !b;
  if (a->k != b->k) return false;
  if ((a->ann != nullptr) != (b->ann != nullptr)) return false;
  if (a->ann && !type_equal(a->ann, b->ann)) return false;
  switch (a->k) {
    case PatKind::Bind:
      env.l2r[a->name] = b->name;
      return true;
    case PatKind::Wild: return true;
    case PatKind::Pair:
      return pat_equal(a->l, b->l, env) && pat_equal(a->r, b->r, env);
  }
  return false;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b, AlphaEnv env) {
  if (!a || !b) return !a && !b;
  if (a->k != b->k) return false;
  switch (a->k) {
    case ExprKind::Var: return env.vars_match(a->name, b->name);
    case ExprKind::FunRef: return a->name == b->name;
    case ExprKind::BoolLit:
      return a->bval == b->bval && a->unit_sugar == b->unit_sugar;
    case ExprKind::QInit: return true;
    case ExprKind::Gate:
      if (a->gate != b->gate || !(a->phase == b->phase)) return false;
      return expr_equal(a->a, b->a, env);
    case ExprKind::Entangle:
    case ExprKind::Split:
    case ExprKind::Cast:
      if (a->pur != b->pur) return false;
      return expr_equal(a->a, b->a, env);
    case ExprKind::Measure: return expr_equal(a->a, b->a, env);
    case ExprKind::App:
    case ExprKind::Pair:
      return expr_equal(a->a, b->a, env) && expr_equal(a->b, b->b, env);
    case ExprKind::If:
      return expr_equal(a->a, b->a, env) && expr_equal(a->b, b->b, env) &&
             expr_equal(a->c, b->c, env);
    case ExprKind::Let: {
      if (!expr_equal(a->a, b->a, env)) return false;
      AlphaEnv inner = env;
      if (!pat_equal(a->pat, b->pat, inner)) return false;
      return expr_equal(a->b, b->b, inner);
    }
    case ExprKind::QLit: {
      std::vector<uint32_t> na, nb;
      qval_names(a->qval, na);
      qval_names(b->qval, nb);
      return a->pur == b->pur && na == nb &&
             same_shape(qval_shape(a->qval), qval_shape(b->qval));
    }
  }
  return false;
}

}  // namespace

bool equal_core(const ExprPtr& a, const ExprPtr& b) {
  return expr_equal(a, b, AlphaEnv{});
}

bool equal_program(const Program& a, const Program& b) {
  if (a.decls.size() != b.decls.size()) return false;
  for (size_t i = 0; i < a.decls.size(); ++i) {
    const FunDecl& da = a.decls[i];
    const FunDecl& db = b.decls[i];
    if (da.name != db.name) return false;
    if (da.param_name.empty() != db.param_name.empty()) return false;
    if ((da.param_type != nullptr) != (db.param_type != nullptr)) return false;
    if (da.param_type && !type_equal(da.param_type, db.param_type))
      return false;
    if (!type_equal(da.ret_type, db.ret_type)) return false;
    AlphaEnv env;
    if (!da.param_name.empty()) env.l2r[da.param_name] = db.param_name;
    if (!expr_equal(da.body, db.body, env)) return false;
  }
  return true;
}

}  // namespace twist
