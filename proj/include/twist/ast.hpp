#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "twist/source.hpp"

namespace twist {

// ---------------------------------------------------------------- purity

enum class PurityKind { P, M, Var };

struct Purity {
  PurityKind k = PurityKind::M;
  std::string var;  // PurityKind::Var only

  static Purity pure() { return {PurityKind::P, {}}; }
  static Purity mixed() { return {PurityKind::M, {}}; }
  static Purity pvar(std::string v) { return {PurityKind::Var, std::move(v)}; }

  bool is_p() const { return k == PurityKind::P; }
  bool is_m() const { return k == PurityKind::M; }
  bool is_var() const { return k == PurityKind::Var; }

  bool operator==(const Purity& o) const {
    return k == o.k && (k != PurityKind::Var || var == o.var);
  }
  bool operator!=(const Purity& o) const { return !(*this == o); }

  std::string str() const {
    switch (k) {
      case PurityKind::P: return "P";
      case PurityKind::M: return "M";
      default: return "'" + var;
    }
  }
};

// ---------------------------------------------------------------- shapes

struct QShape;
using QShapePtr = std::shared_ptr<const QShape>;

// Shape of a quantum type: a qubit leaf or an entangled pair of shapes.
struct QShape {
  QShapePtr l, r;  // both null for the qubit leaf

  bool leaf() const { return !l; }
  static QShapePtr qubit() { return std::make_shared<QShape>(); }
  static QShapePtr epair(QShapePtr a, QShapePtr b) {
    auto s = std::make_shared<QShape>();
    s->l = std::move(a);
    s->r = std::move(b);
    return s;
  }
  int qubits() const { return leaf() ? 1 : l->qubits() + r->qubits(); }
};

bool same_shape(const QShapePtr& a, const QShapePtr& b);
std::string shape_str(const QShapePtr& s);

// ---------------------------------------------------------------- types

enum class TypeKind { Bool, Prod, Arrow, Quantum, Alias };

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  TypeKind k = TypeKind::Bool;
  TypePtr a, b;        // Prod, Arrow
  QShapePtr shape;     // Quantum
  Purity pur;          // Quantum
  std::string alias;   // Alias: unresolved name, removed by desugar

  static TypePtr boolean();
  static TypePtr prod(TypePtr a, TypePtr b);
  static TypePtr arrow(TypePtr a, TypePtr b);
  static TypePtr quantum(QShapePtr s, Purity p);
  static TypePtr alias_ref(std::string name);
};

bool type_equal(const TypePtr& a, const TypePtr& b);
// Classical data is duplicable/droppable: bool, arrows, products of such.
bool is_classical(const TypePtr& t);
bool contains_purity_var(const TypePtr& t);
std::string type_str(const TypePtr& t);

// ---------------------------------------------------------------- gates

enum class GateKind { X, Z, H, CNOT, CZ, SWAP, TOF, FRED, CPHASE };

struct Rational {
  int64_t num = 0;
  int64_t den = 1;
  double value() const { return double(num) / double(den); }
  bool operator==(const Rational& o) const {
    return num * o.den == o.num * den;
  }
};

int gate_qubits(GateKind g);
// Operand shape: qubit, (qubit & qubit), or (qubit & (qubit & qubit)).
QShapePtr gate_shape(GateKind g);
const char* gate_name(GateKind g);
bool gate_from_name(const std::string& s, GateKind& out);

// ---------------------------------------------------------------- patterns

enum class PatKind { Bind, Wild, Pair };

struct Pattern;
using PatPtr = std::shared_ptr<Pattern>;

struct Pattern {
  PatKind k = PatKind::Wild;
  Span span;
  std::string name;  // Bind
  TypePtr ann;       // optional on Bind/Wild
  PatPtr l, r;       // Pair

  static PatPtr bind(std::string n, TypePtr ann, Span sp);
  static PatPtr wild(TypePtr ann, Span sp);
  static PatPtr pair(PatPtr a, PatPtr b, Span sp);
};

// ---------------------------------------------------------------- values

struct QVal;
using QValPtr = std::shared_ptr<const QVal>;

// Runtime quantum value: a tree of qubit references mirroring a QShape.
struct QVal {
  uint32_t name = 0;  // leaf only
  QValPtr l, r;

  bool leaf() const { return !l; }
  static QValPtr qubit(uint32_t n);
  static QValPtr epair(QValPtr a, QValPtr b);
};

void qval_names(const QValPtr& q, std::vector<uint32_t>& out);
QShapePtr qval_shape(const QValPtr& q);

// ---------------------------------------------------------------- exprs

enum class ExprKind {
  Var,
  FunRef,
  App,
  Pair,
  Let,
  If,
  BoolLit,
  QInit,
  Gate,
  Measure,
  Entangle,
  Split,
  Cast,
  QLit,  // runtime-only: quantum value embedded in a configuration
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

using PuritySubst = std::map<std::string, Purity>;

struct Expr {
  ExprKind k = ExprKind::BoolLit;
  Span span;
  int64_t uid = 0;     // unique per node
  int64_t origin = 0;  // stable site id; survives cloning/instantiation

  std::string name;  // Var, FunRef
  ExprPtr a, b, c;   // App(a=fn, b=arg), Pair(a,b), Let(a=bound, b=body),
                     // If(a,b,c); unary forms use a
  PatPtr pat;        // Let
  bool bval = false;        // BoolLit
  bool unit_sugar = false;  // BoolLit written as ()
  GateKind gate = GateKind::X;
  Rational phase;  // CPHASE only
  Purity pur;      // Entangle, Split, Cast, QLit
  QValPtr qval;    // QLit

  // set by the typechecker
  TypePtr type;
  bool synthetic = false;                  // inserted by elaboration
  std::shared_ptr<PuritySubst> inst;       // App of FunRef: scheme instance
};

int64_t fresh_uid();
ExprPtr make_expr(ExprKind k, Span sp);
// Deep copy; fresh uids, origins preserved. Binder names are kept (the tree
// is closed under its own binders, shadowing rules make this safe).
ExprPtr clone_expr(const ExprPtr& e);
// Deep copy with purity variables substituted in ops, annotations and types.
ExprPtr instantiate_expr(const ExprPtr& e, const PuritySubst& subst);
TypePtr instantiate_type(const TypePtr& t, const PuritySubst& subst);

// ---------------------------------------------------------------- programs

struct FunDecl {
  std::string name;
  Span span;
  PatPtr param;        // null after desugar when the decl was `fun f ()`
  std::string param_name;  // single binder after desugar
  TypePtr param_type;  // after desugar: annotation product; bool for ()
  TypePtr ret_type;
  ExprPtr body;
  bool unit_param = false;
  std::vector<std::string> pvars;  // purity scheme variables, in order
};

struct AliasDecl {
  std::string name;
  TypePtr type;
  Span span;
};

struct Program {
  std::string file;
  std::vector<AliasDecl> aliases;
  std::vector<FunDecl> decls;

  const FunDecl* find(const std::string& n) const {
    for (const auto& d : decls)
      if (d.name == n) return &d;
    return nullptr;
  }
};

// Structural equality modulo uids, spans, synthetic flags and binder names.
bool equal_core(const ExprPtr& a, const ExprPtr& b);
bool equal_program(const Program& a, const Program& b);

}  // namespace twist
