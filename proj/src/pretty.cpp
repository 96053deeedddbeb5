#include "twist/pretty.hpp"

#include <stdexcept>

namespace twist {

namespace {

std::string phase_str(const Rational& r) {
  // phases parse from decimal literals, so the denominator divides a power
  // of ten; render back as a decimal
  int64_t den = r.den;
  int64_t scale = 1;
  int digits = 0;
  while (scale % den != 0) {
    scale *= 10;
    ++digits;
    if (digits > 18) throw std::logic_error("phase not decimal-representable");
  }
  int64_t scaled = r.num * (scale / den);
  std::string whole = std::to_string(scaled / scale);
  if (digits == 0) return whole;
  std::string frac = std::to_string(scaled % scale);
  frac.insert(frac.begin(), digits - static_cast<int>(frac.size()), '0');
  return whole + "." + frac;
}

std::string pat_str(const PatPtr& p) {
  switch (p->k) {
    case PatKind::Bind:
      return p->ann ? p->name + " : " + type_str(p->ann) : p->name;
    case PatKind::Wild: return p->ann ? "_ : " + type_str(p->ann) : "_";
    case PatKind::Pair:
      return "(" + pat_str(p->l) + ", " + pat_str(p->r) + ")";
  }
  return "_";
}

bool is_unit_sugar(const ExprPtr& e) {
  return e->k == ExprKind::BoolLit && e->unit_sugar;
}

// let (x, _) = (e, true) with an unannotated wildcard prints as let x = e
bool is_single_let(const ExprPtr& e) {
  return e->k == ExprKind::Let && e->pat->r->k == PatKind::Wild &&
         !e->pat->r->ann && e->pat->l->k != PatKind::Pair &&
         e->a->k == ExprKind::Pair && e->a->b->k == ExprKind::BoolLit &&
         e->a->b->bval && !e->a->b->unit_sugar;
}

std::string expr_str(const ExprPtr& e);

std::string atom_str(const ExprPtr& e) {
  switch (e->k) {
    case ExprKind::Var:
    case ExprKind::FunRef: return e->name;
    case ExprKind::BoolLit:
      if (e->unit_sugar) return "()";
      return e->bval ? "true" : "false";
    case ExprKind::QInit: return "qinit ()";
    case ExprKind::Pair: return "(" + expr_str(e) + ")";
    default: return "(" + expr_str(e) + ")";
  }
}

std::string expr_str(const ExprPtr& e) {
  switch (e->k) {
    case ExprKind::Let: {
      if (is_single_let(e)) {
        return "let " + pat_str(e->pat->l) + " = " + expr_str(e->a->a) +
               " in\n" + expr_str(e->b);
      }
      return "let " + pat_str(e->pat) + " = " + expr_str(e->a) + " in\n" +
             expr_str(e->b);
    }
    case ExprKind::If:
      return "if " + expr_str(e->a) + " then " + expr_str(e->b) + " else " +
             expr_str(e->c);
    case ExprKind::Measure: return "measure " + atom_str(e->a);
    case ExprKind::Entangle:
      if (e->a->k == ExprKind::Pair)
        return "entangle<" + e->pur.str() + ">(" + expr_str(e->a->a) + ", " +
               expr_str(e->a->b) + ")";
      return "entangle<" + e->pur.str() + ">(" + expr_str(e->a) + ")";
    case ExprKind::Split:
      return "split<" + e->pur.str() + ">(" + expr_str(e->a) + ")";
    case ExprKind::Cast:
      return "cast<" + e->pur.str() + ">(" + expr_str(e->a) + ")";
    case ExprKind::Gate: {
      std::string head = gate_name(e->gate);
      if (e->gate == GateKind::CPHASE) head += " " + phase_str(e->phase);
      return head + " " + atom_str(e->a);
    }
    case ExprKind::App: {
      std::string lhs = e->a->k == ExprKind::App || e->a->k == ExprKind::Var ||
                                e->a->k == ExprKind::FunRef
                            ? expr_str(e->a)
                            : atom_str(e->a);
      if (is_unit_sugar(e->b)) return lhs + " ()";
      return lhs + " " + atom_str(e->b);
    }
    case ExprKind::Pair:
      return "(" + expr_str(e->a) + ", " + expr_str(e->b) + ")";
    case ExprKind::Var:
    case ExprKind::FunRef:
    case ExprKind::BoolLit:
    case ExprKind::QInit: return atom_str(e);
    case ExprKind::QLit: {
      std::vector<uint32_t> ns;
      qval_names(e->qval, ns);
      std::string s = "<qval";
      for (uint32_t n : ns) s += " " + std::to_string(n);
      return s + ">";
    }
  }
  return "?";
}

}  // namespace

std::string pretty_expr(const ExprPtr& e) { return expr_str(e); }

std::string pretty_program(const Program& p) {
  std::string out;
  for (const auto& d : p.decls) {
    if (!out.empty()) out += "\n";
    out += "fun " + d.name + " ";
    if (d.unit_param)
      out += "()";
    else
      out += "(" + d.param_name + " : " + type_str(d.param_type) + ")";
    out += " : " + type_str(d.ret_type) + " =\n";
    out += expr_str(d.body);
    out += "\n";
  }
  return out;
}

}  // namespace twist
