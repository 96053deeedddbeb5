#include "twist/parser.hpp"

#include <numeric>

#include "twist/lexer.hpp"

namespace twist {

namespace {

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file)
      : toks_(std::move(toks)), file_(std::move(file)) {}

  Program program() {
    Program p;
    p.file = file_;
    while (!at(Tok::Eof)) {
      if (at(Tok::KwType)) {
        eat(Tok::KwType);
        AliasDecl a;
        a.span = cur().span;
        a.name = eat(Tok::Ident).text;
        eat(Tok::Equal);
        a.type = type();
        p.aliases.push_back(std::move(a));
      } else if (at(Tok::KwFun)) {
        p.decls.push_back(fundecl());
      } else {
        fail("expected 'fun' or 'type' declaration");
      }
    }
    return p;
  }

  TypePtr type() { return arrow_type(); }

 private:
  std::vector<Token> toks_;
  std::string file_;
  size_t i_ = 0;

  const Token& cur() const { return toks_[i_]; }
  const Token& ahead(size_t n = 1) const {
    return toks_[std::min(i_ + n, toks_.size() - 1)];
  }
  bool at(Tok k) const { return cur().k == k; }

  Token eat(Tok k, const char* what = nullptr) {
    if (!at(k)) fail(what ? what : "unexpected token");
    return toks_[i_++];
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = cur();
    std::string shown = t.k == Tok::Eof ? "end of input" : "'" + t.text + "'";
    throw TwistError(
        {file_, t.span, errc::parse, msg + " (found " + shown + ")"});
  }

  // ------------------------------------------------------------ decls

  FunDecl fundecl() {
    FunDecl d;
    d.span = cur().span;
    eat(Tok::KwFun);
    d.name = eat(Tok::Ident, "expected function name").text;
    eat(Tok::LParen, "expected '('");
    if (at(Tok::RParen)) {
      eat(Tok::RParen);
      d.unit_param = true;
    } else {
      d.param = pattern_list(cur().span);
      eat(Tok::RParen, "expected ')' after parameter");
    }
    eat(Tok::Colon, "expected ':' before return type");
    d.ret_type = type();
    eat(Tok::Equal, "expected '=' before function body");
    d.body = expr();
    return d;
  }

  // ------------------------------------------------------------ patterns

  PatPtr pattern_list(Span sp) {
    std::vector<PatPtr> parts;
    parts.push_back(pattern());
    while (at(Tok::Comma)) {
      eat(Tok::Comma);
      parts.push_back(pattern());
    }
    PatPtr p = parts.back();
    for (size_t k = parts.size() - 1; k-- > 0;)
      p = Pattern::pair(parts[k], p, sp);
    return p;
  }

  PatPtr pattern() {
    Span sp = cur().span;
    if (at(Tok::Underscore)) {
      eat(Tok::Underscore);
      TypePtr ann;
      if (at(Tok::Colon)) {
        eat(Tok::Colon);
        ann = type();
      }
      return Pattern::wild(ann, sp);
    }
    if (at(Tok::Ident)) {
      std::string n = eat(Tok::Ident).text;
      TypePtr ann;
      if (at(Tok::Colon)) {
        eat(Tok::Colon);
        ann = type();
      }
      return Pattern::bind(std::move(n), ann, sp);
    }
    if (at(Tok::LParen)) {
      eat(Tok::LParen);
      PatPtr p = pattern_list(sp);
      eat(Tok::RParen, "expected ')' in pattern");
      return p;
    }
    fail("expected pattern");
  }

  // ------------------------------------------------------------ types

  TypePtr arrow_type() {
    TypePtr l = prod_type();
    if (at(Tok::Arrow)) {
      eat(Tok::Arrow);
      return Type::arrow(l, arrow_type());
    }
    return l;
  }

  TypePtr prod_type() {
    TypePtr l = atom_type();
    if (at(Tok::Star)) {
      eat(Tok::Star);
      return Type::prod(l, prod_type());
    }
    return l;
  }

  TypePtr atom_type() {
    if (at(Tok::Ident) && cur().text == "bool") {
      eat(Tok::Ident);
      return Type::boolean();
    }
    if (at(Tok::Ident) && cur().text == "qubit") {
      QShapePtr s = qtype();
      return Type::quantum(s, purity_brackets());
    }
    if (at(Tok::LParen)) {
      // Could be a parenthesized entangled shape followed by <purity>, or a
      // parenthesized type. Try the shape reading first and roll back.
      size_t save = i_;
      try {
        QShapePtr s = qtype();
        return Type::quantum(s, purity_brackets());
      } catch (const TwistError&) {
        i_ = save;
      }
      eat(Tok::LParen);
      TypePtr t = type();
      eat(Tok::RParen, "expected ')' in type");
      return t;
    }
    if (at(Tok::Ident)) {
      std::string n = eat(Tok::Ident).text;
      return Type::alias_ref(std::move(n));
    }
    fail("expected type");
  }

  QShapePtr qtype() {
    QShapePtr s = qtype_atom();
    while (at(Tok::Amp)) {
      eat(Tok::Amp);
      s = QShape::epair(s, qtype_atom());
    }
    return s;
  }

  QShapePtr qtype_atom() {
    if (at(Tok::Ident) && cur().text == "qubit") {
      eat(Tok::Ident);
      return QShape::qubit();
    }
    if (at(Tok::LParen)) {
      eat(Tok::LParen);
      QShapePtr s = qtype();
      eat(Tok::RParen, "expected ')' in qubit shape");
      return s;
    }
    fail("expected qubit shape");
  }

  Purity purity_brackets() {
    eat(Tok::Less, "expected '<' before purity");
    Purity p = purity();
    eat(Tok::Greater, "expected '>' after purity");
    return p;
  }

  Purity purity() {
    if (at(Tok::Quote)) {
      eat(Tok::Quote);
      return Purity::pvar(eat(Tok::Ident, "expected purity variable").text);
    }
    std::string n = eat(Tok::Ident, "expected purity").text;
    if (n == "P" || n == "pure") return Purity::pure();
    if (n == "M") return Purity::mixed();
    fail("unknown purity '" + n + "'");
  }

  // ------------------------------------------------------------ exprs

  bool gate_head() const {
    GateKind g;
    return at(Tok::Ident) && gate_from_name(cur().text, g);
  }

  ExprPtr expr() {
    Span sp = cur().span;
    if (at(Tok::KwLet)) {
      eat(Tok::KwLet);
      PatPtr pat = pattern_list(cur().span);
      eat(Tok::Equal, "expected '=' in let");
      ExprPtr bound = expr();
      eat(Tok::KwIn, "expected 'in'");
      ExprPtr body = expr();
      auto e = make_expr(ExprKind::Let, sp);
      e->pat = std::move(pat);
      e->a = std::move(bound);
      e->b = std::move(body);
      return e;
    }
    if (at(Tok::KwIf)) {
      eat(Tok::KwIf);
      ExprPtr c = expr();
      eat(Tok::KwThen, "expected 'then'");
      ExprPtr t = expr();
      eat(Tok::KwElse, "expected 'else'");
      ExprPtr f = expr();
      auto e = make_expr(ExprKind::If, sp);
      e->a = std::move(c);
      e->b = std::move(t);
      e->c = std::move(f);
      return e;
    }
    if (at(Tok::KwMeasure)) {
      eat(Tok::KwMeasure);
      auto e = make_expr(ExprKind::Measure, sp);
      e->a = atom();
      return e;
    }
    if (at(Tok::KwEntangle) || at(Tok::KwSplit) || at(Tok::KwCast)) {
      ExprKind k = at(Tok::KwEntangle) ? ExprKind::Entangle
                   : at(Tok::KwSplit)  ? ExprKind::Split
                                       : ExprKind::Cast;
      ++i_;
      Purity p = purity_brackets();
      eat(Tok::LParen, "expected '(' after purity operator");
      ExprPtr inner;
      if (k == ExprKind::Entangle) {
        // entangle takes a pair; accept the comma form directly
        inner = tuple_tail(sp);
      } else {
        inner = expr();
      }
      eat(Tok::RParen, "expected ')'");
      auto e = make_expr(k, sp);
      e->pur = p;
      e->a = std::move(inner);
      return e;
    }
    if (gate_head()) {
      GateKind g;
      gate_from_name(cur().text, g);
      eat(Tok::Ident);
      auto e = make_expr(ExprKind::Gate, sp);
      e->gate = g;
      if (at(Tok::Number)) {
        if (g != GateKind::CPHASE)
          fail("phase argument only valid on CPHASE");
        e->phase = rational(eat(Tok::Number).text);
      } else if (g == GateKind::CPHASE) {
        fail("CPHASE requires a phase argument");
      }
      e->a = atom();
      return e;
    }
    // application chain: atom {atom}
    ExprPtr e = atom();
    while (starts_atom()) {
      auto app = make_expr(ExprKind::App, sp);
      app->a = std::move(e);
      app->b = atom();
      e = std::move(app);
    }
    return e;
  }

  bool starts_atom() const {
    switch (cur().k) {
      case Tok::Ident: return true;
      case Tok::KwTrue:
      case Tok::KwFalse:
      case Tok::LParen:
      case Tok::KwQinit: return true;
      default: return false;
    }
  }

  // parses expr {"," expr} after an already-consumed '('
  ExprPtr tuple_tail(Span sp) {
    std::vector<ExprPtr> parts;
    parts.push_back(expr());
    while (at(Tok::Comma)) {
      eat(Tok::Comma);
      parts.push_back(expr());
    }
    ExprPtr e = parts.back();
    for (size_t k = parts.size() - 1; k-- > 0;) {
      auto p = make_expr(ExprKind::Pair, sp);
      p->a = parts[k];
      p->b = std::move(e);
      e = std::move(p);
    }
    return e;
  }

  ExprPtr atom() {
    Span sp = cur().span;
    if (at(Tok::KwQinit)) {
      eat(Tok::KwQinit);
      eat(Tok::LParen, "expected '(' after qinit");
      eat(Tok::RParen, "expected ')' after qinit(");
      return make_expr(ExprKind::QInit, sp);
    }
    if (at(Tok::KwTrue) || at(Tok::KwFalse)) {
      bool v = at(Tok::KwTrue);
      ++i_;
      auto e = make_expr(ExprKind::BoolLit, sp);
      e->bval = v;
      return e;
    }
    if (at(Tok::Ident)) {
      std::string n = eat(Tok::Ident).text;
      auto e = make_expr(ExprKind::Var, sp);
      e->name = std::move(n);
      return e;
    }
    if (at(Tok::LParen)) {
      eat(Tok::LParen);
      if (at(Tok::RParen)) {
        eat(Tok::RParen);
        auto e = make_expr(ExprKind::BoolLit, sp);
        e->bval = true;
        e->unit_sugar = true;
        return e;
      }
      ExprPtr e = tuple_tail(sp);
      eat(Tok::RParen, "expected ')'");
      return e;
    }
    fail("expected expression");
  }

  Rational rational(const std::string& text) {
    auto dot = text.find('.');
    Rational r;
    if (dot == std::string::npos) {
      r.num = std::stoll(text);
      r.den = 1;
    } else {
      std::string whole = text.substr(0, dot);
      std::string frac = text.substr(dot + 1);
      int64_t den = 1;
      for (size_t k = 0; k < frac.size(); ++k) den *= 10;
      r.num = std::stoll(whole) * den + std::stoll(frac);
      r.den = den;
    }
    int64_t g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }
};

}  // namespace

Program parse_program(const std::string& src, const std::string& file) {
  Parser p(lex(src, file), file);
  return p.program();
}

TypePtr parse_type_string(const std::string& src) {
  Parser p(lex(src, "<type>"), "<type>");
  return p.type();
}

}  // namespace twist
