#include "twist/lexer.hpp"

#include <cctype>
#include <map>

namespace twist {

namespace {

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kw = {
      {"fun", Tok::KwFun},         {"type", Tok::KwType},
      {"let", Tok::KwLet},         {"in", Tok::KwIn},
      {"if", Tok::KwIf},           {"then", Tok::KwThen},
      {"else", Tok::KwElse},       {"true", Tok::KwTrue},
      {"false", Tok::KwFalse},     {"measure", Tok::KwMeasure},
      {"qinit", Tok::KwQinit},     {"entangle", Tok::KwEntangle},
      {"split", Tok::KwSplit},     {"cast", Tok::KwCast}};
  return kw;
}

struct Cursor {
  const std::string& src;
  const std::string& file;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= src.size(); }
  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }
  char advance() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw TwistError({file, {line, col, line, col}, errc::parse, msg});
  }

  void skip_trivia() {
    while (!done()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '(' && peek(1) == '*') {
        int start_line = line, start_col = col;
        advance();
        advance();
        int depth = 1;
        while (depth > 0) {
          if (done())
            throw TwistError({file,
                              {start_line, start_col, line, col},
                              errc::parse,
                              "unterminated comment"});
          if (peek() == '(' && peek(1) == '*') {
            advance();
            advance();
            ++depth;
          } else if (peek() == '*' && peek(1) == ')') {
            advance();
            advance();
            --depth;
          } else {
            advance();
          }
        }
      } else {
        break;
      }
    }
  }
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_part(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> lex(const std::string& src, const std::string& file) {
  Cursor cur{src, file};
  std::vector<Token> out;

  auto push = [&](Tok k, std::string text, int line, int col) {
    out.push_back({k, std::move(text), {line, col, cur.line, cur.col}});
  };

  for (;;) {
    cur.skip_trivia();
    if (cur.done()) {
      push(Tok::Eof, "", cur.line, cur.col);
      return out;
    }
    int line = cur.line, col = cur.col;
    char c = cur.peek();

    if (ident_start(c)) {
      std::string s;
      while (!cur.done() && ident_part(cur.peek())) s += cur.advance();
      if (s == "_") {
        push(Tok::Underscore, s, line, col);
      } else {
        auto it = keywords().find(s);
        push(it == keywords().end() ? Tok::Ident : it->second, s, line, col);
      }
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (!cur.done() &&
             std::isdigit(static_cast<unsigned char>(cur.peek())))
        s += cur.advance();
      if (cur.peek() == '.' &&
          std::isdigit(static_cast<unsigned char>(cur.peek(1)))) {
        s += cur.advance();
        while (!cur.done() &&
               std::isdigit(static_cast<unsigned char>(cur.peek())))
          s += cur.advance();
      }
      push(Tok::Number, s, line, col);
      continue;
    }

    cur.advance();
    switch (c) {
      case '(': push(Tok::LParen, "(", line, col); break;
      case ')': push(Tok::RParen, ")", line, col); break;
      case ',': push(Tok::Comma, ",", line, col); break;
      case ':': push(Tok::Colon, ":", line, col); break;
      case '=': push(Tok::Equal, "=", line, col); break;
      case '<': push(Tok::Less, "<", line, col); break;
      case '>': push(Tok::Greater, ">", line, col); break;
      case '*': push(Tok::Star, "*", line, col); break;
      case '&': push(Tok::Amp, "&", line, col); break;
      case '\'': push(Tok::Quote, "'", line, col); break;
      case '-':
        if (cur.peek() == '>') {
          cur.advance();
          push(Tok::Arrow, "->", line, col);
        } else {
          cur.fail("stray '-'");
        }
        break;
      default:
        cur.fail(std::string("unexpected character '") + c + "'");
    }
  }
}

}  // namespace twist
