#pragma once

#include <string>
#include <vector>

#include "twist/source.hpp"

namespace twist {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  Comma,
  Colon,
  Equal,
  Less,
  Greater,
  Star,
  Arrow,
  Amp,
  Quote,
  Underscore,
  KwFun,
  KwType,
  KwLet,
  KwIn,
  KwIf,
  KwThen,
  KwElse,
  KwTrue,
  KwFalse,
  KwMeasure,
  KwQinit,
  KwEntangle,
  KwSplit,
  KwCast,
  Eof,
};

struct Token {
  Tok k = Tok::Eof;
  std::string text;
  Span span;
};

// Whitespace and nested (* ... *) comments are skipped.
std::vector<Token> lex(const std::string& src, const std::string& file);

}  // namespace twist
