#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace twist {

// Half-open source range; lines and columns are 1-based.
struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;
};

struct Diagnostic {
  std::string file;
  Span span;
  std::string code;
  std::string message;

  std::string str() const {
    return file + ":" + std::to_string(span.line) + ":" +
           std::to_string(span.col) + ": error[" + code + "]: " + message;
  }
};

// Thrown by every pipeline stage; carries the first fatal diagnostic.
class TwistError : public std::runtime_error {
 public:
  TwistError(Diagnostic d) : std::runtime_error(d.str()), diag(std::move(d)) {}
  Diagnostic diag;
};

namespace errc {
inline constexpr const char* parse = "parse";
inline constexpr const char* unknown_alias = "unknown-alias";
inline constexpr const char* duplicate_decl = "duplicate-decl";
inline constexpr const char* no_main = "no-main";
inline constexpr const char* linearity = "linearity";
inline constexpr const char* branch_mismatch = "branch-mismatch";
inline constexpr const char* arity = "arity";
inline constexpr const char* purity_mismatch = "purity-mismatch";
inline constexpr const char* unknown_variable = "unknown-variable";
inline constexpr const char* no_conversion = "no-conversion";
inline constexpr const char* purity_unification = "purity-unification";
inline constexpr const char* cast_not_pure = "cast-not-pure";
inline constexpr const char* mixed_leak = "mixed-leak";
inline constexpr const char* split_abort = "split-abort";
inline constexpr const char* cast_abort = "cast-abort";
inline constexpr const char* branch_explosion = "branch-explosion";
inline constexpr const char* capacity = "capacity";
}  // namespace errc

}  // namespace twist
