#pragma once

#include <string>

#include "twist/ast.hpp"

namespace twist {

// Renders a core program back to concrete syntax. The output re-parses and
// re-desugars to a core program equal to the input (modulo binder names).
std::string pretty_program(const Program& p);
std::string pretty_expr(const ExprPtr& e);

}  // namespace twist
