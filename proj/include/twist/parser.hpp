#pragma once

#include <string>

#include "twist/ast.hpp"

namespace twist {

// Surface program: aliases unresolved, patterns as written, tuples already
// right-nested into pairs. Throws TwistError with code "parse".
Program parse_program(const std::string& src, const std::string& file);

TypePtr parse_type_string(const std::string& src);

}  // namespace twist
