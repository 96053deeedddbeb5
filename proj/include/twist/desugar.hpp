#pragma once

#include "twist/ast.hpp"

namespace twist {

// Lowers a surface program to core form:
//  - type aliases resolved everywhere (unknown aliases rejected)
//  - single-binder lets become two-slot lets via a boolean filler
//  - nested let patterns become chains of two-slot lets
//  - measure of a syntactic tuple becomes a tuple of measures
//  - fun parameters become one binder; pattern params move into the body
//  - purity scheme variables are collected; return-type variables must be
//    introduced by the parameter
// Idempotent: desugaring a pretty-printed core program is the identity.
Program desugar(const Program& p);

}  // namespace twist
