#pragma once

#include "twist/ast.hpp"

namespace twist {

// Elaborates a desugared core program in place:
//  - every expression is stamped with its type; binder slots get annotations
//  - implicit conversions become explicit cast/split/entangle nodes
//  - unused pure binders get implicit discarding measurements; dropping
//    non-pure quantum data is a linearity error
//  - call sites of purity-generic functions record their instantiation
// Idempotent: re-running on an already elaborated program changes nothing.
// Throws TwistError on the first fatal diagnostic.
void typecheck(Program& prog);

}  // namespace twist
