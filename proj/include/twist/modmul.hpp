#pragma once

#include <string>

namespace twist {

// Source text for the controlled modular-multiplication benchmark over an
// n-bit register plus one control qubit. The circuit multiplies by
// a = 2^(n-1) - 1 and then by its inverse b = 2^n - 3 (a * b = 1 mod 2^n - 1),
// each as a controlled negation followed by n - 1 controlled swaps, so a
// correct program leaves the control separable from the register.
// `not_inverse` retargets one controlled swap in the second multiplier,
// making the composition differ from the identity.
// Valid for 3 <= n <= 24.
std::string modmul_source(int n, bool not_inverse = false);

}  // namespace twist
