#include "twist/modmul.hpp"

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace twist {

namespace {

const char* kWords[] = {
    "two",       "three",      "four",        "five",       "six",
    "seven",     "eight",      "nine",        "ten",        "eleven",
    "twelve",    "thirteen",   "fourteen",    "fifteen",    "sixteen",
    "seventeen", "eighteen",   "nineteen",    "twenty",     "twentyone",
    "twentytwo", "twentythree", "twentyfour", "twentyfive"};

std::string word(int k) {
  assert(k >= 2 && k <= 25);
  return kWords[k - 2];
}

// Left-nested entangled shape over k qubits.
std::string reg_shape(int k) {
  std::string s = "qubit";
  for (int i = 1; i < k; ++i) s = "(" + s + " & qubit)";
  return s;
}

// Left-nested annotated pattern (q1 : qubit<M>), ..., (qk : qubit<M>).
std::string reg_pattern(int k) {
  std::string s = "q1 : qubit<M>";
  for (int i = 2; i <= k; ++i) s = "(" + s + ", q" + std::to_string(i) + " : qubit<M>)";
  return s;
}

// Left-nested tuple (((q1, q2), q3), ..., qk).
std::string reg_tuple(int k) {
  std::string s = "q1";
  for (int i = 2; i <= k; ++i) s = "(" + s + ", q" + std::to_string(i) + ")";
  return s;
}

// One controlled multiplier: negate every bit, then permute with controlled
// swaps. `swaps` lists (i, j) Fredkin targets in application order.
std::string multiplier(int n, int64_t value, const std::string& head_comment,
                       const std::vector<std::pair<int, int>>& swaps,
                       int wrong_index) {
  std::string cq5 = word(n + 1);
  std::string src;
  src += head_comment;
  src += "fun mult" + std::to_string(value) + " (cqs : " + cq5 + ") : " +
         cq5 + " =\n";
  src += "  let (c : qubit<M>, qs : " + word(n) + "_m) = cqs in\n";
  src += "  let " + reg_pattern(n) + " = qs in\n";
  for (int i = 1; i <= n; ++i)
    src += "  let (c : qubit<M>, q" + std::to_string(i) +
           " : qubit<M>) = CNOT (c, q" + std::to_string(i) + ") in\n";
  for (size_t k = 0; k < swaps.size(); ++k) {
    std::string a = "q" + std::to_string(swaps[k].first);
    std::string b = "q" + std::to_string(swaps[k].second);
    src += "  let (c : qubit<M>, (" + a + " : qubit<M>, " + b +
           " : qubit<M>)) = FRED (c, (" + a + ", " + b + ")) in";
    if (static_cast<int>(k) == wrong_index) src += " (* WRONG *)";
    src += "\n";
  }
  src += "  let res : " + cq5 + " = (c, " + reg_tuple(n) + ") in\n";
  src += "  res\n";
  return src;
}

}  // namespace

std::string modmul_source(int n, bool not_inverse) {
  assert(n >= 3 && n <= 24);
  const int64_t modulus = (int64_t{1} << n) - 1;
  const int64_t a = (int64_t{1} << (n - 1)) - 1;  // negate + rotate right
  const int64_t b = (int64_t{1} << n) - 3;        // negate + rotate left
  const std::string cq5 = word(n + 1);
  const std::string reg = word(n);

  // a: adjacent swaps descending, then the wrap-around swap.
  std::vector<std::pair<int, int>> sa;
  for (int i = n - 2; i >= 1; --i) sa.emplace_back(i, i + 1);
  sa.emplace_back(1, n);
  // b: the exact reverse, undoing a.
  std::vector<std::pair<int, int>> sb(sa.rbegin(), sa.rend());
  int wrong = -1;
  if (not_inverse) {
    sb[1] = {1, 3};
    wrong = 1;
  }

  std::string src;
  src += "type " + cq5 + " = (qubit & " + reg_shape(n) + ")<P>\n";
  src += "type " + reg + "_m = " + reg_shape(n) + "<M>\n";
  src += "type " + reg + "_p = " + reg_shape(n) + "<P>\n";
  src += "\n";
  src += multiplier(n, a,
                    "(* controlled multiply by " + std::to_string(a) +
                        " mod " + std::to_string(modulus) + ",\n * using "
                        "negation followed by " + word(n - 1) +
                        " controlled swaps *)\n",
                    sa, -1);
  src += "\n";
  src += multiplier(n, b,
                    "(* controlled multiply by " + std::to_string(b) +
                        " mod " + std::to_string(modulus) + " *)\n",
                    sb, wrong);
  src += "\n";
  src += "fun z () : qubit<P> = qinit ()\n";
  src += "fun o () : qubit<P> = H (qinit ())\n";
  src += "fun main () : (qubit<P> * " + reg + "_p) =\n";
  src += "  let c = o () in\n";

  const int64_t value = (int64_t{1} << (n - 1)) + 1;
  std::string bits = "1";
  for (int i = 0; i < n - 2; ++i) bits += "0";
  bits += "1";
  src += "  (* 0b" + bits + " = " + std::to_string(value) + " *)\n";
  std::string num = "o ()";
  for (int i = 2; i <= n; ++i)
    num = "(" + num + (i == n ? ", o ())" : ", z ())");
  src += "  let num : " + reg + "_p = " + num + " in\n";
  if (not_inverse)
    src += "  (* Dynamic separability check failure: argument entangled *)\n";
  src += "  let (c : qubit<P>, rest : " + reg + "_p) = mult" +
         std::to_string(b) + " (mult" + std::to_string(a) +
         " (entangle<P>(c, num))) in\n";
  if (!not_inverse) src += "  (* restored to 0b" + bits + " *)\n";
  src += "  (c, rest)\n";
  return src;
}

}  // namespace twist
