#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace twist {

using bigint = boost::multiprecision::cpp_int;

// Exact dyadic rational num / 2^exp with 0 <= num <= 2^exp.
// Normalized: num odd or num == 0 (then exp == 0) or num == 2^exp == 1.
// Arithmetic never rounds, so arbitrarily deep halving chains stay exact.
class Dyadic {
 public:
  Dyadic() : num_(0), exp_(0) {}
  Dyadic(bigint num, int64_t exp);

  static Dyadic zero() { return Dyadic(); }
  static Dyadic one() { return Dyadic(1, 0); }
  static Dyadic half() { return Dyadic(1, 1); }

  bool is_zero() const { return num_ == 0; }
  bool is_one() const { return exp_ == 0 && num_ == 1; }

  Dyadic halved() const;
  // Sum modulo 1. Requires both operands in [0, 1].
  Dyadic plus_mod1(const Dyadic& o) const;

  bool operator==(const Dyadic& o) const {
    return num_ == o.num_ && exp_ == o.exp_;
  }
  bool operator!=(const Dyadic& o) const { return !(*this == o); }

  const bigint& num() const { return num_; }
  int64_t exp() const { return exp_; }

  double to_double() const;
  std::string str() const;  // "3/8", "0", "1"

 private:
  void normalize();

  bigint num_;
  int64_t exp_;
};

}  // namespace twist
