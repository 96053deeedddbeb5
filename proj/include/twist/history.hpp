#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "twist/dyadic.hpp"

namespace twist {

// Measurement-history expression: either the absorbing Mixed element or a
// formal sum of split symbols with dyadic coefficients in (0, 1).
// The empty sum is Pure.
class History {
 public:
  History() : mixed_(false) {}  // Pure

  static History pure() { return History(); }
  static History mixed() {
    History h;
    h.mixed_ = true;
    return h;
  }

  bool is_mixed() const { return mixed_; }
  bool is_pure() const { return !mixed_ && terms_.empty(); }

  // Split(f, j) = (1/2) f + (1/2) x_j. Symbol j must be fresh.
  History split(int64_t j) const;
  // Combine(f, g): coefficients add per symbol modulo 1; zero terms drop,
  // so matched halves cancel. Mixed absorbs.
  static History combine(const History& a, const History& b);

  bool operator==(const History& o) const {
    return mixed_ == o.mixed_ && terms_ == o.terms_;
  }
  bool operator!=(const History& o) const { return !(*this == o); }

  const std::map<int64_t, Dyadic>& terms() const { return terms_; }

  std::string str() const;  // "P", "M", or "1/2 x1 + 3/4 x2"

 private:
  bool mixed_;
  std::map<int64_t, Dyadic> terms_;
};

}  // namespace twist
