#include "twist/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace twist {

Dyadic::Dyadic(bigint num, int64_t exp) : num_(std::move(num)), exp_(exp) {
  if (num_ < 0 || exp_ < 0) throw std::invalid_argument("dyadic: negative");
  if (num_ > (bigint(1) << static_cast<unsigned>(exp_)))
    throw std::invalid_argument("dyadic: above one");
  normalize();
}

void Dyadic::normalize() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  while (exp_ > 0 && (num_ & 1) == 0) {
    num_ >>= 1;
    --exp_;
  }
}

Dyadic Dyadic::halved() const {
  if (is_zero()) return *this;
  Dyadic r;
  r.num_ = num_;
  r.exp_ = exp_ + 1;
  return r;
}

Dyadic Dyadic::plus_mod1(const Dyadic& o) const {
  int64_t e = std::max(exp_, o.exp_);
  bigint a = num_ << static_cast<unsigned>(e - exp_);
  bigint b = o.num_ << static_cast<unsigned>(e - o.exp_);
  bigint s = a + b;
  bigint unit = bigint(1) << static_cast<unsigned>(e);
  if (s >= unit) s -= unit;  // operands are <= 1 each, one subtraction suffices
  Dyadic r;
  r.num_ = s;
  r.exp_ = e;
  r.normalize();
  return r;
}

double Dyadic::to_double() const {
  return num_.convert_to<double>() * std::ldexp(1.0, -static_cast<int>(exp_));
}

std::string Dyadic::str() const {
  if (is_zero()) return "0";
  if (is_one()) return "1";
  return num_.str() + "/" + (bigint(1) << static_cast<unsigned>(exp_)).str();
}

}  // namespace twist
