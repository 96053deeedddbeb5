#include "twist/history.hpp"

#include <stdexcept>

namespace twist {

History History::split(int64_t j) const {
  if (mixed_) return *this;
  if (terms_.count(j)) throw std::logic_error("history: split symbol reused");
  History r;
  for (const auto& [sym, c] : terms_) r.terms_.emplace(sym, c.halved());
  r.terms_.emplace(j, Dyadic::half());
  return r;
}

History History::combine(const History& a, const History& b) {
  if (a.mixed_ || b.mixed_) return mixed();
  History r = a;
  for (const auto& [sym, c] : b.terms_) {
    auto it = r.terms_.find(sym);
    if (it == r.terms_.end()) {
      r.terms_.emplace(sym, c);
    } else {
      Dyadic s = it->second.plus_mod1(c);
      if (s.is_zero())
        r.terms_.erase(it);
      else
        it->second = s;
    }
  }
  return r;
}

std::string History::str() const {
  if (mixed_) return "M";
  if (terms_.empty()) return "P";
  std::string s;
  for (const auto& [sym, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.str() + " x" + std::to_string(sym);
  }
  return s;
}

}  // namespace twist
