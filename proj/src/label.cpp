#include "satrep/label.hpp"

#include <cmath>
#include <cstdio>

#include "satrep/error.hpp"

namespace satrep {

Label Label::appended(const Label& tail) const {
  Sequence items = is_sequence() ? as_sequence() : Sequence{*this};
  items.push_back(tail);
  return sequence(std::move(items));
}

Label Label::prepended(const Label& head) const {
  Sequence items{head};
  if (is_sequence())
    items.insert(items.end(), as_sequence().begin(), as_sequence().end());
  else
    items.push_back(*this);
  return sequence(std::move(items));
}

Label Label::without_last() const {
  if (!is_sequence() || as_sequence().empty())
    throw Error(ErrorCode::OutOfRange, "without_last on a non-sequence label");
  Sequence items = as_sequence();
  items.pop_back();
  return sequence(std::move(items));
}

std::string Label::to_string() const {
  if (is_int()) return std::to_string(as_int());
  if (is_string()) return as_string();
  if (is_real()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", as_real());
    return buf;
  }
  std::string out = "(";
  const auto& items = as_sequence();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i].to_string();
  }
  return out + ")";
}

bool operator==(const Label& a, const Label& b) {
  if (a.value_.index() != b.value_.index()) return false;
  if (a.is_real()) return std::abs(a.as_real() - b.as_real()) <= Label::real_label_tol;
  if (a.is_sequence()) return a.as_sequence() == b.as_sequence();
  return a.value_ == b.value_;
}

std::size_t find_label(const std::vector<Label>& labels, const Label& l) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == l) return i;
  return labels.size();
}

}  // namespace satrep
