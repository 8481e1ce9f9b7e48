#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace satrep {

/// Outcome label: an integer or string symbol, a real number (spectral
/// atoms), or a finite sequence of labels (outcomes of repeated runs).
///
/// Real labels compare equal within `real_label_tol`; everything else
/// compares exactly. Integers and reals never compare equal to each other.
class Label {
 public:
  using Sequence = std::vector<Label>;

  static constexpr double real_label_tol = 1e-8;

  Label() : value_(std::int64_t{0}) {}
  Label(int v) : value_(std::int64_t{v}) {}  // NOLINT(google-explicit-constructor)
  Label(std::int64_t v) : value_(v) {}       // NOLINT(google-explicit-constructor)
  Label(std::string v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  Label(const char* v) : value_(std::string(v)) {}  // NOLINT(google-explicit-constructor)
  static Label real(double v) {
    Label l;
    l.value_ = v;
    return l;
  }
  static Label sequence(Sequence items) {
    Label l;
    l.value_ = std::move(items);
    return l;
  }

  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_real() const { return std::holds_alternative<double>(value_); }
  bool is_sequence() const { return std::holds_alternative<Sequence>(value_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  double as_real() const { return std::get<double>(value_); }
  const Sequence& as_sequence() const { return std::get<Sequence>(value_); }

  /// Appends to a sequence label; a non-sequence label becomes the first element.
  Label appended(const Label& tail) const;
  Label prepended(const Label& head) const;
  /// Sequence minus its last element.
  Label without_last() const;

  std::string to_string() const;

  friend bool operator==(const Label& a, const Label& b);

 private:
  std::variant<std::int64_t, std::string, double, Sequence> value_;
};

std::size_t find_label(const std::vector<Label>& labels, const Label& l);

}  // namespace satrep
