//
// Copyright 2026 The LDP Sampling Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LDP_SAMPLING_EXT_REAL_HPP_
#define LDP_SAMPLING_EXT_REAL_HPP_

#include <charconv>
#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <string>

#include "ldp_sampling/errors.hpp"

namespace ldp {

// A value in (-inf, +inf]. Infinity is an explicit tag, never the result of
// IEEE overflow: constructing a finite ExtReal from a non-finite double is an
// error.
class ExtReal {
 public:
  constexpr ExtReal() = default;

  static ExtReal finite(double v) {
    if (!std::isfinite(v)) {
      throw NumericError("ExtReal::finite given a non-finite value", v);
    }
    return ExtReal(v, false);
  }
  static constexpr ExtReal infinity() { return ExtReal(0.0, true); }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  // Finite payload. Throws for +inf so that callers cannot silently read 0.
  double value() const {
    if (infinite_) throw InvalidArgument("ExtReal::value() on +inf");
    return value_;
  }

  // IEEE view, for serialization and plotting only.
  double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return finite(a.value_ + b.value_);
  }
  ExtReal& operator+=(ExtReal other) { return *this = *this + other; }

  // Scaling by a nonnegative finite weight. 0 * inf = 0 (measure-zero
  // convention); a positive weight preserves +inf.
  friend ExtReal operator*(double w, ExtReal a) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("ExtReal scaling weight must be finite and >= 0");
    }
    if (a.infinite_) return w == 0.0 ? finite(0.0) : infinity();
    return finite(w * a.value_);
  }

  friend bool operator==(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }
  friend bool operator==(ExtReal a, double b) { return a == finite(b); }
  friend std::partial_ordering operator<=>(ExtReal a, double b) {
    return a <=> finite(b);
  }

  // "inf" for +inf, otherwise shortest round-trip decimal.
  std::string to_string() const;

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    return os << a.to_string();
  }

 private:
  constexpr ExtReal(double v, bool inf) : value_(v), infinite_(inf) {}

  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace ldp

inline std::string ldp::ExtReal::to_string() const {
  if (infinite_) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value_);
  return std::string(buf, res.ptr);
}

#endif  // LDP_SAMPLING_EXT_REAL_HPP_
