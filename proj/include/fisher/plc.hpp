// Copyright 2026 The Fisherkit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fisher/rational.hpp"

namespace fisher {

struct PlcValidation {
  bool ok = true;
  std::string violation;  // names the first violated invariant when !ok
};

// Checks the representation invariants for a candidate (slopes, breakpoints)
// tuple without constructing a curve:
//   - slope count = breakpoint count + 1,
//   - slopes strictly decreasing with final slope >= 0,
//   - breakpoints strictly increasing and positive.
inline PlcValidation validate_plc(const std::vector<Rat>& slopes,
                                  const std::vector<Rat>& breakpoints) {
  if (slopes.empty() || slopes.size() != breakpoints.size() + 1) {
    return {false, "slope count must equal breakpoint count + 1"};
  }
  for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
    if (!(slopes[i] > slopes[i + 1])) {
      return {false, "slopes not strictly decreasing"};
    }
  }
  if (slopes.back().sign() < 0) {
    return {false, "final slope negative"};
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (i == 0 ? breakpoints[0].sign() <= 0
               : !(breakpoints[i] > breakpoints[i - 1])) {
      return {false, i == 0 ? "breakpoint not positive"
                            : "breakpoints not strictly increasing"};
    }
  }
  return {};
}

struct PlcSegment {
  Rat start;                     // units of good where the segment begins
  std::optional<Rat> length;     // nullopt on the final infinite ray
  Rat slope;                     // utility per unit good
};

struct PlcFlags {
  bool is_zero = false;
  bool strictly_monotone = false;
  bool alpha_bounded = false;
  int segment_count = 0;
};

// A single-good piecewise-linear concave valuation r with r(0) = 0, held as
// strictly decreasing slopes and the strictly increasing breakpoints between
// them. The zero function is the one-slope curve [0]. Instances are
// immutable, so they are safe to share across threads.
class PlcCurve {
 public:
  PlcCurve(std::vector<Rat> slopes, std::vector<Rat> breakpoints)
      : slopes_(std::move(slopes)), breakpoints_(std::move(breakpoints)) {
    PlcValidation v = validate_plc(slopes_, breakpoints_);
    if (!v.ok) throw std::invalid_argument("invalid PLC curve: " + v.violation);
    values_.reserve(breakpoints_.size());
    Rat acc(0), prev(0);
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      acc += slopes_[i] * (breakpoints_[i] - prev);
      prev = breakpoints_[i];
      values_.push_back(acc);  // r(a_{i+1}), cached
    }
  }

  static PlcCurve linear(Rat slope) { return PlcCurve({std::move(slope)}, {}); }
  static const PlcCurve& zero() {
    static const PlcCurve z({Rat(0)}, {});
    return z;
  }
  // Two-segment curve [hi, lo; knee]; degenerates to linear(lo) when the
  // knee is zero (an empty first segment is not representable).
  static PlcCurve two_segment(Rat hi, Rat lo, Rat knee) {
    if (knee.is_zero()) return linear(std::move(lo));
    return PlcCurve({std::move(hi), std::move(lo)}, {std::move(knee)});
  }

  const std::vector<Rat>& slopes() const { return slopes_; }
  const std::vector<Rat>& breakpoints() const { return breakpoints_; }
  int segment_count() const { return static_cast<int>(slopes_.size()); }

  bool is_zero() const { return slopes_.size() == 1 && slopes_[0].is_zero(); }
  bool strictly_monotone() const { return slopes_.back().sign() > 0; }

  Rat evaluate(const Rat& x) const {
    if (x.sign() < 0) throw std::domain_error("PLC evaluated at negative x");
    Rat prev(0), base(0);
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (x <= breakpoints_[i]) {
        return base + slopes_[i] * (x - prev);
      }
      base = values_[i];
      prev = breakpoints_[i];
    }
    return base + slopes_.back() * (x - prev);
  }

  // Contiguous cover of [0, inf); last entry has no length.
  std::vector<PlcSegment> segments() const {
    std::vector<PlcSegment> out;
    out.reserve(slopes_.size());
    Rat prev(0);
    for (std::size_t i = 0; i < slopes_.size(); ++i) {
      PlcSegment seg;
      seg.start = prev;
      seg.slope = slopes_[i];
      if (i < breakpoints_.size()) {
        seg.length = breakpoints_[i] - prev;
        prev = breakpoints_[i];
      }
      out.push_back(std::move(seg));
    }
    return out;
  }

  // alpha-boundedness is only defined against non-zero curves: the zero
  // function reports alpha_bounded = false.
  PlcFlags classify(const Rat& alpha) const {
    if (alpha < Rat(1)) throw std::domain_error("alpha must be >= 1");
    PlcFlags f;
    f.is_zero = is_zero();
    f.strictly_monotone = strictly_monotone();
    f.segment_count = segment_count();
    f.alpha_bounded =
        !f.is_zero && slopes_.front() <= alpha && slopes_.back() >= Rat(1);
    return f;
  }

  // Total units with positive marginal value; nullopt when the final ray
  // still climbs (the curve never satiates).
  std::optional<Rat> satiation_point() const {
    if (strictly_monotone()) return std::nullopt;
    // Final slope is zero; positive slopes stop at the last breakpoint,
    // or immediately for the zero function.
    return breakpoints_.empty() ? Rat(0) : breakpoints_.back();
  }

  friend bool operator==(const PlcCurve& a, const PlcCurve& b) {
    return a.slopes_ == b.slopes_ && a.breakpoints_ == b.breakpoints_;
  }

 private:
  std::vector<Rat> slopes_;
  std::vector<Rat> breakpoints_;
  std::vector<Rat> values_;  // r(a_i) cache, one per breakpoint
};

}  // namespace fisher
