/*
Copyright 2026 The affkms Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cmath>
#include <complex>
#include <compare>
#include <numeric>
#include <stdexcept>
#include <string>

#include "affkms/arith.hpp"

namespace affkms {

using cplx = std::complex<double>;

/// A point num/den of Q/Z, viewed on the circle as exp(2 pi i num/den).
/// Always stored reduced, so den is the order of the point.
class RootOfUnity {
 public:
  RootOfUnity() = default;

  /// The class of p/q in Q/Z for any integer p and positive q.
  RootOfUnity(i64 p, u64 q) {
    if (q == 0) throw std::invalid_argument("RootOfUnity: denominator must be positive");
    u64 r = mod_floor(p, q);
    const u64 g = std::gcd(r, q);
    num_ = r / g;
    den_ = q / g;
    if (num_ == 0) den_ = 1;
  }

  static RootOfUnity identity() { return {}; }

  u64 num() const { return num_; }
  u64 den() const { return den_; }
  u64 order() const { return den_; }

  /// z^k, i.e. k * (num/den) in Q/Z.
  RootOfUnity pow(i64 k) const {
    const auto prod = static_cast<__int128>(k) * static_cast<__int128>(num_);
    __int128 r = prod % static_cast<__int128>(den_);
    if (r < 0) r += den_;
    return RootOfUnity(static_cast<i64>(r), den_);
  }

  RootOfUnity operator+(const RootOfUnity& o) const {
    const u64 l = lcm_checked(den_, o.den_);
    const auto s = static_cast<unsigned __int128>(num_) * (l / den_) + static_cast<unsigned __int128>(o.num_) * (l / o.den_);
    return RootOfUnity(static_cast<i64>(s % l), l);
  }

  /// exp(2 pi i num/den). Quarter turns are exact.
  std::complex<double> value() const { return unit_phase(num_, den_); }

  /// exp(2 pi i r/q) for 0 <= r < q, with exact values at multiples of a quarter turn.
  static std::complex<double> unit_phase(u64 r, u64 q) {
    r %= q;
    if (r == 0) return {1.0, 0.0};
    if (4 * static_cast<unsigned __int128>(r) % q == 0) {
      const u64 quarter = static_cast<u64>(4 * static_cast<unsigned __int128>(r) / q);
      switch (quarter) {
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
      }
    }
    // Map to (-q/2, q/2] so the angle stays small.
    const double x = (2 * r > q) ? -static_cast<double>(q - r) : static_cast<double>(r);
    const double angle = 2.0 * kPi * x / static_cast<double>(q);
    return {std::cos(angle), std::sin(angle)};
  }

  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  friend bool operator==(const RootOfUnity&, const RootOfUnity&) = default;
  /// Ordered by position on [0, 1).
  friend std::strong_ordering operator<=>(const RootOfUnity& a, const RootOfUnity& b) {
    const auto l = static_cast<unsigned __int128>(a.num_) * b.den_;
    const auto r = static_cast<unsigned __int128>(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  u64 num_ = 0;
  u64 den_ = 1;
};

}  // namespace affkms
