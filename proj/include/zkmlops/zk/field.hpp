#pragma once

#include <cstdint>
#include <ostream>

#include "zkmlops/common/error.hpp"

namespace zkmlops::zk {

// Element of the Mersenne prime field F_p, p = 2^61 - 1.
class Fp {
 public:
  static constexpr std::uint64_t kModulus = (std::uint64_t{1} << 61) - 1;

  constexpr Fp() = default;
  constexpr explicit Fp(std::uint64_t v) : v_(reduce(v)) {}

  // Signed integers embed as v mod p.
  static constexpr Fp from_signed(std::int64_t v) {
    if (v >= 0) return Fp(static_cast<std::uint64_t>(v));
    return -Fp(static_cast<std::uint64_t>(-(v + 1)) + 1);
  }

  constexpr std::uint64_t value() const { return v_; }
  // Centered representative in (-p/2, p/2].
  constexpr std::int64_t to_signed() const {
    return v_ > kModulus / 2 ? -static_cast<std::int64_t>(kModulus - v_)
                             : static_cast<std::int64_t>(v_);
  }
  constexpr bool is_zero() const { return v_ == 0; }

  friend constexpr Fp operator+(Fp a, Fp b) { return from_reduced(sub_if(a.v_ + b.v_)); }
  friend constexpr Fp operator-(Fp a, Fp b) {
    return from_reduced(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + kModulus - b.v_);
  }
  friend constexpr Fp operator-(Fp a) { return from_reduced(a.v_ == 0 ? 0 : kModulus - a.v_); }
  friend constexpr Fp operator*(Fp a, Fp b) {
    unsigned __int128 prod = static_cast<unsigned __int128>(a.v_) * b.v_;
    std::uint64_t lo = static_cast<std::uint64_t>(prod) & kModulus;
    std::uint64_t hi = static_cast<std::uint64_t>(prod >> 61);
    return from_reduced(sub_if(lo + hi));
  }
  Fp& operator+=(Fp o) { return *this = *this + o; }
  Fp& operator-=(Fp o) { return *this = *this - o; }
  Fp& operator*=(Fp o) { return *this = *this * o; }

  friend constexpr bool operator==(Fp a, Fp b) = default;

  constexpr Fp pow(std::uint64_t e) const {
    Fp base = *this, acc(1);
    while (e != 0) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

  // Fermat inverse a^(p-2). Throws ZeroInverse for 0.
  Fp inv() const {
    if (v_ == 0) throw Error(Errc::ZeroInverse, "inverse of zero");
    return pow(kModulus - 2);
  }

 private:
  static constexpr std::uint64_t reduce(std::uint64_t x) {
    x = (x & kModulus) + (x >> 61);
    return sub_if(x);
  }
  static constexpr std::uint64_t sub_if(std::uint64_t x) { return x >= kModulus ? x - kModulus : x; }
  static constexpr Fp from_reduced(std::uint64_t x) {
    Fp f;
    f.v_ = x;
    return f;
  }

  std::uint64_t v_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Fp f) { return os << f.value(); }

inline Fp add(Fp a, Fp b) { return a + b; }
inline Fp sub(Fp a, Fp b) { return a - b; }
inline Fp mul(Fp a, Fp b) { return a * b; }
inline Fp inv(Fp a) { return a.inv(); }
inline Fp pow(Fp a, std::uint64_t e) { return a.pow(e); }

}  // namespace zkmlops::zk
