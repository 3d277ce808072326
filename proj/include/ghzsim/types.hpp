#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ghzsim {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double half_pi = 0.5 * std::numbers::pi;

/// A measurement outcome, +1 or -1.
using Sign = int;

/// A classical bit, 0 or 1.
using Bit = std::uint8_t;

/// sign(x) = +1 for x >= 0 and -1 otherwise, applied verbatim at 0.0.
inline Sign sign(double x) noexcept { return x >= 0.0 ? +1 : -1; }

/// (1 - s) / 2: maps +1 to 0 and -1 to 1.
inline Bit to_bit(Sign s) noexcept { return s == +1 ? Bit{0} : Bit{1}; }

inline Sign to_sign(Bit b) noexcept { return b == 0 ? +1 : -1; }

/// Reduces x into [0, 2pi).
inline double reduce_angle(double x) noexcept {
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= two_pi) r = 0.0;
  return r;
}

/// An angle stored reduced to [0, 2pi).
class Angle {
 public:
  constexpr Angle() = default;
  explicit Angle(double radians) noexcept : rad_(reduce_angle(radians)) {}

  /// Angle given in units of pi, e.g. 0.25 for pi/4.
  static Angle from_pi_units(double units) noexcept { return Angle(units * pi); }

  double radians() const noexcept { return rad_; }

  friend Angle operator+(Angle a, Angle b) noexcept { return Angle(a.rad_ + b.rad_); }
  friend Angle operator-(Angle a, Angle b) noexcept { return Angle(a.rad_ - b.rad_); }
  friend Angle operator-(Angle a) noexcept { return Angle(-a.rad_); }
  /// Harmonic scaling, reduced after the multiplication.
  friend Angle operator*(long k, Angle a) noexcept {
    return Angle(static_cast<double>(k) * a.rad_);
  }
  friend bool operator==(Angle, Angle) = default;

 private:
  double rad_ = 0.0;
};

/// Party index. Alice is 0, Bob 1, Charlie 2; the N-party protocol numbers
/// the remaining parties consecutively.
struct PartyId {
  std::uint32_t index = 0;
  friend bool operator==(PartyId, PartyId) = default;
};

inline constexpr PartyId alice{0};
inline constexpr PartyId bob{1};
inline constexpr PartyId charlie{2};

/// Raised when an azimuth is requested for a vector with no planar part.
class DegenerateVector : public std::domain_error {
 public:
  DegenerateVector() : std::domain_error("vector has zero projection onto the equatorial plane") {}
};

}  // namespace ghzsim
