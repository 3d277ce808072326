#pragma once

// Shared hidden variables and the samplers that produce them.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ghzsim/coefficients.hpp"
#include "ghzsim/rng.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct UnitVec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  double dot(const UnitVec3& o) const noexcept { return x * o.x + y * o.y + z * o.z; }
  UnitVec3 operator-() const noexcept { return {-x, -y, -z}; }
};

/// Planar norm below which an azimuth is considered undefined.
inline constexpr double degenerate_threshold = 1e-12;

/// Uniform on the sphere: z uniform on [-1, 1], azimuth uniform on [0, 2pi).
inline UnitVec3 sample_unit_sphere(TrialRng& rng) noexcept {
  const double z = rng.uniform(-1.0, 1.0);
  const double t = rng.uniform(0.0, two_pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(t), r * std::sin(t), z};
}

/// Uniform on the half sphere {v : axis . v >= 0}, by reflection.
inline UnitVec3 sample_half_sphere(TrialRng& rng, const UnitVec3& axis) noexcept {
  const UnitVec3 v = sample_unit_sphere(rng);
  return axis.dot(v) >= 0.0 ? v : -v;
}

/// Azimuth of the planar part of (x, y, z), reduced to [0, 2pi).
inline Angle azimuth(double x, double y) {
  if (std::hypot(x, y) < degenerate_threshold) throw DegenerateVector();
  return Angle(std::atan2(y, x));
}

inline Angle azimuth(const UnitVec3& v) { return azimuth(v.x, v.y); }

/// Equatorial unit vector with the given azimuth.
inline UnitVec3 equatorial(double azimuth_rad) noexcept {
  return {std::cos(azimuth_rad), std::sin(azimuth_rad), 0.0};
}

/// Hidden variables of Protocols 1 and 2.
struct SharedRandomness {
  UnitVec3 lambda1;     // shared by Alice and Bob
  UnitVec3 lambda2;     // shared by Alice and Bob
  Bit xi = 0;           // shared by Alice and Bob
  Angle phi_c;          // shared by Alice and Charlie
  std::int64_t m = 1;   // odd harmonic index, 1 for Protocol 1
  std::uint32_t resamples = 0;  // degenerate (lambda1, lambda2) pairs rejected
};

/// True when lambda1 +/- lambda2 both have a usable azimuth, i.e. both
/// tau_0 branches of step 0 are defined.
inline bool both_branches_defined(const UnitVec3& l1, const UnitVec3& l2) noexcept {
  return std::hypot(l1.x + l2.x, l1.y + l2.y) >= degenerate_threshold &&
         std::hypot(l1.x - l2.x, l1.y - l2.y) >= degenerate_threshold;
}

/// Randomness for Protocol 1 (m = 1). A (lambda1, lambda2) pair for which
/// either step-0 branch would be degenerate has probability zero; it is
/// redrawn and counted in `resamples`.
inline SharedRandomness sample_shared(TrialRng& rng) {
  SharedRandomness s;
  do {
    s.lambda1 = sample_unit_sphere(rng);
    s.lambda2 = sample_unit_sphere(rng);
    if (both_branches_defined(s.lambda1, s.lambda2)) break;
    ++s.resamples;
  } while (true);
  s.xi = rng.bit();
  s.phi_c = Angle(rng.uniform(0.0, two_pi));
  return s;
}

/// Randomness for Protocol 2: as Protocol 1 plus a harmonic index M drawn
/// from the mixture table. The draws preceding M are identical to the
/// Protocol-1 sampler on the same stream.
inline SharedRandomness sample_shared(TrialRng& rng, const CoefficientTable& table) {
  SharedRandomness s = sample_shared(rng);
  s.m = table.sample_M(rng);
  return s;
}

/// Randomness for the 2-bit protocol: uniform angles shared A-B and A-C.
struct TwoBitShared {
  Angle phi_b;
  Angle phi_c;
};

inline TwoBitShared sample_two_bit_shared(TrialRng& rng) noexcept {
  TwoBitShared s;
  s.phi_b = Angle(rng.uniform(0.0, two_pi));
  s.phi_c = Angle(rng.uniform(0.0, two_pi));
  return s;
}

/// Randomness for the N-party protocol: one uniform angle per non-Alice
/// party, shared with Alice. `angles[i - 1]` belongs to party i.
struct NPartyShared {
  std::vector<Angle> angles;
};

inline NPartyShared sample_nparty_shared(TrialRng& rng, std::size_t n_parties) {
  NPartyShared s;
  s.angles.reserve(n_parties - 1);
  for (std::size_t i = 1; i < n_parties; ++i) s.angles.emplace_back(rng.uniform(0.0, two_pi));
  return s;
}

}  // namespace ghzsim
