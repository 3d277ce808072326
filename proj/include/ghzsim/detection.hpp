#pragma once

// Detection-loophole simulation: the three messages of a 3-bit protocol are
// replaced by shared uniform guesses, and a party produces an output only if
// every message it would have sent agrees with the corresponding guess.

#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "ghzsim/protocols.hpp"
#include "ghzsim/randomness.hpp"
#include "ghzsim/rng.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

/// Which communication protocol the detection model is derived from.
/// v1tripleprime gives 50% efficiency for every party; the others are
/// asymmetric.
enum class DetectionSeed { protocol1, v1prime, v1doubleprime, v1tripleprime };

inline std::string_view to_string(DetectionSeed s) {
  switch (s) {
    case DetectionSeed::protocol1: return "p1";
    case DetectionSeed::v1prime: return "v1prime";
    case DetectionSeed::v1doubleprime: return "v1doubleprime";
    case DetectionSeed::v1tripleprime: return "v1tripleprime";
  }
  return "?";
}

/// Shared guesses, one per message of the seeding protocol in transcript
/// order. For v1tripleprime: (g_b, g_bc, g_alpha).
struct Guesses {
  std::array<Bit, 3> bits{};
};

inline Guesses sample_guesses(TrialRng& rng) noexcept {
  Guesses g;
  for (auto& b : g.bits) b = rng.bit();
  return g;
}

struct DetectionOutcome {
  std::array<std::optional<Sign>, 3> outputs;  // indexed by party: Alice, Bob, Charlie

  bool detected(PartyId p) const noexcept { return outputs[p.index].has_value(); }
  bool all_detected() const noexcept { return outputs[0] && outputs[1] && outputs[2]; }
};

namespace detail {

inline std::optional<Sign> emit(bool detected, Bit b) {
  return detected ? std::optional<Sign>(to_sign(b)) : std::nullopt;
}

}  // namespace detail

/// One detection-model run. Guesses stand in for received messages whether
/// or not they match, so a non-detection carries no information. Settings
/// are scaled by shared.m. When all three parties detect, the outputs equal
/// the seeding protocol's outputs under the same randomness.
inline DetectionOutcome run_detection(const Settings& settings, const SharedRandomness& s, const Guesses& g,
                                      DetectionSeed seed = DetectionSeed::v1tripleprime) {
  const Settings st = settings.scaled(s.m);
  const auto [g0, g1, g2] = g.bits;
  const BobLocal bob_ = bob_local(st.phi_b, s);
  const CharlieLocal charlie_ = charlie_local(st.phi_c, s.phi_c);
  const Bit tb = bob_.tau_b, tc = charlie_.tau_c;
  DetectionOutcome out;
  switch (seed) {
    case DetectionSeed::protocol1: {
      // B -(tau0, tau_b)-> A, C -tau_c-> A
      out.outputs[alice.index] = detail::emit(true, alice_row(st.phi_a, s, g0)[g1][g2]);
      out.outputs[bob.index] = detail::emit(bob_.tau0 == g0 && tb == g1, bob_.b);
      out.outputs[charlie.index] = detail::emit(tc == g2, charlie_.c);
      break;
    }
    case DetectionSeed::v1prime: {
      // C -tau_c-> B -(tau0, tau_bc)-> A
      out.outputs[charlie.index] = detail::emit(tc == g0, charlie_.c);
      const Bit tau_bc = tb ^ g0;
      out.outputs[bob.index] = detail::emit(bob_.tau0 == g1 && tau_bc == g2, bob_.b ^ (tb & g0));
      out.outputs[alice.index] = detail::emit(true, alice_row(st.phi_a, s, g1)[g2][0]);
      break;
    }
    case DetectionSeed::v1doubleprime: {
      // C -tau_c-> B, B -tau0-> A -tau_a-> B
      out.outputs[charlie.index] = detail::emit(tc == g0, charlie_.c);
      out.outputs[bob.index] = detail::emit(bob_.tau0 == g1, bob_.b ^ (g2 & tb) ^ (g2 & g0) ^ (tb & g0));
      const AliceRow row = alice_row(st.phi_a, s, g1);
      out.outputs[alice.index] = detail::emit((row[0][0] ^ row[1][0]) == g2, row[0][0]);
      break;
    }
    case DetectionSeed::v1tripleprime: {
      // B -tau_b-> C -tau_bc-> A -tau_alpha-> B
      out.outputs[bob.index] = detail::emit(tb == g0, bob_.b ^ (bob_.tau0 & g2));
      out.outputs[charlie.index] = detail::emit((g0 ^ tc) == g1, charlie_.c ^ (g0 & tc));
      const AliceTable a = alice_table(st.phi_a, s);
      out.outputs[alice.index] = detail::emit((a[0][g1][0] ^ a[1][g1][0]) == g2, a[0][g1][0]);
      break;
    }
  }
  return out;
}

}  // namespace ghzsim
