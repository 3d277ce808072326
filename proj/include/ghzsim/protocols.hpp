#pragma once

// Party state machines for the bounded-communication GHZ protocols.
//
// Every runner is a pure function of (settings, shared randomness) and
// returns the three outputs together with the bits that were exchanged.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ghzsim/coefficients.hpp"
#include "ghzsim/randomness.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

enum class MessageTag : std::uint8_t { tau0, tau_b, tau_c, tau_bc, tau_a, tau_alpha, sector };

/// One classical message: `width` bits packed little-endian into `value`.
struct Message {
  PartyId from;
  PartyId to;
  MessageTag tag = MessageTag::tau0;
  std::uint8_t width = 1;
  std::uint32_t value = 0;

  Bit bit(std::size_t i) const noexcept { return static_cast<Bit>((value >> i) & 1U); }
  friend bool operator==(const Message&, const Message&) = default;
};

inline Message one_bit(PartyId from, PartyId to, MessageTag tag, Bit b) { return {from, to, tag, 1, b}; }

using Transcript = std::vector<Message>;

inline std::size_t total_bits(const Transcript& t) noexcept {
  std::size_t n = 0;
  for (const auto& m : t) n += m.width;
  return n;
}

inline std::size_t bits_on_link(const Transcript& t, PartyId from, PartyId to) noexcept {
  std::size_t n = 0;
  for (const auto& m : t)
    if (m.from == from && m.to == to) n += m.width;
  return n;
}

/// Measurement settings of Alice, Bob and Charlie.
struct Settings {
  Angle phi_a;
  Angle phi_b;
  Angle phi_c;

  /// Settings multiplied by the harmonic index m, each reduced mod 2pi.
  Settings scaled(std::int64_t m) const noexcept { return {m * phi_a, m * phi_b, m * phi_c}; }
  double sum() const noexcept { return phi_a.radians() + phi_b.radians() + phi_c.radians(); }
};

struct RunOutcome {
  Sign alpha = +1;
  Sign beta = +1;
  Sign gamma = +1;
  Transcript transcript;

  Sign product() const noexcept { return alpha * beta * gamma; }
  std::array<Sign, 3> outputs() const noexcept { return {alpha, beta, gamma}; }
};

// ---------------------------------------------------------------------------
// Step 0 and the local computations

/// phi_b of step 0 for a given tau_0 branch:
/// azimuth(lambda1 + (-1)^tau0 lambda2) / 2 + xi pi.
inline Angle step0_phi_b(const UnitVec3& l1, const UnitVec3& l2, Bit xi, Bit tau0) {
  const double s = tau0 == 0 ? 1.0 : -1.0;
  const Angle phi0 = azimuth(l1.x + s * l2.x, l1.y + s * l2.y);
  return Angle(0.5 * phi0.radians() + (xi ? pi : 0.0));
}

struct Step0Result {
  Bit tau0 = 0;
  Angle phi_b;
};

/// Bob's step 0. b is the equatorial vector at azimuth pi/2 - 2 phi_B;
/// tau0 = (1 - sign(b.l1) sign(b.l2)) / 2.
inline Step0Result step0(const UnitVec3& l1, const UnitVec3& l2, Bit xi, Angle phi_B) {
  const UnitVec3 b = equatorial(half_pi - 2.0 * phi_B.radians());
  const Sign sigma0 = sign(b.dot(l1)) * sign(b.dot(l2));
  Step0Result r;
  r.tau0 = to_bit(sigma0);
  r.phi_b = step0_phi_b(l1, l2, xi, r.tau0);
  return r;
}

/// Quadrant bit tau = (1 - sign(sin 2 phi)) / 2 and output sign(sin phi)
/// for Bob or Charlie.
struct LocalAnswer {
  Bit tau = 0;
  Sign output = +1;
};

inline LocalAnswer local_answer(Angle phi_tilde) noexcept {
  const double x = phi_tilde.radians();
  return {to_bit(sign(std::sin(2.0 * x))), sign(std::sin(x))};
}

/// Alice's output bit a = (1 - sign(sin(-phi~_A - (tb + tc) pi/2))) / 2.
inline Bit alice_bit(Angle phi_a_tilde, Bit tb, Bit tc) noexcept {
  const double shift = static_cast<double>(tb + tc) * half_pi;
  return to_bit(sign(std::sin(-phi_a_tilde.radians() - shift)));
}

/// a[tb][tc] for one tau_0 branch.
using AliceRow = std::array<std::array<Bit, 2>, 2>;
/// a[t0][tb][tc] over both tau_0 branches.
using AliceTable = std::array<AliceRow, 2>;

inline AliceRow alice_bit_table(Angle phi_a_tilde) noexcept {
  AliceRow r{};
  for (Bit tb = 0; tb < 2; ++tb)
    for (Bit tc = 0; tc < 2; ++tc) r[tb][tc] = alice_bit(phi_a_tilde, tb, tc);
  return r;
}

/// phi~_A = phi_A - phi_b - phi_c with reduction after each subtraction.
inline Angle alice_phi_tilde(Angle phi_A, Angle phi_b, Angle phi_c) noexcept {
  return (phi_A - phi_b) - phi_c;
}

/// Alice's complete table, evaluating step 0 for both hypothetical tau_0.
inline AliceTable alice_table(Angle phi_A, const SharedRandomness& s) {
  AliceTable t{};
  for (Bit t0 = 0; t0 < 2; ++t0) {
    const Angle phi_b = step0_phi_b(s.lambda1, s.lambda2, s.xi, t0);
    t[t0] = alice_bit_table(alice_phi_tilde(phi_A, phi_b, s.phi_c));
  }
  return t;
}

/// Everything Bob computes from his setting and the shared randomness.
struct BobLocal {
  Bit tau0 = 0;
  Bit tau_b = 0;
  Bit b = 0;  // bit form of beta
};

inline BobLocal bob_local(Angle phi_B, const SharedRandomness& s) {
  const Step0Result st = step0(s.lambda1, s.lambda2, s.xi, phi_B);
  const LocalAnswer ans = local_answer(phi_B + st.phi_b);
  return {st.tau0, ans.tau, to_bit(ans.output)};
}

struct CharlieLocal {
  Bit tau_c = 0;
  Bit c = 0;  // bit form of gamma
};

inline CharlieLocal charlie_local(Angle phi_C, Angle shared_phi_c) noexcept {
  const LocalAnswer ans = local_answer(phi_C + shared_phi_c);
  return {ans.tau, to_bit(ans.output)};
}

/// Alice's bit after learning tau_0: a[tau0][tb][tc], computed from the
/// single branch she needs.
inline AliceRow alice_row(Angle phi_A, const SharedRandomness& s, Bit tau0) {
  const Angle phi_b = step0_phi_b(s.lambda1, s.lambda2, s.xi, tau0);
  return alice_bit_table(alice_phi_tilde(phi_A, phi_b, s.phi_c));
}

// ---------------------------------------------------------------------------
// Protocol 1 and 2

/// Protocol 1: B sends (tau_0, tau_b) to A, C sends tau_c to A.
/// For Protocol 2 pass settings already scaled by the harmonic index.
inline RunOutcome run_protocol1(const Settings& st, const SharedRandomness& s) {
  const BobLocal bob_ = bob_local(st.phi_b, s);
  const CharlieLocal charlie_ = charlie_local(st.phi_c, s.phi_c);
  const Bit a = alice_row(st.phi_a, s, bob_.tau0)[bob_.tau_b][charlie_.tau_c];
  RunOutcome out;
  out.alpha = to_sign(a);
  out.beta = to_sign(bob_.b);
  out.gamma = to_sign(charlie_.c);
  out.transcript = {one_bit(bob, alice, MessageTag::tau0, bob_.tau0),
                    one_bit(bob, alice, MessageTag::tau_b, bob_.tau_b),
                    one_bit(charlie, alice, MessageTag::tau_c, charlie_.tau_c)};
  return out;
}

inline void check_harmonic(std::int64_t m, const CoefficientTable& table) {
  if (m < 1 || m % 2 == 0 || m > table.m_max()) {
    throw std::invalid_argument("harmonic index " + std::to_string(m) + " not in the mixture table");
  }
}

/// Protocol 2: Protocol 1 on the settings scaled by shared.m.
inline RunOutcome run_protocol2(const Settings& st, const SharedRandomness& s, const CoefficientTable& table) {
  check_harmonic(s.m, table);
  return run_protocol1(st.scaled(s.m), s);
}

// ---------------------------------------------------------------------------
// Variants

enum class Variant { v1prime, v1doubleprime, v1tripleprime };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::v1prime: return "v1prime";
    case Variant::v1doubleprime: return "v1doubleprime";
    case Variant::v1tripleprime: return "v1tripleprime";
  }
  return "?";
}

/// 1':   C -tau_c-> B -(tau_0, tau_bc)-> A
///       c' = c, b' = b + tau_b tau_c, a' = a[tau0][tau_bc][0]
inline RunOutcome run_v1prime(const Settings& st, const SharedRandomness& s) {
  const CharlieLocal charlie_ = charlie_local(st.phi_c, s.phi_c);
  const BobLocal bob_ = bob_local(st.phi_b, s);
  const Bit tau_bc = bob_.tau_b ^ charlie_.tau_c;
  const Bit b = bob_.b ^ (bob_.tau_b & charlie_.tau_c);
  const Bit a = alice_row(st.phi_a, s, bob_.tau0)[tau_bc][0];
  RunOutcome out;
  out.alpha = to_sign(a);
  out.beta = to_sign(b);
  out.gamma = to_sign(charlie_.c);
  out.transcript = {one_bit(charlie, bob, MessageTag::tau_c, charlie_.tau_c),
                    one_bit(bob, alice, MessageTag::tau0, bob_.tau0),
                    one_bit(bob, alice, MessageTag::tau_bc, tau_bc)};
  return out;
}

/// 1'':  C -tau_c-> B,  B -tau_0-> A -tau_a-> B
///       c'' = c, a'' = a[tau0][0][0], b'' = b + ta tb + ta tc + tb tc
///       with tau_a = a[tau0][0][0] + a[tau0][1][0]
inline RunOutcome run_v1doubleprime(const Settings& st, const SharedRandomness& s) {
  const CharlieLocal charlie_ = charlie_local(st.phi_c, s.phi_c);
  const BobLocal bob_ = bob_local(st.phi_b, s);
  const AliceRow row = alice_row(st.phi_a, s, bob_.tau0);
  const Bit tau_a = row[0][0] ^ row[1][0];
  const Bit tb = bob_.tau_b, tc = charlie_.tau_c;
  const Bit b = bob_.b ^ (tau_a & tb) ^ (tau_a & tc) ^ (tb & tc);
  RunOutcome out;
  out.alpha = to_sign(row[0][0]);
  out.beta = to_sign(b);
  out.gamma = to_sign(charlie_.c);
  out.transcript = {one_bit(charlie, bob, MessageTag::tau_c, tc),
                    one_bit(bob, alice, MessageTag::tau0, bob_.tau0),
                    one_bit(alice, bob, MessageTag::tau_a, tau_a)};
  return out;
}

/// 1''': B -tau_b-> C -tau_bc-> A -tau_alpha-> B
///       c''' = c + tb tc, a''' = a[0][tau_bc][0], b''' = b + tau0 tau_alpha
///       with tau_alpha = a[0][tau_bc][0] + a[1][tau_bc][0]
inline RunOutcome run_v1tripleprime(const Settings& st, const SharedRandomness& s) {
  const BobLocal bob_ = bob_local(st.phi_b, s);
  const CharlieLocal charlie_ = charlie_local(st.phi_c, s.phi_c);
  const Bit tau_bc = bob_.tau_b ^ charlie_.tau_c;
  const AliceTable table = alice_table(st.phi_a, s);
  const Bit a = table[0][tau_bc][0];
  const Bit tau_alpha = table[0][tau_bc][0] ^ table[1][tau_bc][0];
  RunOutcome out;
  out.alpha = to_sign(a);
  out.beta = to_sign(bob_.b ^ (bob_.tau0 & tau_alpha));
  out.gamma = to_sign(charlie_.c ^ (bob_.tau_b & charlie_.tau_c));
  out.transcript = {one_bit(bob, charlie, MessageTag::tau_b, bob_.tau_b),
                    one_bit(charlie, alice, MessageTag::tau_bc, tau_bc),
                    one_bit(alice, bob, MessageTag::tau_alpha, tau_alpha)};
  return out;
}

inline RunOutcome run_variant(Variant v, const Settings& st, const SharedRandomness& s) {
  switch (v) {
    case Variant::v1prime: return run_v1prime(st, s);
    case Variant::v1doubleprime: return run_v1doubleprime(st, s);
    case Variant::v1tripleprime: return run_v1tripleprime(st, s);
  }
  throw std::invalid_argument("unknown variant");
}

// ---------------------------------------------------------------------------
// 2-bit and N-party protocols (no step 0, uniform shared angles)

inline RunOutcome run_two_bit(const Settings& st, const TwoBitShared& s) {
  const LocalAnswer bob_ = local_answer(st.phi_b + s.phi_b);
  const LocalAnswer charlie_ = local_answer(st.phi_c + s.phi_c);
  const Bit a = alice_bit(alice_phi_tilde(st.phi_a, s.phi_b, s.phi_c), bob_.tau, charlie_.tau);
  RunOutcome out;
  out.alpha = to_sign(a);
  out.beta = bob_.output;
  out.gamma = charlie_.output;
  out.transcript = {one_bit(bob, alice, MessageTag::tau_b, bob_.tau),
                    one_bit(charlie, alice, MessageTag::tau_c, charlie_.tau)};
  return out;
}

struct NPartyOutcome {
  std::vector<Sign> outputs;
  Transcript transcript;

  Sign product() const noexcept {
    Sign p = +1;
    for (Sign s : outputs) p *= s;
    return p;
  }
};

/// Bits per sector message: ceil(log2(N - 1)).
inline std::uint8_t sector_bits(std::size_t n_parties) {
  return static_cast<std::uint8_t>(std::bit_width(n_parties - 2));
}

/// Sector k = floor((phi mod pi) (N - 1) / pi) in {0, ..., N - 2}.
inline std::uint32_t sector_index(Angle phi_tilde, std::size_t n_parties) noexcept {
  double x = phi_tilde.radians();
  if (x >= pi) x -= pi;
  const auto sectors = static_cast<double>(n_parties - 1);
  const auto k = static_cast<std::uint32_t>(std::floor(x * sectors / pi));
  return std::min<std::uint32_t>(k, static_cast<std::uint32_t>(n_parties - 2));
}

/// N-party generalization: party i >= 1 outputs sign(sin phi~_i) and sends
/// the sector of phi~_i mod pi to Alice, who outputs
/// sign(sin(-phi~_1 - sum_i k_i pi / (N - 1))).
inline NPartyOutcome run_nparty(std::span<const Angle> settings, const NPartyShared& s) {
  const std::size_t n = settings.size();
  if (n < 3) throw std::invalid_argument("run_nparty: need at least 3 parties");
  if (s.angles.size() != n - 1) throw std::invalid_argument("run_nparty: shared angles do not match party count");
  NPartyOutcome out;
  out.outputs.resize(n);
  out.transcript.reserve(n - 1);
  const std::uint8_t width = sector_bits(n);
  std::uint32_t k_sum = 0;
  Angle phi1_tilde = settings[0];
  for (std::size_t i = 1; i < n; ++i) {
    const Angle tilde = settings[i] + s.angles[i - 1];
    out.outputs[i] = sign(std::sin(tilde.radians()));
    const std::uint32_t k = sector_index(tilde, n);
    k_sum += k;
    out.transcript.push_back({PartyId{static_cast<std::uint32_t>(i)}, alice, MessageTag::sector, width, k});
    phi1_tilde = phi1_tilde - s.angles[i - 1];
  }
  const double shift = static_cast<double>(k_sum) * (pi / static_cast<double>(n - 1));
  out.outputs[0] = sign(std::sin(-phi1_tilde.radians() - shift));
  return out;
}

}  // namespace ghzsim
