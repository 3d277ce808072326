#pragma once

// Simulation of the GHZ correlations with nonlocal PR boxes instead of
// communication: 5 PR boxes plus one GHZ box built from 3 more.

#include <array>
#include <cstdint>

#include "ghzsim/protocols.hpp"
#include "ghzsim/randomness.hpp"
#include "ghzsim/rng.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct PRBoxOutput {
  Bit a = 0;  // first endpoint
  Bit b = 0;  // second endpoint
};

/// PR box: a uniform, b = a + x y (mod 2). The first endpoint's output is
/// the free one.
inline PRBoxOutput pr_box(Bit x, Bit y, TrialRng& rng) noexcept {
  const Bit a = rng.bit();
  return {a, static_cast<Bit>(a ^ (x & y))};
}

/// A PR box wired between two parties, counting its uses.
class PRBox {
 public:
  constexpr PRBox() = default;
  constexpr PRBox(PartyId first, PartyId second) : first_(first), second_(second) {}

  PRBoxOutput use(Bit x, Bit y, TrialRng& rng) noexcept {
    ++usage_;
    return pr_box(x, y, rng);
  }

  PartyId first() const noexcept { return first_; }
  PartyId second() const noexcept { return second_; }
  std::uint32_t usage() const noexcept { return usage_; }

 private:
  PartyId first_;
  PartyId second_;
  std::uint32_t usage_ = 0;
};

struct GHZBoxOutput {
  Bit a = 0;
  Bit b = 0;
  Bit c = 0;
};

/// GHZ box over (Alice, Bob, Charlie) from three PR boxes:
///   PR1(x, y) -> (p, q)      A-B
///   PR2(p, z) -> (r, s)      A-C
///   PR3(q, z) -> (t, u)      B-C
/// a = r, b = t, c = s + u, so a + b + c = (p + q) z = x y z.
inline GHZBoxOutput ghz_box(Bit x, Bit y, Bit z, std::array<PRBox, 3>& internal, TrialRng& rng) noexcept {
  const auto [p, q] = internal[0].use(x, y, rng);
  const auto [r, s] = internal[1].use(p, z, rng);
  const auto [t, u] = internal[2].use(q, z, rng);
  return {r, t, static_cast<Bit>(s ^ u)};
}

inline GHZBoxOutput ghz_box(Bit x, Bit y, Bit z, TrialRng& rng) noexcept {
  std::array<PRBox, 3> internal{PRBox(alice, bob), PRBox(alice, charlie), PRBox(bob, charlie)};
  return ghz_box(x, y, z, internal, rng);
}

/// The eight PR boxes of one run.
struct BoxNetwork {
  std::array<PRBox, 3> ab_boxes{PRBox(alice, bob), PRBox(alice, bob), PRBox(alice, bob)};
  PRBox bc_box{bob, charlie};
  PRBox ac_box{alice, charlie};
  std::array<PRBox, 3> ghz_internal{PRBox(alice, bob), PRBox(alice, charlie), PRBox(bob, charlie)};

  static constexpr std::size_t size = 8;

  std::uint32_t total_uses() const noexcept {
    std::uint32_t n = bc_box.usage() + ac_box.usage();
    for (const auto& b : ab_boxes) n += b.usage();
    for (const auto& b : ghz_internal) n += b.usage();
    return n;
  }
};

struct BoxRunOutcome {
  RunOutcome outcome;  // transcript stays empty
  BoxNetwork network;
};

/// Zero-communication protocol. Writing
///   X1 = a000 + a100,  X2 = a000 + a010,  X3 = a000 + a010 + a100 + a110,
/// the XOR of the outputs of Protocol 1 decomposes as
///   a000 + b + c + t0 X1 + tb X2 + t0 tb X3 + tb tc + tc X2 + t0 tc X3.
/// The first three products use A-B boxes, tb tc the B-C box, tc X2 the A-C
/// box and t0 tc X3 the GHZ box. Each party XORs its base bit with its box
/// outputs. Settings are scaled by shared.m, so m > 1 runs the mixture.
inline BoxRunOutcome run_box_protocol(const Settings& settings, const SharedRandomness& s, TrialRng& box_rng) {
  const Settings st = settings.scaled(s.m);

  // Local phase: each party sees only its own setting and its shared variables.
  const BobLocal bob_ = bob_local(st.phi_b, s);
  const CharlieLocal charlie_ = charlie_local(st.phi_c, s.phi_c);
  const AliceTable a = alice_table(st.phi_a, s);
  const Bit x1 = a[0][0][0] ^ a[1][0][0];
  const Bit x2 = a[0][0][0] ^ a[0][1][0];
  const Bit x3 = a[0][0][0] ^ a[0][1][0] ^ a[1][0][0] ^ a[1][1][0];
  const Bit t0 = bob_.tau0, tb = bob_.tau_b, tc = charlie_.tau_c;

  // Box phase.
  BoxRunOutcome r;
  BoxNetwork& net = r.network;
  const PRBoxOutput ab1 = net.ab_boxes[0].use(x1, t0, box_rng);
  const PRBoxOutput ab2 = net.ab_boxes[1].use(x2, tb, box_rng);
  const PRBoxOutput ab3 = net.ab_boxes[2].use(x3, static_cast<Bit>(t0 & tb), box_rng);
  const PRBoxOutput bc = net.bc_box.use(tb, tc, box_rng);
  const PRBoxOutput ac = net.ac_box.use(x2, tc, box_rng);
  const GHZBoxOutput g = ghz_box(x3, t0, tc, net.ghz_internal, box_rng);

  const Bit alice_out = a[0][0][0] ^ ab1.a ^ ab2.a ^ ab3.a ^ ac.a ^ g.a;
  const Bit bob_out = bob_.b ^ ab1.b ^ ab2.b ^ ab3.b ^ bc.a ^ g.b;
  const Bit charlie_out = charlie_.c ^ bc.b ^ ac.b ^ g.c;
  r.outcome.alpha = to_sign(alice_out);
  r.outcome.beta = to_sign(bob_out);
  r.outcome.gamma = to_sign(charlie_out);
  return r;
}

}  // namespace ghzsim
