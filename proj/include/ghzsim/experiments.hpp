#pragma once

// Protocol selection, setting grids and the Monte-Carlo experiments behind
// the command-line subcommands and the acceptance checks.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ghzsim/boxes.hpp"
#include "ghzsim/coefficients.hpp"
#include "ghzsim/detection.hpp"
#include "ghzsim/estimate.hpp"
#include "ghzsim/oracles.hpp"
#include "ghzsim/protocols.hpp"
#include "ghzsim/randomness.hpp"
#include "ghzsim/stats.hpp"

namespace ghzsim {

enum class ProtocolChoice { p1, p2, v1prime, v1doubleprime, v1tripleprime, twobit, nparty, boxes, detect };

inline constexpr std::array<std::pair<std::string_view, ProtocolChoice>, 9> protocol_names{{
    {"p1", ProtocolChoice::p1},
    {"p2", ProtocolChoice::p2},
    {"v1prime", ProtocolChoice::v1prime},
    {"v1doubleprime", ProtocolChoice::v1doubleprime},
    {"v1tripleprime", ProtocolChoice::v1tripleprime},
    {"twobit", ProtocolChoice::twobit},
    {"nparty", ProtocolChoice::nparty},
    {"boxes", ProtocolChoice::boxes},
    {"detect", ProtocolChoice::detect},
}};

inline std::string_view to_string(ProtocolChoice p) {
  for (auto [name, v] : protocol_names)
    if (v == p) return name;
  return "?";
}

inline ProtocolChoice parse_protocol(std::string_view s) {
  for (auto [name, v] : protocol_names)
    if (name == s) return v;
  throw std::invalid_argument("unknown protocol '" + std::string(s) + "'");
}

/// Protocols whose correlation is the exact cosine (they draw the harmonic M).
inline bool uses_mixture(ProtocolChoice p) noexcept {
  return p == ProtocolChoice::p2 || p == ProtocolChoice::boxes || p == ProtocolChoice::detect;
}

// ---------------------------------------------------------------------------
// Settings

/// One grid point: the setting sum phi (radians) and the per-party settings
/// that realize it.
struct GridPoint {
  double phi = 0.0;
  std::vector<Angle> settings;  // Alice first

  Settings three_party() const {
    if (settings.size() != 3) throw std::logic_error("grid point is not tripartite");
    return {settings[0], settings[1], settings[2]};
  }
};

/// Random split of `phi` into n_parties settings: all but Alice's uniform,
/// Alice's fixed by the sum. Deterministic in (seed, index).
inline GridPoint split_sum(double phi, std::size_t n_parties, std::uint64_t seed, std::uint64_t index) {
  TrialRng rng(seed ^ 0x5e771a95ULL, index, ~std::uint64_t{0});
  GridPoint g;
  g.phi = phi;
  g.settings.resize(n_parties);
  double rest = 0.0;
  for (std::size_t i = 1; i < n_parties; ++i) {
    g.settings[i] = Angle(rng.uniform(0.0, two_pi));
    rest += g.settings[i].radians();
  }
  g.settings[0] = Angle(phi - rest);
  return g;
}

/// `points` sums evenly spaced over [0, 2pi], both ends included.
inline std::vector<double> uniform_grid(std::size_t points) {
  if (points == 0) throw std::invalid_argument("grid must be non-empty");
  std::vector<double> g(points, 0.0);
  for (std::size_t k = 0; k < points && points > 1; ++k)
    g[k] = two_pi * static_cast<double>(k) / static_cast<double>(points - 1);
  return g;
}

// ---------------------------------------------------------------------------
// Per-trial runners

struct ExperimentContext {
  const CoefficientTable* table = nullptr;  // required for mixture protocols
  DetectionSeed detection_seed = DetectionSeed::v1tripleprime;
};

inline std::size_t output_count(ProtocolChoice p, const GridPoint& g) {
  return p == ProtocolChoice::nparty ? g.settings.size() : 3;
}

inline void write3(std::span<Sign> out, Sign a, Sign b, Sign c) {
  out[0] = a;
  out[1] = b;
  out[2] = c;
}

/// One trial of protocol `p` at grid point `g`. Returns false when the trial
/// produced no joint outcome (detection model, some party silent).
inline bool run_one(ProtocolChoice p, const GridPoint& g, const ExperimentContext& ctx, TrialRng& rng,
                    std::span<Sign> out) {
  auto need_table = [&]() -> const CoefficientTable& {
    if (!ctx.table) throw std::invalid_argument(std::string(to_string(p)) + " needs a mixture table");
    return *ctx.table;
  };
  switch (p) {
    case ProtocolChoice::p1: {
      const RunOutcome r = run_protocol1(g.three_party(), sample_shared(rng));
      write3(out, r.alpha, r.beta, r.gamma);
      return true;
    }
    case ProtocolChoice::p2: {
      const auto& t = need_table();
      const RunOutcome r = run_protocol2(g.three_party(), sample_shared(rng, t), t);
      write3(out, r.alpha, r.beta, r.gamma);
      return true;
    }
    case ProtocolChoice::v1prime:
    case ProtocolChoice::v1doubleprime:
    case ProtocolChoice::v1tripleprime: {
      const Variant v = p == ProtocolChoice::v1prime         ? Variant::v1prime
                        : p == ProtocolChoice::v1doubleprime ? Variant::v1doubleprime
                                                             : Variant::v1tripleprime;
      const RunOutcome r = run_variant(v, g.three_party(), sample_shared(rng));
      write3(out, r.alpha, r.beta, r.gamma);
      return true;
    }
    case ProtocolChoice::twobit: {
      const RunOutcome r = run_two_bit(g.three_party(), sample_two_bit_shared(rng));
      write3(out, r.alpha, r.beta, r.gamma);
      return true;
    }
    case ProtocolChoice::nparty: {
      const NPartyOutcome r = run_nparty(g.settings, sample_nparty_shared(rng, g.settings.size()));
      std::copy(r.outputs.begin(), r.outputs.end(), out.begin());
      return true;
    }
    case ProtocolChoice::boxes: {
      const SharedRandomness s = sample_shared(rng, need_table());
      const BoxRunOutcome r = run_box_protocol(g.three_party(), s, rng);
      write3(out, r.outcome.alpha, r.outcome.beta, r.outcome.gamma);
      return true;
    }
    case ProtocolChoice::detect: {
      const SharedRandomness s = sample_shared(rng, need_table());
      const DetectionOutcome d = run_detection(g.three_party(), s, sample_guesses(rng), ctx.detection_seed);
      if (!d.all_detected()) return false;
      write3(out, *d.outputs[0], *d.outputs[1], *d.outputs[2]);
      return true;
    }
  }
  return false;
}

inline CorrelationReport estimate_protocol(ProtocolChoice p, const GridPoint& g, const ExperimentContext& ctx,
                                           const TrialPlan& plan) {
  return estimate([&](TrialRng& rng, std::span<Sign> out) { return run_one(p, g, ctx, rng, out); },
                  output_count(p, g), plan);
}

// ---------------------------------------------------------------------------
// Detection statistics

class DetectionAccumulator {
 public:
  void add(const DetectionOutcome& d) {
    for (std::size_t i = 0; i < 3; ++i) rates_[i].add(d.detected(PartyId{static_cast<std::uint32_t>(i)}));
    triple_.add(d.all_detected());
    if (d.all_detected()) {
      const std::array<Sign, 3> o{*d.outputs[0], *d.outputs[1], *d.outputs[2]};
      conditional_.add(o);
    }
  }
  void merge(const DetectionAccumulator& o) {
    for (std::size_t i = 0; i < 3; ++i) rates_[i].merge(o.rates_[i]);
    triple_.merge(o.triple_);
    conditional_.merge(o.conditional_);
  }
  const RateAccumulator& rate(PartyId p) const { return rates_[p.index]; }
  const RateAccumulator& triple() const { return triple_; }
  const CorrelationAccumulator& conditional() const { return conditional_; }

 private:
  std::array<RateAccumulator, 3> rates_;
  RateAccumulator triple_;
  CorrelationAccumulator conditional_{3};
};

struct DetectionReport {
  std::array<double, 3> rates{};  // Alice, Bob, Charlie
  double triple_rate = 0.0;
  CorrelationReport conditional;  // over triple detections only
  std::uint64_t trials = 0;
};

inline DetectionReport estimate_detection(const GridPoint& g, const CoefficientTable& table, DetectionSeed seed,
                                          const TrialPlan& plan) {
  const Settings st = g.three_party();
  const auto acc = run_trials(plan, DetectionAccumulator{}, [&](TrialRng& rng, DetectionAccumulator& a) {
    const SharedRandomness s = sample_shared(rng, table);
    a.add(run_detection(st, s, sample_guesses(rng), seed));
  });
  DetectionReport r;
  for (std::uint32_t i = 0; i < 3; ++i) r.rates[i] = acc.rate(PartyId{i}).rate();
  r.triple_rate = acc.triple().rate();
  r.conditional = make_report(acc.conditional());
  r.trials = acc.triple().n;
  return r;
}

// ---------------------------------------------------------------------------
// Box statistics

struct BoxCheckAccumulator {
  std::uint64_t runs = 0;
  std::uint64_t box_uses = 0;
  std::uint64_t wrong_box_count = 0;   // runs not using exactly 8 PR boxes
  std::uint64_t parity_mismatches = 0; // runs whose output parity differs from Protocol 2
  SignAccumulator correlation;

  void merge(const BoxCheckAccumulator& o) {
    runs += o.runs;
    box_uses += o.box_uses;
    wrong_box_count += o.wrong_box_count;
    parity_mismatches += o.parity_mismatches;
    correlation.merge(o.correlation);
  }
};

/// Runs the box protocol and Protocol 2 on the same shared randomness and
/// compares their output parities run by run.
inline BoxCheckAccumulator check_boxes(const GridPoint& g, const CoefficientTable& table, const TrialPlan& plan) {
  const Settings st = g.three_party();
  return run_trials(plan, BoxCheckAccumulator{}, [&](TrialRng& rng, BoxCheckAccumulator& a) {
    const SharedRandomness s = sample_shared(rng, table);
    const BoxRunOutcome boxed = run_box_protocol(st, s, rng);
    const RunOutcome comm = run_protocol2(st, s, table);
    ++a.runs;
    a.box_uses += boxed.network.total_uses();
    if (boxed.network.total_uses() != BoxNetwork::size) ++a.wrong_box_count;
    if (boxed.outcome.product() != comm.product()) ++a.parity_mismatches;
    a.correlation.add(boxed.outcome.product());
  });
}

}  // namespace ghzsim
