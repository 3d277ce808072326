#pragma once

// Seeded, lane-parallel Monte-Carlo estimation of correlators and marginals.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "ghzsim/rng.hpp"
#include "ghzsim/stats.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct TrialPlan {
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // separates experiments that share a seed
  unsigned lanes = 1;
};

inline unsigned default_lanes() noexcept { return std::max(1U, std::thread::hardware_concurrency()); }

/// Runs `trial(rng, acc)` for every trial index in [0, plan.trials), each
/// with its own TrialRng(seed, stream, index). Trials are split into
/// contiguous blocks, one per lane; per-lane accumulators are merged in lane
/// order. With accumulators whose merge is exact the result does not depend
/// on the lane count.
template <typename Acc, typename Trial>
Acc run_trials(const TrialPlan& plan, const Acc& init, Trial&& trial) {
  if (plan.trials == 0) throw std::invalid_argument("run_trials: need at least one trial");
  const unsigned lanes =
      static_cast<unsigned>(std::clamp<std::uint64_t>(plan.lanes, 1, plan.trials));
  std::vector<Acc> partial(lanes, init);
  auto work = [&](unsigned lane) {
    const std::uint64_t begin = plan.trials * lane / lanes;
    const std::uint64_t end = plan.trials * (lane + 1) / lanes;
    Acc& acc = partial[lane];
    for (std::uint64_t i = begin; i < end; ++i) {
      TrialRng rng(plan.seed, plan.stream, i);
      trial(rng, acc);
    }
  };
  if (lanes == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(lanes - 1);
    for (unsigned l = 1; l < lanes; ++l) pool.emplace_back(work, l);
    work(0);
  }
  Acc total = init;
  for (const Acc& p : partial) total.merge(p);
  return total;
}

/// Accumulates the full product, every single output and every pair of
/// outputs of a K-party +/-1 experiment.
class CorrelationAccumulator {
 public:
  explicit CorrelationAccumulator(std::size_t outputs)
      : singles_(outputs), pairs_(outputs * (outputs - 1) / 2) {}

  void add(std::span<const Sign> out) {
    Sign product = +1;
    std::size_t p = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      product *= out[i];
      singles_[i].add(out[i]);
      for (std::size_t j = i + 1; j < out.size(); ++j) pairs_[p++].add(out[i] * out[j]);
    }
    correlation_.add(product);
  }

  void skip() noexcept { ++skipped_; }

  void merge(const CorrelationAccumulator& o) {
    correlation_.merge(o.correlation_);
    for (std::size_t i = 0; i < singles_.size(); ++i) singles_[i].merge(o.singles_[i]);
    for (std::size_t i = 0; i < pairs_.size(); ++i) pairs_[i].merge(o.pairs_[i]);
    skipped_ += o.skipped_;
  }

  const SignAccumulator& correlation() const noexcept { return correlation_; }
  std::span<const SignAccumulator> singles() const noexcept { return singles_; }
  std::span<const SignAccumulator> pairs() const noexcept { return pairs_; }
  std::uint64_t skipped() const noexcept { return skipped_; }

 private:
  SignAccumulator correlation_;
  std::vector<SignAccumulator> singles_;
  std::vector<SignAccumulator> pairs_;  // (0,1), (0,2), ..., (1,2), ...
  std::uint64_t skipped_ = 0;
};

struct CorrelationReport {
  Estimate correlation;           // <product of all outputs>
  std::vector<Estimate> singles;  // <alpha>, <beta>, <gamma>, ...
  std::vector<Estimate> pairs;    // <alpha beta>, <alpha gamma>, <beta gamma>, ...
  std::uint64_t trials = 0;       // including skipped ones
  std::uint64_t skipped = 0;

  /// Single then pair marginals: for three parties alpha, beta, gamma,
  /// alpha beta, alpha gamma, beta gamma.
  std::vector<Estimate> marginals() const {
    std::vector<Estimate> m(singles);
    m.insert(m.end(), pairs.begin(), pairs.end());
    return m;
  }
};

inline CorrelationReport make_report(const CorrelationAccumulator& acc) {
  CorrelationReport r;
  r.correlation = acc.correlation().estimate();
  for (const auto& s : acc.singles()) r.singles.push_back(s.estimate());
  for (const auto& p : acc.pairs()) r.pairs.push_back(p.estimate());
  r.skipped = acc.skipped();
  r.trials = acc.correlation().n + r.skipped;
  return r;
}

inline constexpr std::size_t max_outputs = 16;

/// Estimates correlator and marginals of `runner`, which is called as
/// `bool runner(TrialRng&, std::span<Sign> outputs)` and returns false for
/// trials that must be excluded (e.g. a non-detection).
template <typename Runner>
CorrelationReport estimate(Runner&& runner, std::size_t outputs, const TrialPlan& plan) {
  if (outputs == 0 || outputs > max_outputs) throw std::invalid_argument("estimate: unsupported number of outputs");
  const auto acc = run_trials(plan, CorrelationAccumulator(outputs), [&](TrialRng& rng, CorrelationAccumulator& a) {
    Sign buf[max_outputs];
    const std::span<Sign> out(buf, outputs);
    if (runner(rng, out)) {
      a.add(out);
    } else {
      a.skip();
    }
  });
  return make_report(acc);
}

}  // namespace ghzsim
