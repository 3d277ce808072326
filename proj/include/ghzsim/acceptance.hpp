#pragma once

// The ten acceptance criteria. Each check returns a pass/fail result with a
// one-line summary of the worst case it saw. `full` runs 10^6 trials per
// statistical check, `fast` 10^5.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ghzsim/boxes.hpp"
#include "ghzsim/coefficients.hpp"
#include "ghzsim/detection.hpp"
#include "ghzsim/estimate.hpp"
#include "ghzsim/experiments.hpp"
#include "ghzsim/oracles.hpp"
#include "ghzsim/protocols.hpp"
#include "ghzsim/randomness.hpp"
#include "ghzsim/stats.hpp"

namespace ghzsim {

enum class VerifyLevel { fast, full };

inline VerifyLevel parse_level(std::string_view s) {
  if (s == "fast") return VerifyLevel::fast;
  if (s == "full") return VerifyLevel::full;
  throw std::invalid_argument("unknown level '" + std::string(s) + "' (expected fast or full)");
}

struct AcceptanceConfig {
  VerifyLevel level = VerifyLevel::full;
  std::uint64_t seed = 20240601;
  unsigned lanes = default_lanes();

  std::uint64_t trials() const noexcept { return level == VerifyLevel::full ? 1000000 : 100000; }
  std::uint64_t exact_runs() const noexcept { return level == VerifyLevel::full ? 100000 : 10000; }
  // Histogram checks are cheap and their L1 noise floor needs 10^6 samples
  // at 100 bins, so they always run at full size.
  static constexpr std::uint64_t density_samples = 1000000;
  static constexpr std::size_t grid_points = 25;
  // Fixed-width windows are stated for 10^6 trials; widen them by the
  // standard-error ratio at smaller sample sizes.
  double window_scale() const noexcept { return std::sqrt(1e6 / static_cast<double>(trials())); }

  TrialPlan plan(std::uint64_t trials, std::uint64_t stream) const { return {trials, seed, stream, lanes}; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace acceptance_detail {

inline std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

/// Tracks the largest ratio |deviation| / allowance over a set of checks.
struct WorstRatio {
  double ratio = 0.0;
  std::string where;
  bool ok = true;

  void add(double deviation, double allowance, const std::string& label) {
    const bool pass = std::abs(deviation) <= allowance;
    ok = ok && pass;
    const double r = allowance > 0.0 ? std::abs(deviation) / allowance : (deviation == 0.0 ? 0.0 : INFINITY);
    if (r >= ratio) {
      ratio = r;
      where = label;
    }
  }
};

inline std::string phi_label(double phi) { return "phi=" + fmt(phi / pi, 4) + "pi"; }

// lambda1 = +x, lambda2 = +z, phi_c = 0: both step-0 branches give phi_b = 0
// or pi, and b.lambda2 is exactly zero, so settings on the quarter-turn grid
// drive several sines to exact zeros.
inline SharedRandomness zero_configuration(Bit xi) {
  SharedRandomness s;
  s.lambda1 = {1.0, 0.0, 0.0};
  s.lambda2 = {0.0, 0.0, 1.0};
  s.xi = xi;
  s.phi_c = Angle(0.0);
  return s;
}

}  // namespace acceptance_detail

// ---------------------------------------------------------------------------

/// 1. Protocol 2 reproduces cos(phi) on the grid within 4 sigma + 2 epsilon.
inline CriterionResult criterion_cosine(const AcceptanceConfig& cfg, const CoefficientTable& table) {
  using namespace acceptance_detail;
  const auto grid = uniform_grid(AcceptanceConfig::grid_points);
  const ExperimentContext ctx{&table};
  WorstRatio w;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const GridPoint g = split_sum(grid[k], 3, cfg.seed, k);
    const Estimate e = estimate_protocol(ProtocolChoice::p2, g, ctx, cfg.plan(cfg.trials(), 100 + k)).correlation;
    w.add(e.mean - std::cos(grid[k]), 4.0 * e.std_error + 2.0 * table.tail_epsilon(), phi_label(grid[k]));
  }
  return {1, "cosine reproduction (Protocol 2)", w.ok,
          "worst |est-cos|/(4sigma+2eps) = " + fmt(w.ratio) + " at " + w.where + ", eps = " +
              fmt(table.tail_epsilon(), 3)};
}

/// 2. Protocol 1 reproduces E_1 within 4 sigma and is at least as strong as cos.
inline CriterionResult criterion_e1(const AcceptanceConfig& cfg) {
  using namespace acceptance_detail;
  const auto grid = uniform_grid(AcceptanceConfig::grid_points);
  WorstRatio w;
  bool stronger = true;
  std::string weak_at;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const GridPoint g = split_sum(grid[k], 3, cfg.seed, k);
    const Estimate e = estimate_protocol(ProtocolChoice::p1, g, {}, cfg.plan(cfg.trials(), 200 + k)).correlation;
    // 1e-12 absorbs rounding in the oracle at the points where E_1 = +-1 and sigma = 0
    w.add(e.mean - e1_closed(grid[k]), 4.0 * e.std_error + 1e-12, phi_label(grid[k]));
    if (std::abs(e.mean) < std::abs(std::cos(grid[k])) - 4.0 * e.std_error - 1e-12) {
      stronger = false;
      weak_at = phi_label(grid[k]);
    }
  }
  return {2, "E1 reproduction (Protocol 1)", w.ok && stronger,
          "worst |est-E1|/4sigma = " + fmt(w.ratio) + " at " + w.where +
              (stronger ? ", |est| >= |cos|-4sigma everywhere" : ", weaker than cos at " + weak_at)};
}

/// 3. Single and pair marginals vanish for every protocol form.
inline CriterionResult criterion_marginals(const AcceptanceConfig& cfg, const CoefficientTable& table) {
  using namespace acceptance_detail;
  const ExperimentContext ctx{&table};
  const std::vector<std::pair<ProtocolChoice, std::size_t>> forms{
      {ProtocolChoice::p1, 3},     {ProtocolChoice::p2, 3},     {ProtocolChoice::v1prime, 3},
      {ProtocolChoice::v1doubleprime, 3}, {ProtocolChoice::v1tripleprime, 3}, {ProtocolChoice::twobit, 3},
      {ProtocolChoice::nparty, 4}, {ProtocolChoice::boxes, 3}, {ProtocolChoice::detect, 3}};
  WorstRatio w;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const auto [p, n_parties] = forms[i];
    const GridPoint g = split_sum(1.0, n_parties, cfg.seed, 1000 + i);
    const CorrelationReport r = estimate_protocol(p, g, ctx, cfg.plan(cfg.trials(), 300 + i));
    const double allowance = 4.0 / std::sqrt(static_cast<double>(r.correlation.n));
    const auto m = r.marginals();
    for (std::size_t j = 0; j < m.size(); ++j) {
      w.add(m[j].mean, allowance, std::string(to_string(p)) + " marginal " + std::to_string(j));
      ++checked;
    }
  }
  return {3, "vanishing marginals", w.ok,
          std::to_string(checked) + " marginals, worst |mean|/(4/sqrt n) = " + fmt(w.ratio) + " (" + w.where + ")"};
}

/// 4. Exact bit counts and link patterns on every run.
inline CriterionResult criterion_bits(const AcceptanceConfig& cfg, const CoefficientTable& table) {
  struct Link {
    PartyId from, to;
    std::size_t bits;
  };
  auto matches = [](const Transcript& t, std::size_t total, std::initializer_list<Link> links) {
    if (total_bits(t) != total) return false;
    for (const Link& l : links)
      if (bits_on_link(t, l.from, l.to) != l.bits) return false;
    return true;
  };
  const std::vector<std::size_t> party_counts{3, 4, 5, 6, 9, 17};
  std::uint64_t runs = 0, violations = 0;
  for (std::uint64_t t = 0; t < cfg.exact_runs(); ++t) {
    TrialRng rng(cfg.seed, 400, t);
    const SharedRandomness s = sample_shared(rng, table);
    const Settings st{Angle(rng.uniform(0.0, two_pi)), Angle(rng.uniform(0.0, two_pi)),
                      Angle(rng.uniform(0.0, two_pi))};
    const SharedRandomness plain = [&] {
      SharedRandomness c = s;
      c.m = 1;
      return c;
    }();
    const bool ok =
        matches(run_protocol1(st, plain).transcript, 3, {{bob, alice, 2}, {charlie, alice, 1}}) &&
        matches(run_protocol2(st, s, table).transcript, 3, {{bob, alice, 2}, {charlie, alice, 1}}) &&
        matches(run_v1prime(st, plain).transcript, 3, {{charlie, bob, 1}, {bob, alice, 2}}) &&
        matches(run_v1doubleprime(st, plain).transcript, 3, {{charlie, bob, 1}, {bob, alice, 1}, {alice, bob, 1}}) &&
        matches(run_v1tripleprime(st, plain).transcript, 3,
                {{bob, charlie, 1}, {charlie, alice, 1}, {alice, bob, 1}}) &&
        matches(run_two_bit(st, sample_two_bit_shared(rng)).transcript, 2, {{bob, alice, 1}, {charlie, alice, 1}}) &&
        run_box_protocol(st, s, rng).outcome.transcript.empty();
    ++runs;
    if (!ok) ++violations;

    const std::size_t n = party_counts[t % party_counts.size()];
    std::vector<Angle> settings(n);
    for (auto& a : settings) a = Angle(rng.uniform(0.0, two_pi));
    const NPartyOutcome o = run_nparty(settings, sample_nparty_shared(rng, n));
    const auto width = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n - 1))));
    bool n_ok = total_bits(o.transcript) == (n - 1) * width && o.transcript.size() == n - 1;
    for (const Message& m : o.transcript) n_ok = n_ok && m.to == alice && m.width == width;
    ++runs;
    if (!n_ok) ++violations;
  }
  return {4, "communication budget", violations == 0,
          std::to_string(runs) + " runs checked (3-bit forms, 2-bit, boxes, N-party N in {3,4,5,6,9,17}), " +
              std::to_string(violations) + " violations"};
}

/// 5. alpha beta gamma is identical across Protocol 1 and the three variants.
inline CriterionResult criterion_variants(const AcceptanceConfig& cfg) {
  std::uint64_t runs = 0, mismatches = 0;
  auto compare = [&](const Settings& st, const SharedRandomness& s) {
    const Sign p = run_protocol1(st, s).product();
    ++runs;
    if (run_v1prime(st, s).product() != p || run_v1doubleprime(st, s).product() != p ||
        run_v1tripleprime(st, s).product() != p) {
      ++mismatches;
    }
  };
  for (std::uint64_t t = 0; t < cfg.exact_runs(); ++t) {
    TrialRng rng(cfg.seed, 500, t);
    const SharedRandomness s = sample_shared(rng);
    compare({Angle(rng.uniform(0.0, two_pi)), Angle(rng.uniform(0.0, two_pi)), Angle(rng.uniform(0.0, two_pi))}, s);
  }
  // exact-zero configurations: settings on the quarter-turn grid
  const std::uint64_t random_mismatches = mismatches;
  for (Bit xi = 0; xi < 2; ++xi)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          compare({Angle(a * half_pi), Angle(b * half_pi), Angle(c * half_pi)},
                  acceptance_detail::zero_configuration(xi));
  return {5, "cross-variant exactness", mismatches == 0,
          std::to_string(runs) + " runs (" + std::to_string(cfg.exact_runs()) + " random, 128 exact-zero), " +
              std::to_string(random_mismatches) + " random and " + std::to_string(mismatches - random_mismatches) +
              " exact-zero mismatches"};
}

/// 6. Mixture coefficients: dual formulas, certified mass, reconstruction, C_3/2.
inline CriterionResult criterion_coefficients(const CoefficientTable& table) {
  using namespace acceptance_detail;
  const OddCosineSeries series = e1_series_coefficients(e1_terms_for_c32_remainder(1e-9));
  const std::vector<double> p = p_recursive(series, 999);
  double worst_rel = 0.0;
  for (std::int64_t x = 1; x <= 999; x += 2) {
    const double pr = p[static_cast<std::size_t>((x - 1) / 2)];
    worst_rel = std::max(worst_rel, std::abs(p_factorization(x, series) - pr) / pr);
  }
  const bool dual_ok = worst_rel <= 1e-12;

  double sum_p = 0.0;
  for (double v : table.p()) sum_p += v;
  const bool mass_ok = sum_p >= 1.0 - 1e-6 && table.tail_epsilon() < 1e-6;

  const auto rec = reconstruct_cos(series, p, 99);
  double worst_rec = 0.0;
  for (const auto& [y, v] : rec)
    if (y > 1) worst_rec = std::max(worst_rec, std::abs(v));
  const bool rec_ok = std::abs(rec.at(1) - 1.0) < 1e-12 && worst_rec < 1e-10;

  const TailCertificate cert = tail_epsilon(series, p);
  const bool c32_ok = cert.c_three_halves + cert.c32_remainder < 1.0 && cert.c32_remainder < 1e-9;

  return {6, "coefficient engine", dual_ok && mass_ok && rec_ok && c32_ok,
          "max rel |p_fact-p_rec| = " + fmt(worst_rel, 3) + ", sum p = " + fmt(sum_p, 10) + " (m_max " +
              std::to_string(table.m_max()) + ", eps " + fmt(table.tail_epsilon(), 3) + "), max |rec_{y>1}| = " +
              fmt(worst_rec, 3) + ", C3/2 = " + fmt(cert.c_three_halves, 10) + " + " + fmt(cert.c32_remainder, 3)};
}

/// 7. Box protocol: 8 boxes, same parity as Protocol 2, no signaling, cosine.
inline CriterionResult criterion_boxes(const AcceptanceConfig& cfg, const CoefficientTable& table) {
  using namespace acceptance_detail;
  // per-run structure and parity against the communication protocol
  BoxCheckAccumulator acc;
  const std::size_t parity_points = 10;
  for (std::size_t k = 0; k < parity_points; ++k) {
    const GridPoint g = split_sum(two_pi * static_cast<double>(k) / parity_points, 3, cfg.seed, 700 + k);
    acc.merge(check_boxes(g, table, cfg.plan(cfg.exact_runs() / parity_points, 700 + k)));
  }
  const bool structure_ok = acc.wrong_box_count == 0 && acc.parity_mismatches == 0;

  // no signaling: the PR box primitive, each endpoint against the other's input
  const std::uint64_t n = cfg.trials();
  double min_p = 1.0;
  for (int side = 0; side < 2; ++side)
    for (Bit own = 0; own < 2; ++own) {
      std::vector<std::vector<std::uint64_t>> t(2, std::vector<std::uint64_t>(2, 0));
      for (std::uint64_t i = 0; i < n; ++i) {
        TrialRng rng(cfg.seed, 710 + static_cast<std::uint64_t>(side * 2 + own), i);
        const Bit other = static_cast<Bit>(i & 1U);
        const PRBoxOutput o = side == 0 ? pr_box(own, other, rng) : pr_box(other, own, rng);
        t[other][side == 0 ? o.a : o.b] += 1;
      }
      min_p = std::min(min_p, chi_square_independence(t).p_value);
    }
  // and each party's output in the full protocol against the others' settings
  const std::array<std::array<double, 2>, 4> others{{{0.0, 0.0}, {1.0, 2.0}, {3.0, 0.5}, {5.5, 4.0}}};
  for (std::uint32_t party = 0; party < 3; ++party) {
    std::vector<std::vector<std::uint64_t>> t(others.size(), std::vector<std::uint64_t>(2, 0));
    for (std::size_t k = 0; k < others.size(); ++k) {
      std::array<Angle, 3> a{};
      a[party] = Angle(0.9);
      a[(party + 1) % 3] = Angle(others[k][0]);
      a[(party + 2) % 3] = Angle(others[k][1]);
      const Settings st{a[0], a[1], a[2]};
      for (std::uint64_t i = 0; i < n / others.size(); ++i) {
        TrialRng rng(cfg.seed, 720 + party * 8 + k, i);
        const SharedRandomness s = sample_shared(rng, table);
        const auto out = run_box_protocol(st, s, rng).outcome.outputs();
        t[k][to_bit(out[party])] += 1;
      }
    }
    min_p = std::min(min_p, chi_square_independence(t).p_value);
  }
  const bool signaling_ok = min_p > 0.01;

  // cosine reproduction
  const auto grid = uniform_grid(AcceptanceConfig::grid_points);
  const ExperimentContext ctx{&table};
  WorstRatio w;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const GridPoint g = split_sum(grid[k], 3, cfg.seed, k);
    const Estimate e = estimate_protocol(ProtocolChoice::boxes, g, ctx, cfg.plan(n, 750 + k)).correlation;
    w.add(e.mean - std::cos(grid[k]), 4.0 * e.std_error + 2.0 * table.tail_epsilon(), phi_label(grid[k]));
  }
  return {7, "PR-box protocol", structure_ok && signaling_ok && w.ok,
          std::to_string(acc.runs) + " runs, " + std::to_string(acc.box_uses) + " box uses, " +
              std::to_string(acc.wrong_box_count) + " wrong counts, " + std::to_string(acc.parity_mismatches) +
              " parity mismatches; min no-signaling p = " + fmt(min_p, 3) + "; worst |est-cos|/(4sigma+2eps) = " +
              fmt(w.ratio) + " at " + w.where};
}

/// 8. Detection model: 50% per party, 1/8 triple, conditional cosine.
inline CriterionResult criterion_detection(const AcceptanceConfig& cfg, const CoefficientTable& table) {
  using namespace acceptance_detail;
  const auto grid = uniform_grid(AcceptanceConfig::grid_points);
  const double scale = cfg.window_scale();
  WorstRatio rates, triple, corr;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const GridPoint g = split_sum(grid[k], 3, cfg.seed, k);
    const DetectionReport r =
        estimate_detection(g, table, DetectionSeed::v1tripleprime, cfg.plan(cfg.trials(), 800 + k));
    const std::string at = phi_label(grid[k]);
    for (std::size_t i = 0; i < 3; ++i) rates.add(r.rates[i] - 0.5, 0.002 * scale, at + " party " + std::to_string(i));
    triple.add(r.triple_rate - 0.125, 0.0015 * scale, at);
    const Estimate& c = r.conditional.correlation;
    corr.add(c.mean - std::cos(grid[k]), 4.0 * c.std_error + 2.0 * table.tail_epsilon(), at);
  }
  return {8, "detection loophole", rates.ok && triple.ok && corr.ok,
          "worst rate dev/window = " + fmt(rates.ratio) + " (" + rates.where + "), triple " + fmt(triple.ratio) +
              ", conditional corr " + fmt(corr.ratio) + " at " + corr.where};
}

/// 9. Azimuth densities of the half-sphere sum and of step 0.
inline CriterionResult criterion_densities(const AcceptanceConfig& cfg) {
  using namespace acceptance_detail;
  const std::uint64_t n = AcceptanceConfig::density_samples;
  const double phi_a = 0.9;
  const UnitVec3 axis = equatorial(phi_a);
  std::vector<double> sum_az;
  sum_az.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    TrialRng rng(cfg.seed, 900, i);
    const UnitVec3 l1 = sample_half_sphere(rng, axis), l2 = sample_half_sphere(rng, axis);
    double a = std::atan2(l1.y + l2.y, l1.x + l2.x);
    while (a < phi_a - half_pi) a += two_pi;
    while (a >= phi_a + half_pi) a -= two_pi;
    sum_az.push_back(a);
  }
  const double l1_sum = l1_histogram_distance(
      sum_az, [&](double x) { return 0.5 * std::cos(x - phi_a); }, phi_a - half_pi, phi_a + half_pi, 100);

  const double phi_B = 0.4;
  std::vector<double> phi_b;
  phi_b.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    TrialRng rng(cfg.seed, 901, i);
    const SharedRandomness s = sample_shared(rng);
    phi_b.push_back(step0(s.lambda1, s.lambda2, s.xi, Angle(phi_B)).phi_b.radians());
  }
  const double l1_step0 = l1_histogram_distance(
      phi_b, [&](double x) { return 0.25 * std::abs(std::sin(2.0 * (x + phi_B))); }, 0.0, two_pi, 100);
  return {9, "azimuth densities", l1_sum < 0.01 && l1_step0 < 0.01,
          "L1 half-sphere sum = " + fmt(l1_sum) + ", L1 step-0 phi_b = " + fmt(l1_step0) + " (100 bins, " +
              std::to_string(n) + " samples)"};
}

/// 10. Closed form, series and quadrature agree; sum x^2 e_x telescopes to 0.
inline CriterionResult criterion_oracles() {
  using namespace acceptance_detail;
  double worst = 0.0;
  const int points = 1000;
  for (int k = 0; k < points; ++k) {
    const double phi = two_pi * k / points;
    const double c = e1_closed(phi), s = e1_series(phi, 10000), q = e1_quadrature(phi);
    worst = std::max({worst, std::abs(c - s), std::abs(c - q), std::abs(s - q)});
  }
  double sum = 0.0, prev = INFINITY;
  bool shrinking = true;
  for (std::size_t n = 0; n <= 10000; ++n) {
    const double x = 2.0 * static_cast<double>(n) + 1.0;
    sum += x * x * e1_fourier(n);
    if (n == 10 || n == 100 || n == 1000 || n == 10000) {
      shrinking = shrinking && std::abs(sum) < prev;
      prev = std::abs(sum);
    }
  }
  const bool ok = worst < 1e-5 && std::abs(sum) < 1e-4 && shrinking;
  return {10, "oracle consistency", ok,
          "max pairwise oracle gap = " + fmt(worst, 3) + " over " + std::to_string(points) +
              " points, sum_{n<=1e4} (2n+1)^2 e = " + fmt(sum, 3)};
}

// ---------------------------------------------------------------------------

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "PASS" : "FAIL") << "  criterion " << (r.id < 10 ? " " : "") << r.id << "  " << r.name << ": "
    << r.detail;
  return s.str();
}

/// Runs every criterion in order, writing one line per criterion to `out`.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg, std::ostream& out) {
  const CoefficientTable table = e1_table(1e-6);
  const std::vector<std::function<CriterionResult()>> checks{
      [&] { return criterion_cosine(cfg, table); },      [&] { return criterion_e1(cfg); },
      [&] { return criterion_marginals(cfg, table); },   [&] { return criterion_bits(cfg, table); },
      [&] { return criterion_variants(cfg); },           [&] { return criterion_coefficients(table); },
      [&] { return criterion_boxes(cfg, table); },       [&] { return criterion_detection(cfg, table); },
      [&] { return criterion_densities(cfg); },          [] { return criterion_oracles(); },
  };
  std::vector<CriterionResult> results;
  for (const auto& check : checks) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = check();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << format_result(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace ghzsim
