#pragma once

// The subcommands behind the `ghzsim` executable. Each writes CSV to a
// stream and throws on invalid configuration, so the same code is driven by
// the CLI and by the tests. Angles are read and written in units of pi.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ghzsim/acceptance.hpp"
#include "ghzsim/coefficients.hpp"
#include "ghzsim/csv.hpp"
#include "ghzsim/detection.hpp"
#include "ghzsim/experiments.hpp"
#include "ghzsim/oracles.hpp"

namespace ghzsim {

/// Invalid command-line configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline DetectionSeed parse_detection_seed(std::string_view s) {
  for (DetectionSeed d :
       {DetectionSeed::protocol1, DetectionSeed::v1prime, DetectionSeed::v1doubleprime, DetectionSeed::v1tripleprime})
    if (to_string(d) == s) return d;
  throw ConfigError("unknown detection seed '" + std::string(s) + "'");
}

/// Grid and sampling options shared by sweep, detect and boxes.
struct RunConfig {
  std::vector<std::string> phi;  // sums "0.25" or settings "a:b:c", units of pi; empty = uniform grid
  std::size_t grid = 25;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  unsigned lanes = default_lanes();
  std::size_t n_parties = 3;
  double epsilon = 1e-6;
};

struct SweepConfig : RunConfig {
  ProtocolChoice protocol = ProtocolChoice::p2;
  DetectionSeed detection_seed = DetectionSeed::v1tripleprime;
};

namespace command_detail {

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + s + "'");
  return v;
}

/// A grid point with its sum in units of pi, as printed in the phi column.
struct PiGridPoint {
  double phi_pi = 0.0;
  GridPoint point;
};

}  // namespace command_detail

/// Grid points of a run: explicit --phi entries, or `grid` sums evenly
/// spaced over [0, 2pi]. A sum is split at random over the parties; a
/// colon-separated entry gives every party's setting.
inline std::vector<command_detail::PiGridPoint> build_grid(const RunConfig& cfg) {
  using command_detail::parse_real;
  if (cfg.trials < 1) throw ConfigError("--trials must be at least 1");
  if (cfg.n_parties < 3) throw ConfigError("--n-parties must be at least 3");
  std::vector<command_detail::PiGridPoint> out;
  if (cfg.phi.empty()) {
    if (cfg.grid < 1) throw ConfigError("--grid must be at least 1");
    const auto sums = uniform_grid(cfg.grid);
    for (std::size_t k = 0; k < sums.size(); ++k) {
      const double phi_pi = cfg.grid > 1 ? 2.0 * static_cast<double>(k) / static_cast<double>(cfg.grid - 1) : 0.0;
      out.push_back({phi_pi, split_sum(sums[k], cfg.n_parties, cfg.seed, k)});
    }
    return out;
  }
  for (std::size_t k = 0; k < cfg.phi.size(); ++k) {
    const std::string& spec = cfg.phi[k];
    if (spec.find(':') == std::string::npos) {
      const double phi_pi = parse_real(spec);
      out.push_back({phi_pi, split_sum(phi_pi * pi, cfg.n_parties, cfg.seed, k)});
      continue;
    }
    std::vector<double> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(parse_real(item));
    if (spec.back() == ':' || parts.size() != cfg.n_parties) {
      throw ConfigError("--phi '" + spec + "' must list " + std::to_string(cfg.n_parties) + " settings");
    }
    GridPoint g;
    double sum_pi = 0.0;
    for (double v : parts) {
      g.settings.push_back(Angle::from_pi_units(v));
      sum_pi += v;
    }
    g.phi = sum_pi * pi;
    out.push_back({sum_pi, std::move(g)});
  }
  return out;
}

inline void check_protocol_parties(ProtocolChoice p, std::size_t n_parties) {
  if (p != ProtocolChoice::nparty && n_parties != 3) {
    throw ConfigError("--n-parties applies only to the nparty protocol");
  }
}

// ---------------------------------------------------------------------------

/// Correlation sweep: columns phi, estimate, stderr, n, oracle_e1,
/// oracle_cos, protocol, seed. For `detect` the estimate is conditioned on
/// all parties detecting and n counts those trials.
inline void cmd_sweep(const SweepConfig& cfg, std::ostream& csv) {
  check_protocol_parties(cfg.protocol, cfg.n_parties);
  const auto grid = build_grid(cfg);
  std::optional<CoefficientTable> table;
  if (uses_mixture(cfg.protocol)) table.emplace(e1_table(cfg.epsilon));
  const ExperimentContext ctx{table ? &*table : nullptr, cfg.detection_seed};

  CsvWriter w(csv, {"phi", "estimate", "stderr", "n", "oracle_e1", "oracle_cos", "protocol", "seed"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& [phi_pi, g] = grid[k];
    const CorrelationReport r = estimate_protocol(cfg.protocol, g, ctx, {cfg.trials, cfg.seed, k, cfg.lanes});
    w.row(phi_pi, r.correlation.mean, r.correlation.std_error, r.correlation.n, e1_closed(g.phi), std::cos(g.phi),
          to_string(cfg.protocol), cfg.seed);
  }
}

struct CoeffsConfig {
  std::optional<std::int64_t> m_max;  // otherwise the smallest m_max certifying epsilon
  double epsilon = 1e-6;
};

/// Mixture table: columns index, e, p, cumulative_p, one row per odd index
/// up to m_max. Writes the certified tail epsilon and C_3/2 to `summary`.
inline CoefficientTable cmd_coeffs(const CoeffsConfig& cfg, std::ostream& csv, std::ostream& summary) {
  std::optional<CoefficientTable> table;
  if (cfg.m_max) {
    const std::int64_t m = *cfg.m_max;
    if (m < 1) throw ConfigError("--m-max must be a positive odd integer, got " + std::to_string(m));
    if (m % 2 == 0) throw ConfigError("--m-max must be odd, got " + std::to_string(m));
    table.emplace(e1_table_with_m_max(m));
  } else {
    if (!(cfg.epsilon > 0.0)) throw ConfigError("--epsilon must be positive");
    table.emplace(e1_table(cfg.epsilon));
  }
  CsvWriter w(csv, {"index", "e", "p", "cumulative_p"});
  double cumulative = 0.0;
  for (std::int64_t x = 1; x <= table->m_max(); x += 2) {
    cumulative += table->p_at(x);
    w.row(x, table->e_at(x), table->p_at(x), cumulative);
  }
  const TailCertificate& c = table->certificate();
  summary << "m_max = " << table->m_max() << "\n"
          << "tail_epsilon = " << format_real(c.epsilon) << "\n"
          << "c_three_halves = " << format_real(c.c_three_halves) << " (remainder bound "
          << format_real(c.c32_remainder) << ")\n"
          << "sum_p = " << format_real(cumulative) << "\n";
  return std::move(*table);
}

/// Detection sweep: columns phi, detect_rate_a, detect_rate_b,
/// detect_rate_c, triple_rate, conditional_corr, stderr, n, where stderr and
/// n refer to the conditional correlation.
inline void cmd_detect(const SweepConfig& cfg, std::ostream& csv) {
  if (cfg.n_parties != 3) throw ConfigError("detect is a three-party model");
  const auto grid = build_grid(cfg);
  const CoefficientTable table = e1_table(cfg.epsilon);
  CsvWriter w(csv, {"phi", "detect_rate_a", "detect_rate_b", "detect_rate_c", "triple_rate", "conditional_corr",
                    "stderr", "n"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& [phi_pi, g] = grid[k];
    const DetectionReport r = estimate_detection(g, table, cfg.detection_seed, {cfg.trials, cfg.seed, k, cfg.lanes});
    const Estimate& c = r.conditional.correlation;
    w.row(phi_pi, r.rates[0], r.rates[1], r.rates[2], r.triple_rate, c.mean, c.std_error, c.n);
  }
}

/// PR-box sweep: columns phi, estimate, stderr, n, oracle_cos,
/// pr_boxes_per_run, parity_mismatches (against Protocol 2), seed.
inline void cmd_boxes(const RunConfig& cfg, std::ostream& csv) {
  if (cfg.n_parties != 3) throw ConfigError("boxes is a three-party protocol");
  const auto grid = build_grid(cfg);
  const CoefficientTable table = e1_table(cfg.epsilon);
  CsvWriter w(csv, {"phi", "estimate", "stderr", "n", "oracle_cos", "pr_boxes_per_run", "parity_mismatches", "seed"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& [phi_pi, g] = grid[k];
    const BoxCheckAccumulator acc = check_boxes(g, table, {cfg.trials, cfg.seed, k, cfg.lanes});
    const Estimate e = acc.correlation.estimate();
    w.row(phi_pi, e.mean, e.std_error, e.n, std::cos(g.phi),
          static_cast<double>(acc.box_uses) / static_cast<double>(acc.runs), acc.parity_mismatches, cfg.seed);
  }
}

/// Runs the acceptance suite; returns true iff every criterion passed.
inline bool cmd_verify(const AcceptanceConfig& cfg, std::ostream& report) {
  const auto results = run_acceptance(cfg, report);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  report << passed << "/" << results.size() << " criteria passed\n";
  return passed == results.size();
}

}  // namespace ghzsim
