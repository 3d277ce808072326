#pragma once

// Estimates of +/-1 observables and the goodness-of-fit tests used to check
// the samplers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ghzsim {

/// Monte-Carlo mean of a +/-1 observable. std_error = sqrt((1 - mean^2) / n).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

/// Running sum of +/-1 values. Integer state, so merging partial sums from
/// any partition of the trials gives bit-identical results.
struct SignAccumulator {
  std::int64_t sum = 0;
  std::uint64_t n = 0;

  void add(int s) noexcept {
    sum += s;
    ++n;
  }
  void merge(const SignAccumulator& o) noexcept {
    sum += o.sum;
    n += o.n;
  }
  Estimate estimate() const noexcept {
    if (n == 0) return {};
    const double nn = static_cast<double>(n);
    const double mean = static_cast<double>(sum) / nn;
    return {mean, std::sqrt(std::max(0.0, 1.0 - mean * mean) / nn), n};
  }
};

/// Fraction of trials in which an event happened, with binomial std error.
struct RateAccumulator {
  std::uint64_t hits = 0;
  std::uint64_t n = 0;

  void add(bool hit) noexcept {
    hits += hit ? 1 : 0;
    ++n;
  }
  void merge(const RateAccumulator& o) noexcept {
    hits += o.hits;
    n += o.n;
  }
  double rate() const noexcept { return n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0; }
  double std_error() const noexcept {
    if (n == 0) return 0.0;
    const double r = rate();
    return std::sqrt(r * (1.0 - r) / static_cast<double>(n));
  }
};

// ---------------------------------------------------------------------------
// Distribution tests

class EmptySample : public std::invalid_argument {
 public:
  EmptySample() : std::invalid_argument("empty sample") {}
};

struct FitResult {
  double ks = 0.0;  // sup |F_n - F|
  double l1 = 0.0;  // sum over bins |count/n - reference mass|
};

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
inline double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptySample();
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - f, f - di / n});
  }
  return d;
}

/// L1 distance between the normalized histogram of `samples` over
/// [lo, hi) and the reference density integrated over the same bins.
inline double l1_histogram_distance(std::span<const double> samples, const std::function<double(double)>& density,
                                    double lo, double hi, std::size_t bins) {
  if (samples.empty()) throw EmptySample();
  if (!(hi > lo) || bins == 0) throw std::invalid_argument("l1_histogram_distance: bad binning");
  std::vector<std::uint64_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : samples) {
    if (x < lo || x >= hi) continue;  // outside the window counts as pure mismatch below
    auto k = static_cast<std::size_t>((x - lo) / width);
    counts[std::min(k, bins - 1)] += 1;
  }
  using boost::math::quadrature::gauss_kronrod;
  const double n = static_cast<double>(samples.size());
  double l1 = 0.0, inside = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double a = lo + width * static_cast<double>(k);
    const double mass = gauss_kronrod<double, 31>::integrate(density, a, a + width, 8, 1e-12);
    const double frac = static_cast<double>(counts[k]) / n;
    inside += frac;
    l1 += std::abs(frac - mass);
  }
  return l1 + (1.0 - inside);
}

/// KS statistic against `cdf` and L1 histogram distance against `density`.
inline FitResult ks_and_l1(std::span<const double> samples, const std::function<double(double)>& cdf,
                           const std::function<double(double)>& density, double lo, double hi, std::size_t bins) {
  return {ks_statistic(samples, cdf), l1_histogram_distance(samples, density, lo, hi, bins)};
}

/// Limiting Kolmogorov distribution P(sqrt(n) D_n <= x).
inline double kolmogorov_cdf(double x) noexcept {
  if (x <= 0.0) return 0.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * s;
}

/// Critical value of D_n at significance alpha (asymptotic, n large).
inline double ks_critical_value(std::size_t n, double alpha) {
  double lo = 0.1, hi = 5.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - kolmogorov_cdf(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(n));
}

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson goodness-of-fit of `observed` counts against `expected` probabilities.
inline ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw std::invalid_argument("chi_square_gof: need matching category lists of size >= 2");
  }
  double n = 0.0;
  for (auto c : observed) n += static_cast<double>(c);
  if (n == 0.0) throw EmptySample();
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * expected[i];
    const double d = static_cast<double>(observed[i]) - e;
    r.statistic += d * d / e;
  }
  r.dof = static_cast<double>(observed.size() - 1);
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

/// Pearson test of independence on a rows x cols contingency table.
inline ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2 || table[0].size() < 2) throw std::invalid_argument("chi_square_independence: table too small");
  const std::size_t cols = table[0].size();
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double n = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto c = static_cast<double>(table[i][j]);
      row_sum[i] += c;
      col_sum[j] += c;
      n += c;
    }
  }
  if (n == 0.0) throw EmptySample();
  ChiSquareResult r;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_sum[i] * col_sum[j] / n;
      if (e == 0.0) continue;
      const double d = static_cast<double>(table[i][j]) - e;
      r.statistic += d * d / e;
    }
  }
  r.dof = static_cast<double>((rows - 1) * (cols - 1));
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

}  // namespace ghzsim
