#pragma once

// Fourier coefficients e_x (x odd) of the Protocol-1 correlation and the
// mixture weights p_x that turn sum_x p_x E(x phi) into cos(phi).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghzsim/rng.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

/// Coefficients of an even, pi-antiperiodic function sum_n e_{2n+1} cos((2n+1) phi).
///
/// `terms[n]` holds e_{2n+1} explicitly. Beyond the stored terms the series
/// is only known through `tail_constant`: |e_x| <= tail_constant * x^-4 for
/// every odd x >= 2 * terms.size() + 1. A zero tail constant means the series
/// is exactly the stored terms.
struct OddCosineSeries {
  std::vector<double> terms;
  double tail_constant = 0.0;

  /// e at odd harmonic x; zero past the stored terms.
  double at(std::int64_t x) const {
    const auto n = static_cast<std::size_t>((x - 1) / 2);
    return n < terms.size() ? terms[n] : 0.0;
  }

  double leading() const { return terms.empty() ? 0.0 : terms.front(); }

  /// First odd harmonic that is not stored.
  std::int64_t first_omitted() const { return 2 * static_cast<std::int64_t>(terms.size()) + 1; }
};

/// e_{2n+1} of the Protocol-1 correlation: (32/pi^2) / ((2n+1)^2 (4 - (2n+1)^2)).
inline double e1_fourier(std::size_t n) {
  const double x = 2.0 * static_cast<double>(n) + 1.0;
  return 32.0 / (pi * pi) / (x * x) / (4.0 - x * x);
}

/// The first `n_terms` coefficients of E_1 with a rigorous x^-4 tail constant.
inline OddCosineSeries e1_series_coefficients(std::size_t n_terms) {
  if (n_terms == 0) throw std::invalid_argument("e1_series_coefficients: need at least one term");
  OddCosineSeries s;
  s.terms.resize(n_terms);
  for (std::size_t n = 0; n < n_terms; ++n) s.terms[n] = e1_fourier(n);
  // |e_x| = (32/pi^2) / (x^2 (x^2 - 4)) <= (32/pi^2) / (1 - 4/x0^2) * x^-4 for x >= x0
  const double x0 = static_cast<double>(s.first_omitted());
  s.tail_constant = 32.0 / (pi * pi) / (1.0 - 4.0 / (x0 * x0));
  return s;
}

// ---------------------------------------------------------------------------
// Mixture conditions

enum class MixtureClause { leading_positive, higher_nonpositive, normalization, curvature };

inline const char* to_string(MixtureClause c) {
  switch (c) {
    case MixtureClause::leading_positive: return "e_1 > 0";
    case MixtureClause::higher_nonpositive: return "e_{2n+1} <= 0 for n >= 1";
    case MixtureClause::normalization: return "sum e_{2n+1} = 1";
    case MixtureClause::curvature: return "sum (2n+1)^2 e_{2n+1} >= 0";
  }
  return "?";
}

class ConditionViolated : public std::domain_error {
 public:
  ConditionViolated(MixtureClause clause, const std::string& detail)
      : std::domain_error(std::string("mixture condition violated: ") + to_string(clause) + " (" +
                          detail + ")"),
        clause_(clause) {}
  MixtureClause clause() const noexcept { return clause_; }

 private:
  MixtureClause clause_;
};

struct MixtureReport {
  bool ok = true;
  MixtureClause failed = MixtureClause::leading_positive;  // meaningful only when !ok
  std::string detail;
  double sum_e = 0.0;            // partial sum of e up to n_max
  double sum_x2_e = 0.0;         // partial sum of (2n+1)^2 e_{2n+1}; equals -E''(0)
};

/// Non-throwing form of verify_mixture_conditions.
inline MixtureReport check_mixture_conditions(const OddCosineSeries& e, std::size_t n_max,
                                              double tolerance = 1e-4) {
  if (n_max < 1) throw std::invalid_argument("check_mixture_conditions: n_max must be >= 1");
  MixtureReport r;
  auto fail = [&r](MixtureClause c, std::string d) {
    r.ok = false;
    r.failed = c;
    r.detail = std::move(d);
    return r;
  };
  if (!(e.leading() > 0.0)) return fail(MixtureClause::leading_positive, "e_1 = " + std::to_string(e.leading()));
  // sum from the small end to keep the long partial sums accurate
  for (std::size_t n = n_max + 1; n-- > 0;) {
    const double x = 2.0 * static_cast<double>(n) + 1.0;
    const double en = n < e.terms.size() ? e.terms[n] : 0.0;
    if (n >= 1 && en > 0.0) {
      return fail(MixtureClause::higher_nonpositive,
                  "e_" + std::to_string(2 * n + 1) + " = " + std::to_string(en));
    }
    r.sum_e += en;
    r.sum_x2_e += x * x * en;
  }
  if (std::abs(r.sum_e - 1.0) > tolerance) {
    return fail(MixtureClause::normalization, "partial sum = " + std::to_string(r.sum_e));
  }
  if (r.sum_x2_e < -tolerance) {
    return fail(MixtureClause::curvature, "partial sum = " + std::to_string(r.sum_x2_e));
  }
  return r;
}

/// Checks the sufficient conditions for cos(phi) to be a convex mixture of the
/// odd harmonics E((2m+1) phi), over the first n_max + 1 coefficients.
/// Throws ConditionViolated naming the first failing clause.
inline MixtureReport verify_mixture_conditions(const OddCosineSeries& e, std::size_t n_max,
                                               double tolerance = 1e-4) {
  MixtureReport r = check_mixture_conditions(e, n_max, tolerance);
  if (!r.ok) throw ConditionViolated(r.failed, r.detail);
  return r;
}

// ---------------------------------------------------------------------------
// Mixture weights

/// p_x for odd x <= m_max by the divisor recursion
///   p_1 = 1/e_1,  p_x = -(1/e_1) sum_{d | x, d > 1} e_d p_{x/d}.
/// Returned vector is indexed by m with x = 2m + 1.
inline std::vector<double> p_recursive(const OddCosineSeries& e, std::int64_t m_max) {
  if (m_max < 1) throw std::invalid_argument("p_recursive: m_max must be >= 1");
  const double e1 = e.leading();
  if (!(e1 > 0.0)) throw ConditionViolated(MixtureClause::leading_positive, "e_1 <= 0");
  const auto count = static_cast<std::size_t>((m_max - 1) / 2 + 1);
  std::vector<double> p(count, 0.0);
  std::vector<double> acc(count, 0.0);  // acc[m] = sum_{d|x, d>1} e_d p_{x/d} so far
  for (std::size_t k = 0; k < count; ++k) {
    const std::int64_t xk = 2 * static_cast<std::int64_t>(k) + 1;
    p[k] = k == 0 ? 1.0 / e1 : -acc[k] / e1;
    for (std::int64_t d = 3; xk * d <= m_max; d += 2) {
      acc[static_cast<std::size_t>((xk * d - 1) / 2)] += e.at(d) * p[k];
    }
  }
  return p;
}

namespace detail {

// Visits every unordered factorization of odd x into odd factors >= smallest,
// passing the factor multiplicities.
template <typename Visit>
void for_each_odd_factorization(std::int64_t x, std::int64_t smallest,
                                std::map<std::int64_t, int>& counts, Visit&& visit) {
  if (x == 1) {
    visit(counts);
    return;
  }
  for (std::int64_t d = smallest; d <= x; d += 2) {
    if (x % d != 0) continue;
    ++counts[d];
    for_each_odd_factorization(x / d, d, counts, visit);
    if (--counts[d] == 0) counts.erase(d);
  }
}

}  // namespace detail

/// p_x for one odd x by the closed multinomial form
///   p_x = (1/e_1) sum over 3^l3 5^l5 ... = x of
///         (l3 + l5 + ...)! / (l3! l5! ...) prod_d (-e_d / e_1)^{l_d}.
/// Independent of p_recursive; the two are used as cross-oracles.
inline double p_factorization(std::int64_t x, const OddCosineSeries& e) {
  if (x < 1 || x % 2 == 0) throw std::invalid_argument("p_factorization: index must be odd and >= 1");
  const double e1 = e.leading();
  double total = 0.0;
  std::map<std::int64_t, int> counts;
  detail::for_each_odd_factorization(x, 3, counts, [&](const std::map<std::int64_t, int>& c) {
    int length = 0;
    double term = 1.0;
    for (auto [d, l] : c) {
      length += l;
      term *= std::pow(-e.at(d) / e1, l) / std::tgamma(l + 1.0);
    }
    total += std::tgamma(length + 1.0) * term;
  });
  return total / e1;
}

// ---------------------------------------------------------------------------
// Tail certificate

class DivergentMixture : public std::domain_error {
 public:
  explicit DivergentMixture(double c32)
      : std::domain_error("C_3/2 = " + std::to_string(c32) + " >= 1: mixture weights not summable"),
        c32_(c32) {}
  double c_three_halves() const noexcept { return c32_; }

 private:
  double c32_;
};

struct TailCertificate {
  double epsilon = 0.0;          // certified upper bound on sum_{x > m_max} p_x
  double c_three_halves = 0.0;   // sum_{n>=1} (2n+1)^{3/2} (-e_{2n+1}) / e_1 over stored terms
  double c32_remainder = 0.0;    // bound on the part of C_3/2 from unstored terms
  double analytic_bound = 0.0;   // tail bound from p_x <= C/(1-C)/e_1 x^{-3/2}
  double mass_bound = 0.0;       // tail bound from sum_x p_x = 1/E(0)
  double partial_sum = 0.0;      // sum of the stored p
};

/// Certifies how much mixture mass lies beyond the stored weights `p`.
///
/// Two bounds are computed and the smaller is kept:
///  - p_x <= (1/e_1) C/(1-C) x^{-3/2} for x > 1, where C >= C_3/2 includes the
///    remainder of the unstored e terms, summed with an integral tail;
///  - sum_x p_x = 1/E(0) exactly once the mixture converges, so the tail is
///    1/E(0) - sum_{stored} p, with E(0) bracketed from the stored terms and
///    the tail constant, plus a floating-point allowance.
/// Throws DivergentMixture if C_3/2 (with remainder) is not below 1.
inline TailCertificate tail_epsilon(const OddCosineSeries& e, std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("tail_epsilon: no stored weights");
  const double e1 = e.leading();
  TailCertificate cert;

  // C_3/2, smallest terms first
  double c32 = 0.0;
  for (std::size_t n = e.terms.size(); n-- > 1;) {
    const double x = 2.0 * static_cast<double>(n) + 1.0;
    c32 += std::pow(x, 1.5) * (-e.terms[n]);
  }
  cert.c_three_halves = c32 / e1;
  const double x0 = static_cast<double>(e.first_omitted());
  if (e.tail_constant > 0.0) {
    // sum_{odd x >= x0} x^{-5/2} <= (1/2) int_{x0-2}^inf t^{-5/2} dt
    cert.c32_remainder = e.tail_constant / e1 * (1.0 / 3.0) * std::pow(x0 - 2.0, -1.5);
  }
  const double c_upper = cert.c_three_halves + cert.c32_remainder;
  if (!(c_upper < 1.0)) throw DivergentMixture(c_upper);

  const auto m_max = static_cast<double>(2 * (p.size() - 1) + 1);
  // sum_{odd x > m_max} x^{-3/2} <= (1/2) int_{m_max}^inf t^{-3/2} dt = m_max^{-1/2}
  cert.analytic_bound = c_upper / (1.0 - c_upper) / e1 / std::sqrt(m_max);

  double sum_p = 0.0;
  for (std::size_t k = p.size(); k-- > 0;) sum_p += p[k];
  cert.partial_sum = sum_p;
  double sum_e = 0.0;
  for (std::size_t n = e.terms.size(); n-- > 0;) sum_e += e.terms[n];
  // |sum_{odd x >= x0} e_x| <= K (1/2) int_{x0-2}^inf t^{-4} dt
  const double e_tail = e.tail_constant > 0.0 ? e.tail_constant / 6.0 * std::pow(x0 - 2.0, -3.0) : 0.0;
  const double rounding = 1e-12 + 8.0 * std::numeric_limits<double>::epsilon() *
                                      static_cast<double>(p.size() + e.terms.size());
  cert.mass_bound = std::max(0.0, 1.0 / (sum_e - e_tail) - sum_p) + rounding;

  cert.epsilon = std::max(0.0, std::min(cert.analytic_bound, cert.mass_bound));
  return cert;
}

/// Coefficients of the harmonic expansion of cos(phi) in E_1((2m+1) phi):
/// for each odd y <= y_max, sum_{x z = y} p_x e_z. Should be 1 at y = 1 and 0
/// elsewhere. Requires y_max within the stored weights.
inline std::map<std::int64_t, double> reconstruct_cos(const OddCosineSeries& e, std::span<const double> p,
                                                      std::int64_t y_max) {
  if (y_max > static_cast<std::int64_t>(2 * p.size() - 1)) {
    throw std::invalid_argument("reconstruct_cos: y_max exceeds stored weights");
  }
  std::map<std::int64_t, double> out;
  for (std::int64_t y = 1; y <= y_max; y += 2) {
    double s = 0.0;
    for (std::int64_t x = 1; x <= y; x += 2) {
      if (y % x == 0) s += p[static_cast<std::size_t>((x - 1) / 2)] * e.at(y / x);
    }
    out[y] = s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Table

/// e and p together with the certified truncation of p. Immutable once built,
/// so one table can be shared by all trial workers.
class CoefficientTable {
 public:
  CoefficientTable(OddCosineSeries e, std::int64_t m_max) : e_(std::move(e)) {
    if (m_max < 1) throw std::invalid_argument("CoefficientTable: m_max must be >= 1");
    if (m_max % 2 == 0) --m_max;
    p_ = p_recursive(e_, m_max);
    finish();
  }

  const OddCosineSeries& e() const noexcept { return e_; }
  std::span<const double> p() const noexcept { return p_; }
  std::int64_t m_max() const noexcept { return 2 * static_cast<std::int64_t>(p_.size()) - 1; }
  double tail_epsilon() const noexcept { return cert_.epsilon; }
  double c_three_halves() const noexcept { return cert_.c_three_halves; }
  const TailCertificate& certificate() const noexcept { return cert_; }

  double e_at(std::int64_t x) const { return e_.at(x); }
  double p_at(std::int64_t x) const {
    const auto m = static_cast<std::size_t>((x - 1) / 2);
    return x >= 1 && x % 2 == 1 && m < p_.size() ? p_[m] : 0.0;
  }

  /// Draws an odd harmonic index M with P(M = x) = p_x; the uncertified
  /// residual 1 - sum p is folded into M = 1.
  std::int64_t sample_M(TrialRng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(higher_cdf_.begin(), higher_cdf_.end(), u);
    if (it == higher_cdf_.end()) return 1;
    return 2 * static_cast<std::int64_t>(it - higher_cdf_.begin()) + 3;
  }

 private:
  void finish() {
    cert_ = ghzsim::tail_epsilon(e_, p_);
    higher_cdf_.resize(p_.size() - 1);
    double c = 0.0;
    for (std::size_t k = 1; k < p_.size(); ++k) higher_cdf_[k - 1] = (c += p_[k]);
  }

  OddCosineSeries e_;
  std::vector<double> p_;
  std::vector<double> higher_cdf_;  // cumulative p_3, p_3 + p_5, ...
  TailCertificate cert_;
};

inline std::int64_t sample_M(const CoefficientTable& table, TrialRng& rng) { return table.sample_M(rng); }

/// Number of E_1 terms needed before the unstored part of C_3/2 is below `bound`.
inline std::size_t e1_terms_for_c32_remainder(double bound) {
  std::size_t n = 1024;
  while (true) {
    const double x0 = 2.0 * static_cast<double>(n) + 1.0;
    const double k = 32.0 / (pi * pi) / (1.0 - 4.0 / (x0 * x0));
    if (k / e1_fourier(0) / 3.0 * std::pow(x0 - 2.0, -1.5) < bound) return n;
    n *= 2;
  }
}

/// E_1 table with m_max fixed by the caller.
inline CoefficientTable e1_table_with_m_max(std::int64_t m_max) {
  return CoefficientTable(e1_series_coefficients(e1_terms_for_c32_remainder(1e-9)), m_max);
}

/// E_1 table with the smallest odd m_max whose certified tail is below
/// `target_epsilon`. Throws if no m_max up to `limit` suffices.
inline CoefficientTable e1_table(double target_epsilon = 1e-6, std::int64_t limit = 200001) {
  if (!(target_epsilon > 0.0)) throw std::invalid_argument("e1_table: epsilon must be positive");
  auto series = e1_series_coefficients(e1_terms_for_c32_remainder(1e-9));
  const std::vector<double> all = p_recursive(series, limit);
  // the certificate is monotone in m_max, so bisect over the stored prefix
  std::size_t lo = 1, hi = all.size();
  if (tail_epsilon(series, all).epsilon >= target_epsilon) {
    throw std::runtime_error("e1_table: tail not certified below target within limit");
  }
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (tail_epsilon(series, std::span<const double>(all.data(), mid)).epsilon < target_epsilon) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return CoefficientTable(std::move(series), 2 * static_cast<std::int64_t>(lo) - 1);
}

}  // namespace ghzsim
