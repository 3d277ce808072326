#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ghzsim/coefficients.hpp"
#include "ghzsim/oracles.hpp"
#include "ghzsim/stats.hpp"

using namespace ghzsim;

// Reference values from tests/oracles/freeze_values.py (mpmath, 40 digits).
namespace ref {
constexpr double e1 = 1.0807592921849362;
constexpr double e3 = -0.072050619478995749;
constexpr double p1 = 0.92527541260212737;
constexpr double p3 = 0.061685027506808491;
constexpr double p5 = 0.0052872880720121564;
constexpr double p9 = 0.0045573930856401079;
constexpr double p15 = 0.00076079529723975825;
constexpr double p27 = 0.00033874875808972449;
constexpr double p45 = 8.3704958466078245e-5;
constexpr double sum_p_to_99 = 0.99997341602786086;
constexpr double c32 = 0.48045294118826721;
}  // namespace ref

namespace {

const OddCosineSeries& e1_series_small() {
  static const OddCosineSeries s = e1_series_coefficients(1024);
  return s;
}

bool is_prime(std::int64_t x) {
  if (x < 2) return false;
  for (std::int64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

}  // namespace

TEST(E1Fourier, LeadingCoefficients) {
  EXPECT_NEAR(e1_fourier(0), 32.0 / (3.0 * pi * pi), 1e-15);
  EXPECT_NEAR(e1_fourier(0), ref::e1, 1e-15);
  EXPECT_NEAR(e1_fourier(1), -32.0 / (45.0 * pi * pi), 1e-16);
  EXPECT_NEAR(e1_fourier(1), ref::e3, 1e-16);
}

TEST(E1Fourier, SumIsOne) {
  double s = 0.0;
  for (std::size_t n = 10001; n-- > 0;) s += e1_fourier(n);
  EXPECT_NEAR(s, 1.0, 1e-6);
}

TEST(MixtureConditions, E1Satisfies) {
  const auto series = e1_series_coefficients(10001);
  const MixtureReport r = verify_mixture_conditions(series, 10000);
  EXPECT_TRUE(r.ok);
  EXPECT_NEAR(r.sum_e, 1.0, 1e-9);
  // sum (2n+1)^2 e_{2n+1} telescopes to 0; the truncated sum is the positive tail
  EXPECT_LT(std::abs(r.sum_x2_e), 1e-4);
  EXPECT_GE(r.sum_x2_e, 0.0);
}

TEST(MixtureConditions, CosineIsItsOwnMixture) {
  OddCosineSeries s{{1.0}, 0.0};
  EXPECT_TRUE(verify_mixture_conditions(s, 10).ok);
}

TEST(MixtureConditions, PositiveHigherCoefficientRejected) {
  OddCosineSeries s{{0.9, 0.1}, 0.0};
  try {
    verify_mixture_conditions(s, 5);
    FAIL() << "expected ConditionViolated";
  } catch (const ConditionViolated& e) {
    EXPECT_EQ(e.clause(), MixtureClause::higher_nonpositive);
  }
}

TEST(MixtureConditions, OtherClauses) {
  EXPECT_EQ(check_mixture_conditions(OddCosineSeries{{-1.0}, 0.0}, 2).failed, MixtureClause::leading_positive);
  EXPECT_EQ(check_mixture_conditions(OddCosineSeries{{0.5, -0.1}, 0.0}, 2).failed, MixtureClause::normalization);
  // e1 = 1.5, e3 = -0.5: sum 1, but 1.5 - 9 * 0.5 < 0
  EXPECT_EQ(check_mixture_conditions(OddCosineSeries{{1.5, -0.5}, 0.0}, 2).failed, MixtureClause::curvature);
}

TEST(PRecursive, KnownValues) {
  const auto p = p_recursive(e1_series_small(), 45);
  EXPECT_NEAR(p[0], ref::p1, 1e-15);
  EXPECT_NEAR(p[0], 3.0 * pi * pi / 32.0, 1e-15);
  EXPECT_NEAR(p[1], ref::p3, 1e-16);
  EXPECT_NEAR(p[2], ref::p5, 1e-17);
  EXPECT_NEAR(p[4], ref::p9, 1e-17);
  EXPECT_NEAR(p[7], ref::p15, 1e-17);
  EXPECT_NEAR(p[13], ref::p27, 1e-17);
  EXPECT_NEAR(p[22], ref::p45, 1e-18);
}

TEST(PRecursive, PrimeIndexIsSingleTerm) {
  const auto& e = e1_series_small();
  const auto p = p_recursive(e, 199);
  const double e1 = e.leading();
  for (std::int64_t x = 3; x <= 199; x += 2) {
    if (!is_prime(x)) continue;
    EXPECT_NEAR(p[static_cast<std::size_t>((x - 1) / 2)], -e.at(x) / (e1 * e1), 1e-18) << x;
  }
}

TEST(PRecursive, NonNegativeAndPartialSumsMonotone) {
  const auto p = p_recursive(e1_series_small(), 2047);
  double s = 0.0;
  for (double v : p) {
    EXPECT_GE(v, 0.0);
    s += v;
    EXPECT_LE(s, 1.0 + 1e-9);
  }
}

TEST(PFactorization, NineHasTwoFactorizations) {
  const auto& e = e1_series_small();
  const double e1 = e.leading();
  const double expected = (1.0 / e1) * (std::pow(-e.at(3) / e1, 2) + (-e.at(9) / e1));
  EXPECT_NEAR(p_factorization(9, e), expected, 1e-17);
  EXPECT_NEAR(p_factorization(9, e), ref::p9, 1e-17);
  EXPECT_DOUBLE_EQ(p_factorization(1, e), 1.0 / e1);
}

TEST(PFactorization, AgreesWithRecursion) {
  const auto& e = e1_series_small();
  const auto p = p_recursive(e, 999);
  for (std::int64_t x = 1; x <= 999; x += 2) {
    const double pr = p[static_cast<std::size_t>((x - 1) / 2)];
    EXPECT_LE(std::abs(p_factorization(x, e) - pr), 1e-12 * std::max(1.0, pr)) << x;
    EXPECT_LE(std::abs(p_factorization(x, e) - pr), 1e-12 * pr + 1e-300) << "relative, x = " << x;
  }
}

TEST(PFactorization, RejectsEvenIndex) { EXPECT_THROW(p_factorization(4, e1_series_small()), std::invalid_argument); }

TEST(TailEpsilon, E1ThreeHalvesConstant) {
  const auto series = e1_series_coefficients(e1_terms_for_c32_remainder(1e-9));
  const auto p = p_recursive(series, 99);
  const TailCertificate c = tail_epsilon(series, p);
  EXPECT_LT(c.c32_remainder, 1e-9);
  EXPECT_LT(c.c_three_halves, 1.0);
  EXPECT_NEAR(c.c_three_halves, ref::c32, 2e-9);
  EXPECT_NEAR(c.partial_sum, ref::sum_p_to_99, 1e-14);
  // the true tail beyond 99 is 1 - sum
  EXPECT_GE(c.epsilon, 1.0 - ref::sum_p_to_99);
  EXPECT_LT(c.epsilon, 1.0 - ref::sum_p_to_99 + 1e-8);
}

TEST(TailEpsilon, SingleAtomHasNoTail) {
  OddCosineSeries s{{1.0}, 0.0};
  for (std::int64_t m : {1, 3, 51}) {
    const auto p = p_recursive(s, m);
    EXPECT_EQ(tail_epsilon(s, p).epsilon, 0.0) << m;
  }
}

TEST(TailEpsilon, DivergentMixtureThrows) {
  // C_3/2 = 3^{1.5} * 0.3 / 0.7 > 1
  OddCosineSeries s{{0.7, -0.3}, 0.0};
  const auto p = p_recursive(s, 9);
  EXPECT_THROW(tail_epsilon(s, p), DivergentMixture);
}

TEST(E1Table, CertifiedBelowOneInAMillion) {
  const CoefficientTable t = e1_table(1e-6);
  EXPECT_LT(t.tail_epsilon(), 1e-6);
  double s = 0.0;
  for (double v : t.p()) s += v;
  EXPECT_GE(s, 1.0 - 1e-6);
  EXPECT_LE(s, 1.0 + 1e-9);
  // smallest such m_max: the previous odd index is not certified
  const auto& e = t.e();
  const auto shorter = std::span<const double>(t.p().data(), t.p().size() - 1);
  EXPECT_GE(tail_epsilon(e, shorter).epsilon, 1e-6);
}

TEST(E1Table, ResidualMassGoesToFirstHarmonic) {
  const CoefficientTable t = e1_table_with_m_max(1);
  EXPECT_EQ(t.m_max(), 1);
  TrialRng r(0, 0, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(t.sample_M(r), 1);
}

TEST(ReconstructCos, KroneckerDeltaOnFirstHarmonic) {
  const CoefficientTable t = e1_table_with_m_max(99);
  const auto c = reconstruct_cos(t.e(), t.p(), 99);
  EXPECT_NEAR(c.at(1), 1.0, 2e-16);
  EXPECT_NEAR(c.at(3), 0.0, 1e-12);
  for (std::int64_t y = 3; y <= 99; y += 2) EXPECT_LT(std::abs(c.at(y)), 1e-10) << y;
  EXPECT_THROW(reconstruct_cos(t.e(), t.p(), 101), std::invalid_argument);
}

TEST(ReconstructCos, TruncatedMixtureMatchesCosine) {
  const CoefficientTable t = e1_table(1e-6);
  const double eps = t.tail_epsilon();
  for (int k = 0; k < 100; ++k) {
    const double phi = two_pi * k / 100.0;
    double s = 0.0;
    for (std::int64_t x = t.m_max(); x >= 1; x -= 2) s += t.p_at(x) * e1_closed(static_cast<double>(x) * phi);
    EXPECT_LE(std::abs(s - std::cos(phi)), 2.0 * eps + 1e-9) << phi;
  }
}

TEST(SampleM, SingleAtomTable) {
  CoefficientTable t(OddCosineSeries{{1.0}, 0.0}, 9);
  TrialRng r(1, 2, 3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_M(t, r), 1);
}

TEST(SampleM, FrequenciesMatchTable) {
  const CoefficientTable t = e1_table(1e-6);
  const int n = 1000000;
  std::vector<std::uint64_t> counts(6, 0);  // 1, 3, 5, 7, 9, rest
  for (int i = 0; i < n; ++i) {
    TrialRng r(5, 0, static_cast<std::uint64_t>(i));
    const auto m = t.sample_M(r);
    counts[m <= 9 ? static_cast<std::size_t>((m - 1) / 2) : 5] += 1;
  }
  std::vector<double> probs(6, 0.0);
  for (std::int64_t x = 3; x <= 9; x += 2) probs[static_cast<std::size_t>((x - 1) / 2)] = t.p_at(x);
  double rest = 0.0;
  for (std::int64_t x = 11; x <= t.m_max(); x += 2) rest += t.p_at(x);
  probs[5] = rest;
  probs[0] = 1.0 - probs[1] - probs[2] - probs[3] - probs[4] - rest;

  const double p3 = t.p_at(3);
  EXPECT_LT(std::abs(static_cast<double>(counts[1]) / n - p3), 4.0 * std::sqrt(p3 * (1 - p3) / n));
  EXPECT_GT(chi_square_gof(counts, probs).p_value, 0.01);
}
