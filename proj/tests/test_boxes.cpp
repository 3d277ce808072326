#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ghzsim/boxes.hpp"
#include "ghzsim/experiments.hpp"
#include "ghzsim/stats.hpp"

using namespace ghzsim;

TEST(PRBox, DefiningRelation) {
  TrialRng r(1, 0, 0);
  for (Bit x = 0; x < 2; ++x)
    for (Bit y = 0; y < 2; ++y)
      for (int i = 0; i < 1000; ++i) {
        const PRBoxOutput o = pr_box(x, y, r);
        ASSERT_EQ(o.a ^ o.b, x & y);
      }
}

TEST(PRBox, UniformMarginals) {
  const int n = 1000000;
  for (Bit x = 0; x < 2; ++x)
    for (Bit y = 0; y < 2; ++y) {
      TrialRng r(2, x * 2U + y, 0);
      long a = 0, b = 0;
      for (int i = 0; i < n; ++i) {
        const PRBoxOutput o = pr_box(x, y, r);
        a += o.a;
        b += o.b;
      }
      EXPECT_NEAR(static_cast<double>(a) / n, 0.5, 0.002);
      EXPECT_NEAR(static_cast<double>(b) / n, 0.5, 0.002);
    }
}

TEST(PRBox, CountsUses) {
  PRBox box(alice, bob);
  TrialRng r(3, 0, 0);
  EXPECT_EQ(box.usage(), 0U);
  box.use(1, 0, r);
  box.use(1, 1, r);
  EXPECT_EQ(box.usage(), 2U);
  EXPECT_EQ(box.first(), alice);
  EXPECT_EQ(box.second(), bob);
}

// Each endpoint's output distribution does not depend on the other endpoint's input.
TEST(PRBox, NoSignaling) {
  const int n = 1000000;
  for (int side = 0; side < 2; ++side)
    for (Bit own = 0; own < 2; ++own) {
      std::vector<std::vector<std::uint64_t>> table(2, std::vector<std::uint64_t>(2, 0));
      for (Bit other = 0; other < 2; ++other) {
        TrialRng r(4, static_cast<std::uint64_t>(side * 4 + own * 2 + other), 0);
        for (int i = 0; i < n / 2; ++i) {
          const PRBoxOutput o = side == 0 ? pr_box(own, other, r) : pr_box(other, own, r);
          table[other][side == 0 ? o.a : o.b] += 1;
        }
      }
      EXPECT_GT(chi_square_independence(table).p_value, 0.01) << side << own;
    }
}

TEST(GHZBox, ParityOverAllInputs) {
  for (unsigned in = 0; in < 8; ++in) {
    const Bit x = in & 1U, y = (in >> 1) & 1U, z = (in >> 2) & 1U;
    std::array<std::vector<std::vector<std::uint64_t>>, 3> pair_counts;
    for (auto& t : pair_counts) t.assign(2, std::vector<std::uint64_t>(2, 0));
    TrialRng r(5, in, 0);
    for (int i = 0; i < 100000; ++i) {
      std::array<PRBox, 3> internal{PRBox(alice, bob), PRBox(alice, charlie), PRBox(bob, charlie)};
      const GHZBoxOutput o = ghz_box(x, y, z, internal, r);
      ASSERT_EQ(o.a ^ o.b ^ o.c, x & y & z) << in;
      for (const auto& b : internal) ASSERT_EQ(b.usage(), 1U);
      pair_counts[0][o.a][o.b] += 1;
      pair_counts[1][o.a][o.c] += 1;
      pair_counts[2][o.b][o.c] += 1;
    }
    // each pair of outputs is uniform on its four values
    const std::vector<double> quarter(4, 0.25);
    for (const auto& t : pair_counts) {
      const std::vector<std::uint64_t> flat{t[0][0], t[0][1], t[1][0], t[1][1]};
      EXPECT_GT(chi_square_gof(flat, quarter).p_value, 0.01) << in;
    }
  }
}

TEST(BoxNetwork, EightBoxesWithFixedEndpoints) {
  const BoxNetwork net;
  EXPECT_EQ(BoxNetwork::size, 8U);
  EXPECT_EQ(net.total_uses(), 0U);
  for (const auto& b : net.ab_boxes) {
    EXPECT_EQ(b.first(), alice);
    EXPECT_EQ(b.second(), bob);
  }
  EXPECT_EQ(net.bc_box.first(), bob);
  EXPECT_EQ(net.bc_box.second(), charlie);
  EXPECT_EQ(net.ac_box.first(), alice);
  EXPECT_EQ(net.ac_box.second(), charlie);
}

TEST(BoxProtocol, EightUsesAndProtocolParityEveryRun) {
  const CoefficientTable table = e1_table(1e-6);
  const TrialPlan plan{100000, 6, 0, default_lanes()};
  const BoxCheckAccumulator acc = check_boxes(split_sum(1.2, 3, 5, 0), table, plan);
  EXPECT_EQ(acc.runs, 100000U);
  EXPECT_EQ(acc.wrong_box_count, 0U);
  EXPECT_EQ(acc.parity_mismatches, 0U);
}

TEST(BoxProtocol, NoCommunication) {
  const CoefficientTable table = e1_table_with_m_max(99);
  TrialRng r(7, 0, 0);
  const SharedRandomness s = sample_shared(r, table);
  const BoxRunOutcome o = run_box_protocol(split_sum(0.4, 3, 5, 0).three_party(), s, r);
  EXPECT_TRUE(o.outcome.transcript.empty());
  EXPECT_EQ(o.network.total_uses(), 8U);
  EXPECT_EQ(o.network.bc_box.usage(), 1U);
  EXPECT_EQ(o.network.ac_box.usage(), 1U);
}

// Alice's output distribution is unchanged when only Bob's and Charlie's
// settings change.
TEST(BoxProtocol, AliceMarginalIgnoresOtherSettings) {
  const CoefficientTable table = e1_table(1e-6);
  const Angle phi_a(0.9);
  std::vector<std::vector<std::uint64_t>> counts(4, std::vector<std::uint64_t>(2, 0));
  const std::array<std::pair<double, double>, 4> others{{{0.0, 0.0}, {1.0, 2.0}, {3.0, 0.5}, {5.5, 4.0}}};
  for (std::size_t k = 0; k < others.size(); ++k) {
    const Settings st{phi_a, Angle(others[k].first), Angle(others[k].second)};
    for (std::uint64_t t = 0; t < 250000; ++t) {
      TrialRng r(8, k, t);
      const SharedRandomness s = sample_shared(r, table);
      counts[k][to_bit(run_box_protocol(st, s, r).outcome.alpha)] += 1;
    }
  }
  EXPECT_GT(chi_square_independence(counts).p_value, 0.01);
}

TEST(BoxProtocol, ReproducesCosine) {
  const CoefficientTable table = e1_table(1e-6);
  const ExperimentContext ctx{&table};
  for (double phi : {0.0, pi / 3, 2.0, pi, 5.0}) {
    const CorrelationReport r =
        estimate_protocol(ProtocolChoice::boxes, split_sum(phi, 3, 5, 1), ctx, {1000000, 9, 0, default_lanes()});
    EXPECT_LT(std::abs(r.correlation.mean - std::cos(phi)), 4.0 * r.correlation.std_error + 2.0 * table.tail_epsilon())
        << phi;
    for (const Estimate& e : r.marginals()) EXPECT_LT(std::abs(e.mean), 4.0 / std::sqrt(1e6)) << phi;
  }
}
