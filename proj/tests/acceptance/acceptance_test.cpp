// Full-size acceptance suite: one test per criterion, one summary line each.

#include <gtest/gtest.h>

#include <iostream>
#include <map>

#include "ghzsim/acceptance.hpp"

using namespace ghzsim;

namespace {

AcceptanceConfig config() {
  AcceptanceConfig c;
  c.level = VerifyLevel::full;
  return c;
}

const CoefficientTable& table() {
  static const CoefficientTable t = e1_table(1e-6);
  return t;
}

std::map<int, CriterionResult>& results() {
  static std::map<int, CriterionResult> r;
  return r;
}

void record(const CriterionResult& r) {
  results()[r.id] = r;
  std::cout << format_result(r) << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

}  // namespace

TEST(Acceptance, CosineReproduction) { record(criterion_cosine(config(), table())); }
TEST(Acceptance, E1Reproduction) { record(criterion_e1(config())); }
TEST(Acceptance, VanishingMarginals) { record(criterion_marginals(config(), table())); }
TEST(Acceptance, CommunicationBudget) { record(criterion_bits(config(), table())); }
TEST(Acceptance, CrossVariantExactness) { record(criterion_variants(config())); }
TEST(Acceptance, CoefficientEngine) { record(criterion_coefficients(table())); }
TEST(Acceptance, BoxProtocol) { record(criterion_boxes(config(), table())); }
TEST(Acceptance, DetectionLoophole) { record(criterion_detection(config(), table())); }
TEST(Acceptance, AzimuthDensities) { record(criterion_densities(config())); }
TEST(Acceptance, OracleConsistency) { record(criterion_oracles()); }

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  const int status = RUN_ALL_TESTS();
  std::cout << "\nacceptance summary (seed " << config().seed << ", " << config().trials() << " trials per check)\n";
  for (const auto& [id, r] : results()) std::cout << "  criterion " << id << ": " << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "\n";
  return status;
}
