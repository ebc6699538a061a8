#include "entmix/harness.hpp"

#include <gtest/gtest.h>

namespace entmix {
namespace {

TrialConfig small(int trials, std::uint64_t seed = 7) {
  TrialConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

class SuiteTest : public ::testing::TestWithParam<std::string> {};

TEST_P(SuiteTest, PassesAndAccountsForEveryTrial) {
  const auto report = run_suite(GetParam(), small(40));
  EXPECT_TRUE(report.passed()) << report.to_json().dump(2);
  EXPECT_EQ(report.trials_run, 40);
  EXPECT_EQ(report.agreements + static_cast<int>(report.counterexamples.size()), report.trials_run);
  EXPECT_EQ(report.suite, GetParam());
}

TEST_P(SuiteTest, DeterministicUnderFixedSeed) {
  const auto a = run_suite(GetParam(), small(15, 99)).to_json(false).dump();
  const auto b = run_suite(GetParam(), small(15, 99)).to_json(false).dump();
  EXPECT_EQ(a, b);
  const auto c = run_suite(GetParam(), small(15, 100)).to_json(false).dump();
  EXPECT_NE(a, c);
}

INSTANTIATE_TEST_SUITE_P(AllSuites, SuiteTest,
                         ::testing::Values("duality", "classical-agreement", "max-ent", "catalyst"),
                         [](const auto& info) {
                           std::string n = info.param;
                           for (auto& ch : n)
                             if (ch == '-') ch = '_';
                           return n;
                         });

TEST(Harness, FixedDimensionIsHonoured) {
  TrialConfig cfg = small(6);
  cfg.dim = 3;
  const auto report = run_duality_suite(cfg);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.config.dim, 3);
}

TEST(Harness, ImpossibleToleranceProducesReplayableCounterexamples) {
  TrialConfig cfg = small(30);
  cfg.dim = 3;
  cfg.witness_tol = 1e-300;
  cfg.max_counterexamples = 3;
  const auto report = run_duality_suite(cfg);
  ASSERT_FALSE(report.passed());
  EXPECT_LE(report.counterexamples.size(), 3u);
  EXPECT_LT(report.trials_run, 30);
  for (const auto& ce : report.counterexamples) {
    EXPECT_TRUE(replay_counterexample(ce));
    // Survives a text round trip.
    EXPECT_TRUE(replay_counterexample(nlohmann::json::parse(ce.dump())));
    auto relaxed = ce;
    relaxed["tolerances"]["witness_tol"] = 1e-9;
    EXPECT_FALSE(replay_counterexample(relaxed));
  }
}

TEST(Harness, ReplayOfCraftedErrorEntry) {
  const auto ce = nlohmann::json::parse(R"({
    "suite": "max-ent", "trial": 0,
    "inputs": {"psi": {"d_a": 2, "d_b": 2, "amplitudes": [[1,0],[1,0],[0,0],[0,0]]}},
    "tolerances": {"witness_tol": 1e-9, "protocol_tol": 1e-8},
    "verdict": {"error": "state is not normalized"}})");
  EXPECT_TRUE(replay_counterexample(ce));

  auto bad_suite = ce;
  bad_suite["suite"] = "nope";
  bad_suite["inputs"]["psi"]["amplitudes"] = {{1, 0}, {0, 0}, {0, 0}, {0, 0}};
  EXPECT_THROW(replay_counterexample(bad_suite), PreconditionError);
}

TEST(Harness, ConfigValidation) {
  TrialConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(run_suite("duality", cfg), PreconditionError);
  cfg = TrialConfig{};
  cfg.witness_tol = -1;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  EXPECT_THROW(run_suite("unknown", TrialConfig{}), PreconditionError);
  cfg = TrialConfig{};
  cfg.dim = 7;
  EXPECT_THROW(run_classical_agreement_suite(cfg), CapacityError);
}

TEST(Harness, CsvRowMatchesHeader) {
  const auto report = run_suite("max-ent", small(4));
  const auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(count(SuiteReport::csv_header()), count(report.csv_row()));
  EXPECT_EQ(report.csv_row().rfind("max-ent,7,0,4,4,0,", 0), 0u);
}

}  // namespace
}  // namespace entmix
