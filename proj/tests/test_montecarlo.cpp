#include <gtest/gtest.h>

#include <cmath>

#include "waitlist/error.hpp"
#include "waitlist/montecarlo.hpp"

using namespace waitlist;

namespace {

McConfig small_config(int reps) {
  McConfig config;
  config.replications = reps;
  return config;
}

double mc_se_of_mean(const McRow& row, int reps) { return *row.se / std::sqrt(static_cast<double>(reps)); }

}  // namespace

TEST(SimulateStratum, StructureAndOutcomes) {
  McConfig config;
  Rng rng(1);
  double refuser_sum = 0;
  int refusers = 0;
  double untreated_accepter_sum = 0;
  int untreated_accepters = 0;
  for (int k = 0; k < 400; ++k) {
    const auto records = simulate_stratum(config, rng, "x");
    ASSERT_EQ(records.size(), 20U);
    int enrolled = 0;
    int accepters = 0;
    int last_offer = 0;
    for (const auto& r : records) {
      ASSERT_TRUE(r.accepter.has_value());
      ASSERT_EQ(r.stratum_id, "x");
      ASSERT_EQ(r.enrolled, r.offered && *r.accepter);
      if (r.offered) last_offer = r.rank;
      enrolled += r.enrolled;
      accepters += *r.accepter;
      if (!*r.accepter) {
        refuser_sum += r.outcome;
        ++refusers;
      } else if (!r.enrolled) {
        untreated_accepter_sum += r.outcome;
        ++untreated_accepters;
      }
    }
    ASSERT_EQ(enrolled, 10);
    ASSERT_EQ(accepters, 15);
    for (const auto& r : records) ASSERT_EQ(r.offered, r.rank <= last_offer);
  }
  EXPECT_NEAR(refuser_sum / refusers, 0.0, 0.05);
  EXPECT_NEAR(untreated_accepter_sum / untreated_accepters, 1.0, 0.05);
}

TEST(SimulateStratum, NoiseFreeOutcomes) {
  McConfig config;
  config.y0_sd = 0.0;
  Rng rng(2);
  for (const auto& r : simulate_stratum(config, rng, "q")) {
    const double expected = *r.accepter ? (r.enrolled ? 1.2 : 1.0) : 0.0;
    EXPECT_DOUBLE_EQ(r.outcome, expected);
  }
}

TEST(Replicate, DeterministicPerIndex) {
  const McConfig config;
  EXPECT_EQ(replicate(config, 5), replicate(config, 5));
  EXPECT_NE(replicate(config, 5), replicate(config, 6));
  McConfig other = config;
  other.seed = 1;
  EXPECT_NE(replicate(config, 5), replicate(other, 5));
}

TEST(Replicate, NoNoiseNoConfounding) {
  // Without outcome noise and with equal type means every unbiased
  // comparison recovers the effect on the treated exactly.
  McConfig config;
  config.y0_sd = 0.0;
  config.y0_accepter_mean = 0.0;
  const auto est = replicate(config, 0);
  for (const double e : est) EXPECT_NEAR(e, 0.2, 1e-12);
}

TEST(RunMc, WorkerCountDoesNotChangeOutput) {
  const McConfig config = small_config(60);
  const std::string one = to_json_string(run_mc(config, 1));
  for (const int workers : {2, 4, 8}) EXPECT_EQ(to_json_string(run_mc(config, workers)), one);
  EXPECT_EQ(to_text(run_mc(config, 3)), to_text(run_mc(config, 1)));
}

TEST(RunMc, SingleReplication) {
  const auto table = run_mc(small_config(1));
  for (const auto& row : table.rows) {
    EXPECT_FALSE(row.se.has_value());
    EXPECT_FALSE(row.ci_low.has_value());
  }
  EXPECT_FALSE(table.se_ratio().has_value());
  ASSERT_FALSE(table.warnings.empty());
  EXPECT_EQ(table.warnings.back().code, WarningCode::DegenerateTable);
  EXPECT_NE(to_json_string(table).find("\"se\": null"), std::string::npos);
}

TEST(RunMc, IntervalsAndLabels) {
  const auto table = run_mc(small_config(200));
  for (std::size_t i = 0; i < kMcEstimators; ++i) {
    const auto& row = table.rows[i];
    EXPECT_EQ(row.estimator, static_cast<McEstimator>(i));
    ASSERT_TRUE(row.se && row.ci_low && row.ci_high);
    EXPECT_NEAR(*row.ci_high - row.average, 1.96 * *row.se / std::sqrt(200.0), 1e-12);
    EXPECT_NEAR(row.average - *row.ci_low, 1.96 * *row.se / std::sqrt(200.0), 1e-12);
  }
  EXPECT_EQ(mc_estimator_id(McEstimator::WReweighting), "W_reweighting");
  EXPECT_NE(to_text(table).find("Instrument W, reweighting"), std::string::npos);
}

TEST(RunMc, PrecisionPrediction) {
  EXPECT_NEAR(precision_prediction(McConfig{}), std::sqrt(0.5), 1e-15);
  McConfig c;
  c.accepters_per_stratum = 16;
  EXPECT_NEAR(precision_prediction(c), std::sqrt((0.8 - 0.5) / 0.5), 1e-15);
}

TEST(RunMc, DefaultDesignProperties) {
  const McConfig config;
  const auto table = run_mc(config);
  const int reps = config.replications;
  const auto& vfe = table.row(McEstimator::VFixedEffects);
  const auto& wipw = table.row(McEstimator::WReweighting);
  const auto& z = table.row(McEstimator::Z);
  // V compares offered with non-offered applicants, whose accepter mix
  // differs: biased upward by far more than the simulation noise.
  EXPECT_GT(vfe.average, 0.2 + 3 * mc_se_of_mean(vfe, reps));
  EXPECT_NEAR(wipw.average, 0.2, 3 * mc_se_of_mean(wipw, reps));
  EXPECT_LT(*wipw.se, *z.se);
  ASSERT_TRUE(table.se_ratio().has_value());
  EXPECT_NEAR(*table.se_ratio(), precision_prediction(config), 0.05);
}

TEST(RunMc, ConsistentAsStrataGrow) {
  // Pooling more lotteries removes the small-sample bias of the reweighted W
  // and Z rows. Fixed effects weight each stratum by a variance that moves
  // with T, and T moves with the accepter mix, so W with fixed effects and
  // both V rows stay biased.
  McConfig config;
  config.n_strata = 80;
  config.replications = 500;
  const auto table = run_mc(config);
  for (const auto which : {McEstimator::WReweighting, McEstimator::Z}) {
    const auto& row = table.row(which);
    EXPECT_NEAR(row.average, 0.2, 3 * mc_se_of_mean(row, config.replications)) << mc_estimator_id(which);
  }
  for (const auto which : {McEstimator::VFixedEffects, McEstimator::VReweighting, McEstimator::WFixedEffects}) {
    const auto& row = table.row(which);
    EXPECT_GT(row.average, 0.2 + 3 * mc_se_of_mean(row, config.replications)) << mc_estimator_id(which);
  }
}

TEST(McConfigParsing, RoundTripAndDefaults) {
  EXPECT_EQ(to_json_string(parse_mc_config("{}")), to_json_string(McConfig{}));
  McConfig c;
  c.n_strata = 7;
  c.y0_sd = 0.5;
  c.seed = 18446744073709551615ULL;
  EXPECT_EQ(to_json_string(parse_mc_config(to_json_string(c))), to_json_string(c));
  EXPECT_EQ(parse_mc_config(R"({"replications": 3})").replications, 3);
}

TEST(McConfigParsing, Errors) {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      parse_mc_config(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Config);
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_field(R"({"strata": 3})", "strata");
  expect_field(R"({"n_strata": "3"})", "n_strata");
  expect_field(R"({"n_strata": 2.5})", "n_strata");
  expect_field(R"({"seed": -1})", "seed");
  expect_field(R"({"accepters_per_stratum": 10})", "accepters_per_stratum");
  expect_field(R"({"accepters_per_stratum": 25})", "accepters_per_stratum");
  expect_field(R"({"replications": 0})", "replications");
  expect_field(R"({"y0_sd": -1})", "y0_sd");
  expect_field("[1]", "object");
  expect_field("{", "invalid JSON");
}
