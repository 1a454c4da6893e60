#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>

#include "brute_force.hpp"
#include "waitlist/combinatorics.hpp"
#include "waitlist/error.hpp"
#include "waitlist/oracle.hpp"

using namespace waitlist;

namespace {

ExactRational frac(std::int64_t n, std::int64_t d) { return {BigInt(n), BigInt(d)}; }

}  // namespace

TEST(Enumeration, LexicographicOrder) {
  const auto patterns = enumerate_patterns(6, 4);
  const std::vector<std::string> expected = {"AAAARR", "AAARAR", "AAARRA", "AARAAR", "AARARA",
                                             "AARRAA", "ARAAAR", "ARAARA", "ARARAA", "ARRAAA",
                                             "RAAAAR", "RAAARA", "RAARAA", "RARAAA", "RRAAAA"};
  ASSERT_EQ(patterns.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(patterns[i].str(), expected[i]);
}

TEST(Enumeration, CountsMatchBinomial) {
  for (int n = 1; n <= 14; ++n) {
    for (int a1 = 0; a1 <= n; ++a1) {
      std::uint64_t count = 0;
      std::string previous;
      for_each_pattern(n, a1, [&](const OrderingPattern& p) {
        ASSERT_EQ(p.accepters(), a1);
        // 'A' < 'R', so lexicographic accepter sets come out in string order.
        if (!previous.empty()) ASSERT_LT(previous, p.str());
        previous = p.str();
        ++count;
      });
      ASSERT_EQ(BigInt(count), binom(static_cast<unsigned>(n), static_cast<unsigned>(a1)));
    }
  }
}

TEST(Enumeration, CapIsEnforced) {
  try {
    oracle_summary(21, 2, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CapExceeded);
  }
  EXPECT_THROW(oracle_summary(12, 2, 5, {.cap = 10}), Error);
  EXPECT_THROW(enumerate_patterns(21, 3), Error);
  EXPECT_THROW(oracle_summary(8, 4, 4), Error);
  EXPECT_THROW(oracle_summary(8, 1, 4), Error);
}

TEST(OracleSummary, TableOneGolden) {
  const auto summary = oracle_summary(6, 2, 4);
  EXPECT_EQ(summary.pattern_count, 15U);
  ASSERT_TRUE(summary.per_pattern.has_value());
  const auto& rows = *summary.per_pattern;
  ASSERT_EQ(rows.size(), 15U);

  const std::vector<ExactRational> w1 = {1, 1, 1, 1, 1, 1, frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 3),
                                         frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 3), frac(1, 3)};
  const std::vector<ExactRational> w0 = {frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 2),
                                         frac(1, 2), frac(2, 3), frac(2, 3), frac(2, 3), 1,
                                         frac(2, 3), frac(2, 3), frac(2, 3), 1, 1};
  ExactRational w1_sum;
  ExactRational w0_sum;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].w1, w1[i]) << rows[i].pattern.str();
    EXPECT_EQ(rows[i].w0, w0[i]) << rows[i].pattern.str();
    w1_sum += rows[i].w1;
    w0_sum += rows[i].w0;
  }
  EXPECT_EQ(w1_sum, ExactRational(10));
  EXPECT_EQ(w0_sum, ExactRational(10));
  EXPECT_EQ(summary.mean_w1, frac(2, 3));
  EXPECT_EQ(summary.mean_w0, frac(2, 3));
  EXPECT_EQ(summary.t_distribution.at(2), frac(2, 5));
  EXPECT_EQ(summary.t_distribution.at(3), frac(2, 5));
  EXPECT_EQ(summary.t_distribution.at(4), frac(1, 5));
}

TEST(OracleSummary, PerPatternOnlyForSmallN) {
  EXPECT_TRUE(oracle_summary(10, 3, 5).per_pattern.has_value());
  EXPECT_FALSE(oracle_summary(11, 3, 5).per_pattern.has_value());
}

TEST(OracleSummary, MatchesBruteForceAndClosedForm) {
  for (int n = 3; n <= 12; ++n) {
    for (int a1 = 3; a1 <= n; ++a1) {
      for (int s = 2; s < a1; ++s) {
        const auto summary = oracle_summary(n, s, a1);
        const LotteryParams params(n, s, a1);
        const ExactRational share = frac(a1, n);
        ASSERT_EQ(summary.mean_w1, share);
        ASSERT_EQ(summary.mean_w0, share);
        ASSERT_EQ(summary.t_distribution, t_distribution(params));
        if (n <= 10) {
          const auto truth = brute::summarize(n, s, a1);
          ASSERT_EQ(summary.mean_w1, frac(truth.mean_w1.num, truth.mean_w1.den));
          ASSERT_EQ(summary.mean_w0, frac(truth.mean_w0.num, truth.mean_w0.den));
        }
      }
    }
  }
}

TEST(OracleSummary, NullLawMatchesExactTest) {
  for (int n = 3; n <= 12; ++n) {
    for (int s = 2; s < n; ++s) {
      const auto law = oracle_null_t_distribution(n, s);
      ExactRational total;
      for (int t = s; t <= n; ++t) {
        const auto it = law.find(t);
        const ExactRational p = it == law.end() ? ExactRational(0) : it->second;
        ASSERT_EQ(exact_test_pvalue(n, s, t), p) << n << " " << s << " " << t;
        total += p;
      }
      ASSERT_EQ(total, ExactRational(1));
    }
  }
}

TEST(OracleSummary, WorkerCountDoesNotMatter) {
  for (const int workers : {2, 3, 4, 8}) {
    const auto one = oracle_summary(14, 3, 8);
    const auto many = oracle_summary(14, 3, 8, {.workers = workers});
    EXPECT_EQ(one.pattern_count, many.pattern_count);
    EXPECT_EQ(one.mean_w1, many.mean_w1);
    EXPECT_EQ(one.mean_w0, many.mean_w0);
    EXPECT_EQ(one.t_distribution, many.t_distribution);
    EXPECT_EQ(oracle_null_t_distribution(11, 4), oracle_null_t_distribution(11, 4, {.workers = workers}));
  }
  const auto small = oracle_summary(8, 2, 5, {.workers = 4});
  const auto small_one = oracle_summary(8, 2, 5);
  ASSERT_TRUE(small.per_pattern && small_one.per_pattern);
  ASSERT_EQ(small.per_pattern->size(), small_one.per_pattern->size());
  for (std::size_t i = 0; i < small.per_pattern->size(); ++i) {
    EXPECT_EQ((*small.per_pattern)[i].pattern, (*small_one.per_pattern)[i].pattern);
  }
}
