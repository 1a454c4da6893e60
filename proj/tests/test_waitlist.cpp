#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "brute_force.hpp"
#include "waitlist/error.hpp"
#include "waitlist/waitlist.hpp"

using namespace waitlist;

namespace {

ExactRational frac(std::int64_t n, std::int64_t d) { return {BigInt(n), BigInt(d)}; }

OrderingPattern random_pattern(Rng& rng, int n) {
  std::vector<StudentType> types(static_cast<std::size_t>(n));
  for (auto& t : types) t = rng.below(2) ? StudentType::Accepter : StudentType::Refuser;
  return OrderingPattern(std::move(types));
}

std::uint32_t to_mask(const OrderingPattern& p) {
  std::uint32_t mask = 0;
  for (int r = 1; r <= p.size(); ++r) {
    if (p.at_rank(r) == StudentType::Accepter) mask |= 1U << (r - 1);
  }
  return mask;
}

}  // namespace

TEST(Pattern, ParseAndPrint) {
  const auto p = OrderingPattern::parse("AARR");
  EXPECT_EQ(p.size(), 4);
  EXPECT_EQ(p.accepters(), 2);
  EXPECT_EQ(p.at_rank(1), StudentType::Accepter);
  EXPECT_EQ(p.at_rank(4), StudentType::Refuser);
  EXPECT_EQ(p.str(), "AARR");
  EXPECT_THROW(OrderingPattern::parse("AXR"), Error);
}

TEST(RunWaitlist, WorkedPattern) {
  // A, R, A, R, A, A with two seats: offers go to ranks 1-3.
  const auto p = OrderingPattern::parse("ARARAA");
  const auto r = run_waitlist(p, 2);
  EXPECT_EQ(r.t_last_offer, 3);
  EXPECT_EQ(r.seats_filled, 2);
  EXPECT_FALSE(r.undersubscribed);
  EXPECT_EQ(r.offered, (std::vector<bool>{true, true, true, false, false, false}));
  EXPECT_EQ(r.treated, (std::vector<bool>{true, false, true, false, false, false}));
  EXPECT_EQ(r.z, (std::vector<int>{1, 1, 0, 0, 0, 0}));
  EXPECT_EQ(r.v, (std::vector<int>{1, 1, 1, 0, 0, 0}));
  EXPECT_EQ(r.w, (std::vector<int>{1, 1, -1, 0, 0, 0}));
  const auto sh = shares(r, p);
  EXPECT_EQ(*sh.w1, frac(1, 2));
  EXPECT_EQ(*sh.w0, frac(2, 3));
  EXPECT_EQ(sh.size_w1, 2);
  EXPECT_EQ(sh.size_w0, 3);
  EXPECT_EQ(sh.size_excluded, 1);
}

TEST(RunWaitlist, AccepterAtTheEnd) {
  // Ranks 1-5 hold a single accepter, so T = 6 and the W = 0 group is empty.
  const auto p = OrderingPattern::parse("RRRRAA");
  const auto r = run_waitlist(p, 2);
  EXPECT_EQ(r.t_last_offer, 6);
  const auto sh = shares(r, p);
  ASSERT_TRUE(sh.w1.has_value());
  EXPECT_EQ(*sh.w1, frac(1, 5));
  EXPECT_FALSE(sh.w0.has_value());
  EXPECT_EQ(sh.size_w0, 0);

  const auto truth = brute::run(to_mask(p), 6, 2);
  EXPECT_EQ(truth.t, 6);
  EXPECT_EQ(frac(truth.accepters_w1, truth.size_w1), *sh.w1);
}

TEST(RunWaitlist, Undersubscribed) {
  const auto p = OrderingPattern::parse("RARR");
  const auto r = run_waitlist(p, 2);
  EXPECT_TRUE(r.undersubscribed);
  EXPECT_EQ(r.t_last_offer, 4);
  EXPECT_EQ(r.seats_filled, 1);
  EXPECT_TRUE(std::all_of(r.offered.begin(), r.offered.end(), [](bool b) { return b; }));
  EXPECT_EQ(std::count(r.w.begin(), r.w.end(), -1), 0);
}

TEST(RunWaitlist, RejectsBadSeats) {
  const auto p = OrderingPattern::parse("AARR");
  EXPECT_THROW(run_waitlist(p, 0), Error);
  EXPECT_THROW(run_waitlist(p, 4), Error);
  EXPECT_THROW(shares(run_waitlist(p, 2), OrderingPattern::parse("AAR")), Error);
}

TEST(RunWaitlist, InvariantsOnRandomPatterns) {
  Rng rng(123);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(18));
    const int s = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const auto p = random_pattern(rng, n);
    const auto r = run_waitlist(p, s);
    const int a1 = p.accepters();

    ASSERT_EQ(r.n(), n);
    ASSERT_EQ(r.seats_filled, std::min(s, a1));
    ASSERT_EQ(r.undersubscribed, a1 < s);
    int treated = 0;
    int accepted_before = 0;
    for (int rank = 1; rank <= n; ++rank) {
      const auto i = static_cast<std::size_t>(rank - 1);
      const bool acc = p.at_rank(rank) == StudentType::Accepter;
      ASSERT_EQ(r.offered[i], accepted_before < s);
      ASSERT_EQ(r.treated[i], r.offered[i] && acc);
      ASSERT_EQ(r.offered[i], rank <= r.t_last_offer);
      ASSERT_EQ(r.z[i], rank <= s ? 1 : 0);
      ASSERT_EQ(r.v[i], rank <= r.t_last_offer ? 1 : 0);
      const int expected_w = rank < r.t_last_offer ? 1 : (rank == r.t_last_offer && !r.undersubscribed ? -1 : 0);
      ASSERT_EQ(r.w[i], expected_w);
      treated += r.treated[i];
      accepted_before += acc;
    }
    ASSERT_EQ(treated, r.seats_filled);
    if (!r.undersubscribed) {
      ASSERT_EQ(p.at_rank(r.t_last_offer), StudentType::Accepter);
      ASSERT_GE(r.t_last_offer, s);
      const auto truth = brute::run(to_mask(p), n, s);
      ASSERT_EQ(truth.t, r.t_last_offer);
    }
  }
}

TEST(RunWaitlist, DependsOnlyOnTypePattern) {
  // Relabelling students of the same type never changes who gets offered:
  // the offer vector read through any type-preserving relabelling is the
  // same as the original.
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(15));
    const int s = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const auto p = random_pattern(rng, n);
    std::vector<int> accepter_ids;
    std::vector<int> refuser_ids;
    for (int rank = 1; rank <= n; ++rank) {
      (p.at_rank(rank) == StudentType::Accepter ? accepter_ids : refuser_ids).push_back(rank);
    }
    auto shuffled_acc = accepter_ids;
    auto shuffled_ref = refuser_ids;
    for (std::size_t i = shuffled_acc.size(); i > 1; --i) std::swap(shuffled_acc[i - 1], shuffled_acc[rng.below(i)]);
    for (std::size_t i = shuffled_ref.size(); i > 1; --i) std::swap(shuffled_ref[i - 1], shuffled_ref[rng.below(i)]);

    // Student ids by rank, then the same ranks filled with permuted ids.
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::vector<int> permuted(static_cast<std::size_t>(n));
    std::size_t ai = 0;
    std::size_t ri = 0;
    for (int rank = 1; rank <= n; ++rank) {
      ids[static_cast<std::size_t>(rank - 1)] = rank;
      if (p.at_rank(rank) == StudentType::Accepter) {
        permuted[static_cast<std::size_t>(rank - 1)] = shuffled_acc[ai++];
      } else {
        permuted[static_cast<std::size_t>(rank - 1)] = shuffled_ref[ri++];
      }
    }
    std::vector<StudentType> permuted_types(static_cast<std::size_t>(n));
    for (int rank = 1; rank <= n; ++rank) {
      permuted_types[static_cast<std::size_t>(rank - 1)] = p.at_rank(permuted[static_cast<std::size_t>(rank - 1)]);
    }
    const auto a = run_waitlist(p, s);
    const auto b = run_waitlist(OrderingPattern(permuted_types), s);
    ASSERT_EQ(a.offered, b.offered);
    ASSERT_EQ(a.w, b.w);
    ASSERT_EQ(a.t_last_offer, b.t_last_offer);
  }
}

TEST(DrawOrdering, UniformOverPatterns) {
  Rng rng(2024);
  const LotteryParams params(6, 2, 4);
  std::map<std::string, int> counts;
  for (int i = 0; i < 15000; ++i) {
    const auto p = draw_ordering(params, rng);
    ASSERT_EQ(p.size(), 6);
    ASSERT_EQ(p.accepters(), 4);
    ++counts[p.str()];
  }
  EXPECT_EQ(counts.size(), 15U);
  for (const auto& [pattern, c] : counts) {
    EXPECT_NEAR(c, 1000, 120) << pattern;
  }
}

TEST(Rng, Reproducible) {
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.next(), b.next());
    ASSERT_EQ(a.normal(), b.normal());
  }
  EXPECT_NE(substream_seed(1, 0), substream_seed(1, 1));
  EXPECT_NE(substream_seed(1, 0), substream_seed(2, 0));
}

TEST(Rng, Moments) {
  Rng rng(77);
  double sum = 0;
  double sum_sq = 0;
  double usum = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    usum += u;
    ASSERT_LT(rng.below(7), 7U);
  }
  EXPECT_NEAR(sum / draws, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / draws, 1.0, 0.015);
  EXPECT_NEAR(usum / draws, 0.5, 0.003);
}
