#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "waitlist/rational.hpp"
#include "waitlist/waitlist.hpp"

namespace waitlist {

inline constexpr int kDefaultEnumerationCap = 20;

struct OracleOptions {
  int cap = kDefaultEnumerationCap;
  /// Number of threads the pattern stream is split over. Results do not
  /// depend on it.
  int workers = 1;
};

/// Calls `visit` on every pattern with a1 accepters among n ranks, in
/// lexicographic order of the accepter-position sets.
void for_each_pattern(int n, int a1, const std::function<void(const OrderingPattern&)>& visit,
                      int cap = kDefaultEnumerationCap);

std::vector<OrderingPattern> enumerate_patterns(int n, int a1, int cap = kDefaultEnumerationCap);

struct PatternOutcome {
  OrderingPattern pattern;
  int t_last_offer = 0;
  ExactRational w1;
  ExactRational w0;
};

struct EnumerationSummary {
  int n = 0;
  int seats = 0;
  int accepters = 0;
  std::uint64_t pattern_count = 0;
  ExactRational mean_w1;
  ExactRational mean_w0;
  std::map<int, ExactRational> t_distribution;
  /// Kept only for n <= 10.
  std::optional<std::vector<PatternOutcome>> per_pattern;
};

/// Exhaustive ground truth for one lottery: runs the offer process on every
/// pattern and averages the W-group accepter shares exactly.
/// Requires 2 <= s < a1 <= n <= cap.
EnumerationSummary oracle_summary(int n, int s, int a1, const OracleOptions& options = {});

/// Law of T over all patterns with exactly s accepters.
std::map<int, ExactRational> oracle_null_t_distribution(int n, int s,
                                                        const OracleOptions& options = {});

}  // namespace waitlist
