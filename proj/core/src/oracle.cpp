#include "waitlist/oracle.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>

#include "waitlist/error.hpp"

namespace waitlist {

namespace {

constexpr int kPerPatternLimit = 10;

void check_cap(int n, int a1, int cap) {
  if (n < 0 || a1 < 0 || a1 > n) {
    throw Error(ErrorCode::DomainError,
                "need 0 <= a1 <= n, got n=" + std::to_string(n) + ", a1=" + std::to_string(a1));
  }
  if (n > cap) {
    throw Error(ErrorCode::CapExceeded,
                "n=" + std::to_string(n) + " exceeds enumeration cap " + std::to_string(cap) +
                    " (would need " + binom(static_cast<unsigned>(n), static_cast<unsigned>(a1)).str() +
                    " patterns)");
  }
}

// Small exact binomial table for pattern ranking; n is capped well below
// the point where 64 bits overflow.
std::uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  return binom(static_cast<unsigned>(n), static_cast<unsigned>(k)).convert_to<std::uint64_t>();
}

// Accepter positions (0-based, ascending) of the index-th pattern in
// lexicographic order.
std::vector<int> unrank(int n, int a1, std::uint64_t index) {
  std::vector<int> positions;
  positions.reserve(static_cast<std::size_t>(a1));
  int next = 0;
  for (int remaining = a1; remaining > 0; --remaining) {
    for (;; ++next) {
      const std::uint64_t with_here = choose(n - next - 1, remaining - 1);
      if (index < with_here) break;
      index -= with_here;
    }
    positions.push_back(next++);
  }
  return positions;
}

bool advance(std::vector<int>& positions, int n) {
  const int k = static_cast<int>(positions.size());
  int i = k - 1;
  while (i >= 0 && positions[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++positions[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) {
    positions[static_cast<std::size_t>(j)] = positions[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

OrderingPattern to_pattern(int n, const std::vector<int>& positions) {
  std::vector<StudentType> types(static_cast<std::size_t>(n), StudentType::Refuser);
  for (const int p : positions) types[static_cast<std::size_t>(p)] = StudentType::Accepter;
  return OrderingPattern(std::move(types));
}

constexpr std::uint64_t kUntilExhausted = ~std::uint64_t{0};

// The stream from index 0 with kUntilExhausted walks successors until none
// remain, so the single-chunk path never consults the binomial routine.
void visit_range(int n, int a1, std::uint64_t first, std::uint64_t count,
                 const std::function<void(const OrderingPattern&)>& visit) {
  if (count == 0) return;
  std::vector<int> positions;
  if (first == 0) {
    for (int i = 0; i < a1; ++i) positions.push_back(i);
  } else {
    positions = unrank(n, a1, first);
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    visit(to_pattern(n, positions));
    if (!advance(positions, n)) break;
  }
}

struct Partial {
  std::uint64_t patterns = 0;
  ExactRational sum_w1;
  ExactRational sum_w0;
  std::map<int, std::uint64_t> t_counts;
  std::vector<PatternOutcome> outcomes;
};

// Splits the lexicographic stream into contiguous chunks, one per worker,
// and returns the partials in chunk order.
template <typename Fn>
std::vector<Partial> run_chunks(int n, int a1, int workers, Fn&& per_pattern) {
  const std::uint64_t total = workers > 1 ? choose(n, a1) : 1;
  const std::uint64_t chunks =
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), 1, total);
  std::vector<Partial> partials(static_cast<std::size_t>(chunks));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(chunks));

  auto work = [&](std::uint64_t c) {
    try {
      const std::uint64_t begin = total * c / chunks;
      const std::uint64_t count = chunks == 1 ? kUntilExhausted : total * (c + 1) / chunks - begin;
      Partial& partial = partials[static_cast<std::size_t>(c)];
      visit_range(n, a1, begin, count,
                  [&](const OrderingPattern& pattern) { per_pattern(pattern, partial); });
    } catch (...) {
      failures[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };

  if (chunks == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(chunks));
    for (std::uint64_t c = 0; c < chunks; ++c) threads.emplace_back(work, c);
    for (auto& thread : threads) thread.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return partials;
}

}  // namespace

void for_each_pattern(int n, int a1, const std::function<void(const OrderingPattern&)>& visit, int cap) {
  check_cap(n, a1, cap);
  visit_range(n, a1, 0, kUntilExhausted, visit);
}

std::vector<OrderingPattern> enumerate_patterns(int n, int a1, int cap) {
  std::vector<OrderingPattern> patterns;
  for_each_pattern(n, a1, [&](const OrderingPattern& p) { patterns.push_back(p); }, cap);
  return patterns;
}

EnumerationSummary oracle_summary(int n, int s, int a1, const OracleOptions& options) {
  check_cap(n, a1, options.cap);
  if (s < 2 || s >= a1) {
    throw Error(ErrorCode::ParamsViolateTheorem,
                "need 2 <= s < a1, got s=" + std::to_string(s) + ", a1=" + std::to_string(a1));
  }
  const bool keep = n <= kPerPatternLimit;

  auto partials = run_chunks(n, a1, options.workers, [&](const OrderingPattern& pattern, Partial& acc) {
    const AssignmentResult result = run_waitlist(pattern, s);
    const ShareReport report = shares(result, pattern);
    // Both groups are nonempty whenever s < a1.
    acc.sum_w1 += *report.w1;
    acc.sum_w0 += *report.w0;
    ++acc.t_counts[result.t_last_offer];
    ++acc.patterns;
    if (keep) acc.outcomes.push_back({pattern, result.t_last_offer, *report.w1, *report.w0});
  });

  EnumerationSummary summary;
  summary.n = n;
  summary.seats = s;
  summary.accepters = a1;
  ExactRational sum_w1;
  ExactRational sum_w0;
  std::map<int, std::uint64_t> t_counts;
  std::vector<PatternOutcome> outcomes;
  for (auto& partial : partials) {
    summary.pattern_count += partial.patterns;
    sum_w1 += partial.sum_w1;
    sum_w0 += partial.sum_w0;
    for (const auto& [t, count] : partial.t_counts) t_counts[t] += count;
    std::move(partial.outcomes.begin(), partial.outcomes.end(), std::back_inserter(outcomes));
  }
  const ExactRational total(BigInt(summary.pattern_count));
  summary.mean_w1 = sum_w1 / total;
  summary.mean_w0 = sum_w0 / total;
  for (const auto& [t, count] : t_counts) {
    summary.t_distribution.emplace(t, ExactRational(BigInt(count), BigInt(summary.pattern_count)));
  }
  if (keep) summary.per_pattern = std::move(outcomes);
  return summary;
}

std::map<int, ExactRational> oracle_null_t_distribution(int n, int s, const OracleOptions& options) {
  check_cap(n, s, options.cap);
  if (s < 2 || s >= n) {
    throw Error(ErrorCode::ParamsViolateTheorem,
                "need 2 <= s < n, got n=" + std::to_string(n) + ", s=" + std::to_string(s));
  }
  auto partials = run_chunks(n, s, options.workers, [&](const OrderingPattern& pattern, Partial& acc) {
    ++acc.t_counts[run_waitlist(pattern, s).t_last_offer];
    ++acc.patterns;
  });
  std::uint64_t total = 0;
  std::map<int, std::uint64_t> t_counts;
  for (const auto& partial : partials) {
    total += partial.patterns;
    for (const auto& [t, count] : partial.t_counts) t_counts[t] += count;
  }
  std::map<int, ExactRational> dist;
  for (const auto& [t, count] : t_counts) {
    dist.emplace(t, ExactRational(BigInt(count), BigInt(total)));
  }
  return dist;
}

}  // namespace waitlist
