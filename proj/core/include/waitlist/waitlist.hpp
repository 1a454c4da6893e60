#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waitlist/combinatorics.hpp"
#include "waitlist/random.hpp"
#include "waitlist/rational.hpp"

namespace waitlist {

enum class StudentType : std::uint8_t { Refuser, Accepter };

/// Student types listed by waiting-list rank. Rank r (1-based) lives at
/// index r - 1.
class OrderingPattern {
 public:
  OrderingPattern() = default;
  explicit OrderingPattern(std::vector<StudentType> types) : types_(std::move(types)) {}

  /// Builds a pattern from a string of 'A' and 'R' characters.
  static OrderingPattern parse(std::string_view text);

  int size() const noexcept { return static_cast<int>(types_.size()); }
  int accepters() const noexcept;
  StudentType at_rank(int rank) const { return types_.at(static_cast<std::size_t>(rank - 1)); }
  std::span<const StudentType> types() const noexcept { return types_; }

  std::string str() const;

  friend bool operator==(const OrderingPattern&, const OrderingPattern&) = default;

 private:
  std::vector<StudentType> types_;
};

/// Outcome of running the offer process over one ordering. All per-rank
/// vectors are indexed by rank - 1.
struct AssignmentResult {
  int seats = 0;
  int t_last_offer = 0;
  int seats_filled = 0;
  /// Fewer accepters than seats: everyone is offered, T is set to n and no
  /// student is marked W = -1. W-based analysis must refuse such lotteries.
  bool undersubscribed = false;
  std::vector<bool> offered;
  std::vector<bool> treated;
  std::vector<int> z;
  std::vector<int> v;
  std::vector<int> w;

  int n() const noexcept { return static_cast<int>(offered.size()); }
};

/// Accepter shares inside the W = 1 and W = 0 groups. A share is absent
/// when its group is empty.
struct ShareReport {
  std::optional<ExactRational> w1;
  std::optional<ExactRational> w0;
  int size_w1 = 0;
  int size_w0 = 0;
  int size_excluded = 0;
};

/// Offers seats in rank order: rank i is offered iff fewer than `seats`
/// accepters hold lower ranks. Requires 1 <= seats < n.
AssignmentResult run_waitlist(const OrderingPattern& pattern, int seats);

ShareReport shares(const AssignmentResult& result, const OrderingPattern& pattern);

/// Uniform draw over the C(n, a1) type patterns (Fisher-Yates shuffle of
/// a1 accepter and n - a1 refuser labels).
OrderingPattern draw_ordering(const LotteryParams& params, Rng& rng);

}  // namespace waitlist
