#include "waitlist/waitlist.hpp"

#include <algorithm>

#include "waitlist/error.hpp"

namespace waitlist {

OrderingPattern OrderingPattern::parse(std::string_view text) {
  std::vector<StudentType> types;
  types.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case 'A': types.push_back(StudentType::Accepter); break;
      case 'R': types.push_back(StudentType::Refuser); break;
      case ' ':
      case ',': break;
      default:
        throw Error(ErrorCode::DomainError, std::string("unexpected pattern character '") + c + "'");
    }
  }
  return OrderingPattern(std::move(types));
}

int OrderingPattern::accepters() const noexcept {
  return static_cast<int>(std::count(types_.begin(), types_.end(), StudentType::Accepter));
}

std::string OrderingPattern::str() const {
  std::string out;
  out.reserve(types_.size());
  for (const StudentType type : types_) {
    out.push_back(type == StudentType::Accepter ? 'A' : 'R');
  }
  return out;
}

AssignmentResult run_waitlist(const OrderingPattern& pattern, int seats) {
  const int n = pattern.size();
  if (seats < 1 || seats >= n) {
    throw Error(ErrorCode::DomainError,
                "need 1 <= s < n, got n=" + std::to_string(n) + ", s=" + std::to_string(seats));
  }
  AssignmentResult result;
  result.seats = seats;
  result.offered.assign(static_cast<std::size_t>(n), false);
  result.treated.assign(static_cast<std::size_t>(n), false);

  int accepted = 0;
  for (int rank = 1; rank <= n && accepted < seats; ++rank) {
    const auto i = static_cast<std::size_t>(rank - 1);
    result.offered[i] = true;
    result.t_last_offer = rank;
    if (pattern.at_rank(rank) == StudentType::Accepter) {
      result.treated[i] = true;
      ++accepted;
    }
  }
  result.seats_filled = accepted;
  result.undersubscribed = accepted < seats;
  if (result.undersubscribed) result.t_last_offer = n;

  const int t = result.t_last_offer;
  result.z.resize(static_cast<std::size_t>(n));
  result.v.resize(static_cast<std::size_t>(n));
  result.w.resize(static_cast<std::size_t>(n));
  for (int rank = 1; rank <= n; ++rank) {
    const auto i = static_cast<std::size_t>(rank - 1);
    result.z[i] = rank <= seats ? 1 : 0;
    result.v[i] = rank <= t ? 1 : 0;
    if (rank < t) {
      result.w[i] = 1;
    } else if (rank == t && !result.undersubscribed) {
      result.w[i] = -1;
    } else {
      result.w[i] = 0;
    }
  }
  return result;
}

ShareReport shares(const AssignmentResult& result, const OrderingPattern& pattern) {
  if (result.n() != pattern.size()) {
    throw Error(ErrorCode::MismatchedInputs, "assignment covers " + std::to_string(result.n()) +
                                                 " ranks but pattern has " +
                                                 std::to_string(pattern.size()));
  }
  ShareReport report;
  int accepters_w1 = 0;
  int accepters_w0 = 0;
  for (int rank = 1; rank <= pattern.size(); ++rank) {
    const bool accepter = pattern.at_rank(rank) == StudentType::Accepter;
    switch (result.w[static_cast<std::size_t>(rank - 1)]) {
      case 1:
        ++report.size_w1;
        accepters_w1 += accepter ? 1 : 0;
        break;
      case 0:
        ++report.size_w0;
        accepters_w0 += accepter ? 1 : 0;
        break;
      default:
        ++report.size_excluded;
        break;
    }
  }
  if (report.size_w1 > 0) report.w1 = ExactRational(accepters_w1, report.size_w1);
  if (report.size_w0 > 0) report.w0 = ExactRational(accepters_w0, report.size_w0);
  return report;
}

OrderingPattern draw_ordering(const LotteryParams& params, Rng& rng) {
  const int a1 = params.require_accepters();
  std::vector<StudentType> types(static_cast<std::size_t>(params.n()), StudentType::Refuser);
  std::fill_n(types.begin(), a1, StudentType::Accepter);
  for (std::size_t i = types.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(types[i - 1], types[j]);
  }
  return OrderingPattern(std::move(types));
}

}  // namespace waitlist
