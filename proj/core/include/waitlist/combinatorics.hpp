#pragma once

#include <map>
#include <optional>

#include "waitlist/rational.hpp"

namespace waitlist {

/// Size of one lottery: n applicants competing for s seats, a1 of whom
/// would accept an offer. a1 is unknown in observational data; the number
/// of refusers is always derived as n - a1.
class LotteryParams {
 public:
  LotteryParams(int n, int seats, std::optional<int> accepters = std::nullopt);

  int n() const noexcept { return n_; }
  int seats() const noexcept { return seats_; }
  std::optional<int> accepters() const noexcept { return accepters_; }
  std::optional<int> refusers() const noexcept {
    return accepters_ ? std::optional<int>(n_ - *accepters_) : std::nullopt;
  }

  /// a1, or a ParamsViolateTheorem error when it was not supplied.
  int require_accepters() const;

 private:
  int n_;
  int seats_;
  std::optional<int> accepters_;
};

inline constexpr double kDefaultAlpha = 0.05;

/// i choose j; zero when j > i.
BigInt binom(unsigned i, unsigned j);

/// P(T = t) for a uniformly random ordering of accepters and refusers.
/// Requires 2 <= s < a1 <= n; t outside [s, s + a0] has probability 0.
ExactRational prob_T(const LotteryParams& params, int t);

/// The full law of T over its support [s, s + a0].
std::map<int, ExactRational> t_distribution(const LotteryParams& params);

/// Common expectation of the accepter shares among W=1 and W=0 students,
/// a1 / n. Requires 2 <= s < a1 <= n.
ExactRational expected_share(const LotteryParams& params);

/// Point probability of observing T = t when a1 = s. This is the p-value
/// of the oversubscription test; reject a1 = s when it falls below alpha.
ExactRational exact_test_pvalue(int n, int s, int t);

/// Upper-tail alternative: P(T >= t) under a1 = s. Not used by default.
ExactRational exact_test_tail_pvalue(int n, int s, int t);

struct ExactTestResult {
  ExactRational p_value;
  double alpha = kDefaultAlpha;
  bool reject = false;
};

ExactTestResult exact_test(int n, int s, int t, double alpha = kDefaultAlpha);

/// Asymptotic variance of the W-instrumented 2SLS coefficient relative to
/// the Z-instrumented one: (p_c - p_d) / (1 - p_d), with p_c the accepter
/// share and p_d the treated share. Requires 0 < p_d < p_c < 1.
double variance_ratio(double p_c, double p_d);

}  // namespace waitlist
