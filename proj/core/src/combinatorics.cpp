#include "waitlist/combinatorics.hpp"

#include <cmath>
#include <string>

#include "waitlist/error.hpp"

namespace waitlist {

namespace {

void require_closed_form_range(const LotteryParams& params) {
  const int a1 = params.require_accepters();
  if (params.seats() < 2 || params.seats() >= a1) {
    throw Error(ErrorCode::ParamsViolateTheorem,
                "need 2 <= s < a1, got s=" + std::to_string(params.seats()) +
                    ", a1=" + std::to_string(a1));
  }
}

void require_test_range(int n, int s, int t) {
  if (s < 2 || s >= n) {
    throw Error(ErrorCode::ParamsViolateTheorem,
                "need 2 <= s < n, got n=" + std::to_string(n) + ", s=" + std::to_string(s));
  }
  if (t < s || t > n) {
    throw Error(ErrorCode::InvalidT, "t=" + std::to_string(t) + " outside [" +
                                         std::to_string(s) + ", " + std::to_string(n) + "]");
  }
}

}  // namespace

LotteryParams::LotteryParams(int n, int seats, std::optional<int> accepters)
    : n_(n), seats_(seats), accepters_(accepters) {
  if (seats < 1 || seats >= n) {
    throw Error(ErrorCode::DomainError,
                "need 1 <= s < n, got n=" + std::to_string(n) + ", s=" + std::to_string(seats));
  }
  if (accepters && (*accepters < 0 || *accepters > n)) {
    throw Error(ErrorCode::DomainError, "need 0 <= a1 <= n, got a1=" + std::to_string(*accepters));
  }
}

int LotteryParams::require_accepters() const {
  if (!accepters_) {
    throw Error(ErrorCode::ParamsViolateTheorem, "accepter count a1 is required");
  }
  return *accepters_;
}

BigInt binom(unsigned i, unsigned j) {
  if (j > i) return 0;
  if (j > i - j) j = i - j;
  // After step k the running value is C(i - j + k, k), so every division
  // below is exact once the common factor has been cancelled.
  BigInt result = 1;
  for (unsigned k = 1; k <= j; ++k) {
    const unsigned g = static_cast<unsigned>(boost::multiprecision::gcd(result, BigInt(k)));
    result /= g;
    result *= (i - j + k) / (k / g);
  }
  return result;
}

ExactRational prob_T(const LotteryParams& params, int t) {
  require_closed_form_range(params);
  const int s = params.seats();
  const int a1 = *params.accepters();
  const int a0 = params.n() - a1;
  if (t < s || t > s + a0) return ExactRational(0);
  // s-1 accepters among the first t-1 ranks, one at rank t, the remaining
  // a1-s among the last n-t ranks.
  const int j = t - s;
  const BigInt ways = binom(static_cast<unsigned>(s - 1 + j), static_cast<unsigned>(s - 1)) *
                      binom(static_cast<unsigned>(params.n() - t), static_cast<unsigned>(a1 - s));
  return {ways, binom(static_cast<unsigned>(params.n()), static_cast<unsigned>(a1))};
}

std::map<int, ExactRational> t_distribution(const LotteryParams& params) {
  require_closed_form_range(params);
  std::map<int, ExactRational> dist;
  const int s = params.seats();
  const int a0 = *params.refusers();
  for (int t = s; t <= s + a0; ++t) {
    dist.emplace(t, prob_T(params, t));
  }
  return dist;
}

ExactRational expected_share(const LotteryParams& params) {
  require_closed_form_range(params);
  return {BigInt(*params.accepters()), BigInt(params.n())};
}

ExactRational exact_test_pvalue(int n, int s, int t) {
  require_test_range(n, s, t);
  return {binom(static_cast<unsigned>(t - 1), static_cast<unsigned>(t - s)),
          binom(static_cast<unsigned>(n), static_cast<unsigned>(n - s))};
}

ExactRational exact_test_tail_pvalue(int n, int s, int t) {
  require_test_range(n, s, t);
  ExactRational tail;
  for (int u = t; u <= n; ++u) {
    tail += exact_test_pvalue(n, s, u);
  }
  return tail;
}

ExactTestResult exact_test(int n, int s, int t, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::DomainError, "alpha must lie in (0, 1)");
  }
  ExactTestResult result;
  result.p_value = exact_test_pvalue(n, s, t);
  result.alpha = alpha;
  result.reject = result.p_value.to_double() < alpha;
  return result;
}

double variance_ratio(double p_c, double p_d) {
  if (!(p_c > 0.0 && p_c < 1.0) || !(p_d > 0.0 && p_d < 1.0)) {
    throw Error(ErrorCode::DomainError, "shares must lie in (0, 1)");
  }
  if (p_d >= p_c) {
    throw Error(ErrorCode::DomainError, "variance ratio needs p_d < p_c");
  }
  return (p_c - p_d) / (1.0 - p_d);
}

}  // namespace waitlist
