#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "waitlist/error.hpp"
#include "waitlist/montecarlo.hpp"

namespace waitlist::cli {

using nlohmann::json;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ingestion:
    case ErrorCode::NonPrefixOffers:
    case ErrorCode::AmbiguousSeats:
    case ErrorCode::DegenerateStratum:
    case ErrorCode::ZeroFirstStage:
    case ErrorCode::MissingTypes:
    case ErrorCode::MismatchedInputs:
      return kExitData;
    default:
      return kExitUsage;
  }
}

namespace {

template <typename Fn>
CommandResult guarded(Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return {exit_code_for(e.code()), "", std::string("error: ") + e.what() + "\n"};
  }
}

std::string decimal(double value, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Config, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json warnings_json(const std::vector<Warning>& warnings) {
  json out = json::array();
  for (const Warning& w : warnings) out.push_back(json{{"code", to_string(w.code)}, {"message", w.message}});
  return out;
}

json rational_json(const ExactRational& value) {
  return json{{"exact", value.str()}, {"decimal", value.to_double()}};
}

}  // namespace

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const std::optional<std::string>& env,
                           std::uint64_t config_seed) {
  if (flag) return *flag;
  if (env && !env->empty()) {
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(env->data(), env->data() + env->size(), value);
    if (ec != std::errc() || end != env->data() + env->size()) {
      throw Error(ErrorCode::Config, std::string(kSeedEnvVar) + " must be an unsigned integer, got '" + *env + "'");
    }
    return value;
  }
  return config_seed;
}

SeatSpec parse_seat_spec(const std::string& text) {
  SeatSpec spec;
  auto parse_count = [&](std::string_view digits) {
    int value = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || end != digits.data() + digits.size() || value < 1) {
      throw Error(ErrorCode::Config, "invalid seat count '" + std::string(digits) + "' in --seats");
    }
    return value;
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto colon = item.rfind(':');
    if (colon == std::string_view::npos) {
      if (spec.all) throw Error(ErrorCode::Config, "--seats gives more than one default count");
      spec.all = parse_count(item);
    } else {
      spec.per_stratum[std::string(item.substr(0, colon))] = parse_count(item.substr(colon + 1));
    }
  }
  return spec;
}

CommandResult cmd_verify(const VerifyRequest& request) {
  return guarded([&]() -> CommandResult {
    if (request.max_n > request.cap) {
      throw Error(ErrorCode::CapExceeded, "max_n=" + std::to_string(request.max_n) + " exceeds enumeration cap " +
                                              std::to_string(request.cap));
    }
    const OracleOptions options{request.cap, request.workers};
    std::ostringstream text;
    json cases = json::array();
    json null_cases = json::array();
    int failures = 0;
    int checked = 0;

    for (int n = 3; n <= request.max_n; ++n) {
      for (int a1 = 3; a1 <= n; ++a1) {
        for (int s = 2; s < a1; ++s) {
          const LotteryParams params(n, s, a1);
          const EnumerationSummary summary = oracle_summary(n, s, a1, options);
          const ExactRational expected = expected_share(params);
          const bool shares_ok = summary.mean_w1 == expected && summary.mean_w0 == expected;
          const bool law_ok = summary.t_distribution == t_distribution(params);
          const bool pass = shares_ok && law_ok;
          ++checked;
          failures += pass ? 0 : 1;
          text << "n=" << n << " s=" << s << " a1=" << a1 << "  E(w1)=" << summary.mean_w1
               << " E(w0)=" << summary.mean_w0 << " a1/n=" << expected << "  T-law "
               << (law_ok ? "match" : "MISMATCH") << "  " << (pass ? "PASS" : "FAIL") << "\n";
          cases.push_back(json{{"n", n},
                               {"s", s},
                               {"a1", a1},
                               {"patterns", summary.pattern_count},
                               {"mean_w1", summary.mean_w1.str()},
                               {"mean_w0", summary.mean_w0.str()},
                               {"expected", expected.str()},
                               {"t_distribution_match", law_ok},
                               {"pass", pass}});
        }
      }
      for (int s = 2; s < n; ++s) {
        const auto oracle = oracle_null_t_distribution(n, s, options);
        bool pass = static_cast<int>(oracle.size()) == n - s + 1;
        for (int t = s; t <= n && pass; ++t) {
          const auto it = oracle.find(t);
          pass = it != oracle.end() && it->second == exact_test_pvalue(n, s, t);
        }
        ++checked;
        failures += pass ? 0 : 1;
        text << "null n=" << n << " s=" << s << "  P(T=t | a1=s) vs enumeration  " << (pass ? "PASS" : "FAIL") << "\n";
        null_cases.push_back(json{{"n", n}, {"s", s}, {"pass", pass}});
      }
    }
    if (checked == 0) {
      text << "no valid (n, s, a1) with 2 <= s < a1 <= n <= " << request.max_n << "; nothing to check\n";
    }
    text << checked - failures << "/" << checked << " checks passed\n";

    CommandResult result;
    result.exit_code = failures == 0 ? kExitOk : kExitVerification;
    if (request.format == OutputFormat::Json) {
      json doc{{"schema_version", 1},  {"command", "verify"},     {"max_n", request.max_n},
               {"cases", cases},       {"null_cases", null_cases}, {"checks", checked},
               {"failures", failures}, {"passed", failures == 0}};
      result.out = doc.dump(2) + "\n";
    } else {
      result.out = text.str();
    }
    return result;
  });
}

CommandResult cmd_test(const TestRequest& request) {
  return guarded([&]() -> CommandResult {
    const ExactTestResult test = exact_test(request.n, request.s, request.t, request.alpha);
    const char* decision = test.reject ? "REJECT" : "FAIL-TO-REJECT";
    CommandResult result;
    if (request.format == OutputFormat::Json) {
      json doc{{"schema_version", 1},
               {"command", "test"},
               {"n", request.n},
               {"s", request.s},
               {"t", request.t},
               {"alpha", request.alpha},
               {"p_value", rational_json(test.p_value)},
               {"decision", decision}};
      result.out = doc.dump(2) + "\n";
    } else {
      std::ostringstream os;
      os << "H0: a1 = s  (n=" << request.n << ", s=" << request.s << ", observed T=" << request.t << ")\n"
         << "p = " << test.p_value << " = " << decimal(test.p_value.to_double()) << "\n"
         << decision << " at alpha = " << request.alpha << "\n";
      result.out = os.str();
    }
    return result;
  });
}

namespace {

McConfig load_mc_config(const std::string& path, std::optional<std::uint64_t> seed,
                        const std::optional<std::string>& env_seed) {
  McConfig config = parse_mc_config(read_file(path));
  config.seed = resolve_seed(seed, env_seed, config.seed);
  return config;
}

}  // namespace

CommandResult cmd_mc(const McRequest& request) {
  return guarded([&]() -> CommandResult {
    if (request.workers < 1) throw Error(ErrorCode::Config, "--workers must be at least 1");
    const McConfig config = load_mc_config(request.config_path, request.seed, request.env_seed);
    const McResultTable table = run_mc(config, request.workers);
    CommandResult result;
    result.out = request.format == OutputFormat::Json ? to_json_string(table) : to_text(table);
    if (config.replications == 1) result.err = "warning: one replication, the table is degenerate\n";
    return result;
  });
}

CommandResult cmd_simulate(const SimulateRequest& request) {
  return guarded([&]() -> CommandResult {
    const McConfig config = load_mc_config(request.config_path, request.seed, request.env_seed);
    Rng rng(substream_seed(config.seed, request.replication));
    std::vector<StudentRecord> records;
    for (int k = 1; k <= config.n_strata; ++k) {
      auto stratum = simulate_stratum(config, rng, std::to_string(k));
      std::move(stratum.begin(), stratum.end(), std::back_inserter(records));
    }
    std::ofstream out(request.output_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Config, "cannot write '" + request.output_path + "'");
    write_student_csv(out, records, true);
    CommandResult result;
    result.out = "wrote " + std::to_string(records.size()) + " students in " + std::to_string(config.n_strata) +
                 " strata to " + request.output_path + "\n";
    return result;
  });
}

CommandResult cmd_analyze(const AnalysisRequest& request) {
  return guarded([&]() -> CommandResult {
    if (!(request.alpha > 0.0 && request.alpha < 1.0)) {
      throw Error(ErrorCode::Config, "--alpha must lie in (0, 1)");
    }
    std::ifstream in(request.input_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Config, "cannot open '" + request.input_path + "'");
    const StudentTable table = read_student_csv(in);
    const auto& records = table.records;

    const DerivedInstruments derived = derive_instruments(records, request.seats);
    const InstrumentColumn column = instrument_column(derived, request.instrument);
    const WeightedInstrumentSample sample = build_sample(column, request.pooling);

    std::vector<double> y(records.size());
    std::vector<double> d(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      y[i] = records[i].outcome;
      d[i] = records[i].enrolled ? 1.0 : 0.0;
    }
    EstimateReport report = estimate(y, d, sample);
    report.warnings.insert(report.warnings.begin(), derived.warnings.begin(), derived.warnings.end());

    std::optional<BalanceShares> balance;
    if (table.has_accepter) balance = balance_diagnostic(records, sample);

    // Oversubscription test per stratum.
    json strata = json::array();
    std::vector<std::string> flagged;
    for (const StratumSummary& s : derived.strata) {
      json entry{{"id", s.id},
                 {"size", s.size},
                 {"seats", s.seats},
                 {"t_last_offer", s.t_last_offer},
                 {"enrolled", s.enrolled},
                 {"undersubscribed", s.undersubscribed}};
      if (s.seats >= 2) {
        const ExactTestResult test = exact_test(s.size, s.seats, s.t_last_offer, request.alpha);
        entry["exact_test"] = json{{"p_value", rational_json(test.p_value)}, {"reject_a1_eq_s", test.reject}};
        if (!test.reject) flagged.push_back(s.id);
      } else {
        entry["exact_test"] = nullptr;
      }
      strata.push_back(entry);
    }

    std::vector<std::string> excluded_ids;
    for (const std::size_t i : sample.excluded) excluded_ids.push_back(records[i].student_id);
    std::vector<std::string> dropped;
    for (const std::size_t k : column.dropped_strata) dropped.push_back(derived.strata[k].id);

    std::optional<double> ci_low;
    std::optional<double> ci_high;
    if (report.std_error) {
      ci_low = report.point_estimate - 1.96 * *report.std_error;
      ci_high = report.point_estimate + 1.96 * *report.std_error;
    }

    CommandResult result;
    if (request.format == OutputFormat::Json) {
      auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
      json doc{
          {"schema_version", 1},
          {"command", "analyze"},
          {"input", request.input_path},
          {"alpha", request.alpha},
          {"estimate",
           json{{"estimator", to_string(report.estimator)},
                {"instrument", to_string(request.instrument)},
                {"pooling", to_string(report.pooling)},
                {"point_estimate", report.point_estimate},
                {"std_error", opt(report.std_error)},
                {"std_error_method", "homoskedastic_iv"},
                {"ci_low", opt(ci_low)},
                {"ci_high", opt(ci_high)},
                {"n_used", report.n_used},
                {"n_excluded", report.n_excluded}}},
          {"excluded_student_ids", excluded_ids},
          {"dropped_strata", dropped},
          {"strata", strata},
          {"strata_not_rejecting_a1_eq_s", flagged},
          {"balance", balance ? json{{"treated_arm", rational_json(balance->treated_arm)},
                                     {"control_arm", rational_json(balance->control_arm)}}
                              : json(nullptr)},
          {"warnings", warnings_json(report.warnings)}};
      result.out = doc.dump(2) + "\n";
    } else {
      std::ostringstream os;
      os << "2SLS of outcome on enrollment, instrument " << to_string(request.instrument) << ", "
         << to_string(report.pooling) << "\n"
         << "  estimate   " << decimal(report.point_estimate) << "\n";
      if (report.std_error) {
        os << "  std. error " << decimal(*report.std_error) << " (homoskedastic IV)\n"
           << "  95% CI     [" << decimal(*ci_low) << ", " << decimal(*ci_high) << "]\n";
      } else {
        os << "  std. error n/a\n";
      }
      os << "  used " << report.n_used << " students, excluded " << report.n_excluded << " (W = -1)";
      if (!dropped.empty()) os << ", dropped " << dropped.size() << " strata";
      os << "\n";
      if (!excluded_ids.empty()) {
        os << "  excluded:";
        for (const auto& id : excluded_ids) os << " " << id;
        os << "\n";
      }
      if (balance) {
        os << "  accepter share, instrument=1: " << balance->treated_arm << " ("
           << decimal(balance->treated_arm.to_double(), 4) << "), instrument=0: " << balance->control_arm << " ("
           << decimal(balance->control_arm.to_double(), 4) << ")\n";
      }
      os << "\nstratum  n  s  T  p(T | a1=s)\n";
      for (const auto& entry : strata) {
        os << "  " << entry["id"].get<std::string>() << "  " << entry["size"] << "  " << entry["seats"] << "  "
           << entry["t_last_offer"] << "  ";
        if (entry["exact_test"].is_null()) {
          os << "n/a (s < 2)\n";
        } else {
          os << entry["exact_test"]["p_value"]["exact"].get<std::string>()
             << (entry["exact_test"]["reject_a1_eq_s"].get<bool>() ? "" : "  a1 = s not rejected") << "\n";
        }
      }
      for (const Warning& w : report.warnings) os << "warning: " << to_string(w.code) << ": " << w.message << "\n";
      result.out = os.str();
    }
    return result;
  });
}

}  // namespace waitlist::cli
