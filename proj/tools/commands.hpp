#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "waitlist/combinatorics.hpp"
#include "waitlist/error.hpp"
#include "waitlist/estimation.hpp"
#include "waitlist/oracle.hpp"

namespace waitlist::cli {

enum class OutputFormat { Text, Json };

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitVerification = 3,
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

inline constexpr std::string_view kSeedEnvVar = "WAITLIST_IV_SEED";

int exit_code_for(ErrorCode code) noexcept;

struct VerifyRequest {
  int max_n = 8;
  int cap = kDefaultEnumerationCap;
  int workers = 1;
  OutputFormat format = OutputFormat::Text;
};

struct TestRequest {
  int n = 0;
  int s = 0;
  int t = 0;
  double alpha = kDefaultAlpha;
  OutputFormat format = OutputFormat::Text;
};

struct McRequest {
  std::string config_path;
  int workers = 1;
  OutputFormat format = OutputFormat::Text;
  /// --seed; wins over the environment variable and the config file.
  std::optional<std::uint64_t> seed;
  /// Value of WAITLIST_IV_SEED, if set.
  std::optional<std::string> env_seed;
};

struct AnalysisRequest {
  std::string input_path;
  Instrument instrument = Instrument::W;
  PoolingMode pooling = PoolingMode::Reweighting;
  double alpha = kDefaultAlpha;
  SeatSpec seats;
  OutputFormat format = OutputFormat::Text;
};

struct SimulateRequest {
  std::string config_path;
  std::string output_path;
  std::uint64_t replication = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> env_seed;
};

/// Oracle-versus-closed-form checks for every 2 <= s < a1 <= n <= max_n and
/// every null law with 2 <= s < n <= max_n. Exit 3 on any mismatch.
CommandResult cmd_verify(const VerifyRequest& request);

CommandResult cmd_test(const TestRequest& request);

CommandResult cmd_mc(const McRequest& request);

CommandResult cmd_analyze(const AnalysisRequest& request);

/// Writes one simulated pooled sample (with accepter flags) as CSV.
CommandResult cmd_simulate(const SimulateRequest& request);

/// "10" for every stratum, "a:10,b:12" per stratum, or a mix of both
/// ("10,b:12").
SeatSpec parse_seat_spec(const std::string& text);

/// Seed precedence: flag, then environment, then config.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const std::optional<std::string>& env,
                           std::uint64_t config_seed);

}  // namespace waitlist::cli
