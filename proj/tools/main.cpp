#include <cctype>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "waitlist/error.hpp"

using namespace waitlist;
using namespace waitlist::cli;

namespace {

const std::map<std::string, OutputFormat> kFormats{{"text", OutputFormat::Text}, {"json", OutputFormat::Json}};

std::optional<std::string> seed_from_env() {
  if (const char* value = std::getenv(std::string(kSeedEnvVar).c_str())) return std::string(value);
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waiting-list randomization toolkit: exact checks, oversubscription test, Monte Carlo and IV analysis"};
  app.require_subcommand(1);

  VerifyRequest verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check enumeration against the closed forms for all n <= max-n");
  verify_cmd->add_option("--max-n", verify.max_n, "Largest lottery size")->capture_default_str();
  verify_cmd->add_option("--cap", verify.cap, "Enumeration cap")->capture_default_str();
  verify_cmd->add_option("--workers", verify.workers, "Threads")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--format", verify.format)->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  TestRequest test;
  auto* test_cmd = app.add_subcommand("test", "Exact test of a1 = s from the observed last-offer rank");
  test_cmd->add_option("--n", test.n, "Applicants")->required();
  test_cmd->add_option("--s", test.s, "Seats")->required();
  test_cmd->add_option("--t", test.t, "Observed rank of the last offer")->required();
  test_cmd->add_option("--alpha", test.alpha)->capture_default_str();
  test_cmd->add_option("--format", test.format)->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  McRequest mc;
  std::uint64_t mc_seed = 0;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo comparison of the five 2SLS variants");
  mc_cmd->add_option("--config", mc.config_path, "JSON config")->required();
  mc_cmd->add_option("--workers", mc.workers)->check(CLI::PositiveNumber)->capture_default_str();
  auto* mc_seed_opt = mc_cmd->add_option("--seed", mc_seed, "Overrides WAITLIST_IV_SEED and the config seed");
  mc_cmd->add_option("--format", mc.format)->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  AnalysisRequest analyze;
  std::string seats_text;
  auto* analyze_cmd = app.add_subcommand("analyze", "2SLS on a student CSV with per-stratum diagnostics");
  analyze_cmd->add_option("--input", analyze.input_path, "CSV file")->required();
  std::string instrument_text = "w";
  std::string pooling_text = "ipw";
  analyze_cmd->add_option("--instrument", instrument_text)
      ->check(CLI::IsMember({"z", "v", "w"}, CLI::ignore_case))
      ->capture_default_str();
  analyze_cmd->add_option("--pooling", pooling_text)
      ->check(CLI::IsMember({"fe", "ipw"}, CLI::ignore_case))
      ->capture_default_str();
  analyze_cmd->add_option("--seats", seats_text, "Seat count, or stratum:count pairs");
  analyze_cmd->add_option("--alpha", analyze.alpha)->capture_default_str();
  analyze_cmd->add_option("--format", analyze.format)->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  SimulateRequest simulate;
  std::uint64_t sim_seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Export one simulated pooled sample as CSV");
  sim_cmd->add_option("--config", simulate.config_path, "JSON config")->required();
  sim_cmd->add_option("--output", simulate.output_path, "CSV to write")->required();
  sim_cmd->add_option("--replication", simulate.replication, "Substream index")->capture_default_str();
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CommandResult result;
  if (*verify_cmd) {
    result = cmd_verify(verify);
  } else if (*test_cmd) {
    result = cmd_test(test);
  } else if (*mc_cmd) {
    if (*mc_seed_opt) mc.seed = mc_seed;
    mc.env_seed = seed_from_env();
    result = cmd_mc(mc);
  } else if (*analyze_cmd) {
    const char which = static_cast<char>(std::tolower(static_cast<unsigned char>(instrument_text.at(0))));
    analyze.instrument = which == 'z' ? Instrument::Z : (which == 'v' ? Instrument::V : Instrument::W);
    const char pooling = static_cast<char>(std::tolower(static_cast<unsigned char>(pooling_text.at(0))));
    analyze.pooling = pooling == 'f' ? PoolingMode::FixedEffects : PoolingMode::Reweighting;
    try {
      if (!seats_text.empty()) analyze.seats = parse_seat_spec(seats_text);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUsage;
    }
    result = cmd_analyze(analyze);
  } else if (*sim_cmd) {
    if (*sim_seed_opt) simulate.seed = sim_seed;
    simulate.env_seed = seed_from_env();
    result = cmd_simulate(simulate);
  }
  std::cout << result.out;
  std::cerr << result.err;
  return result.exit_code;
}
