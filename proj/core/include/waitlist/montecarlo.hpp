#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waitlist/estimation.hpp"
#include "waitlist/random.hpp"

namespace waitlist {

inline constexpr std::uint64_t kDefaultSeed = 20160301;

/// Pooled-lottery data-generating process. Defaults reproduce the design
/// with 20 strata of 20 applicants, 15 accepters and 10 seats.
struct McConfig {
  int n_strata = 20;
  int students_per_stratum = 20;
  int accepters_per_stratum = 15;
  int seats = 10;
  double y0_refuser_mean = 0.0;
  double y0_accepter_mean = 1.0;
  double y0_sd = 1.0;
  double treatment_effect = 0.2;
  int replications = 2000;
  std::uint64_t seed = kDefaultSeed;

  /// Throws Config naming the offending field.
  void validate() const;
};

/// Reads a config from a JSON object. Missing fields keep their defaults;
/// unknown fields and wrongly typed values are Config errors.
McConfig parse_mc_config(std::string_view json_text);
std::string to_json_string(const McConfig& config);

/// One lottery: a uniform accepter/refuser ordering, the offer process and
/// potential outcomes. Records come back in rank order with accepter flags.
std::vector<StudentRecord> simulate_stratum(const McConfig& config, Rng& rng, const std::string& stratum_id);

enum class McEstimator { VFixedEffects, VReweighting, WFixedEffects, WReweighting, Z };
inline constexpr std::size_t kMcEstimators = 5;

std::string_view mc_estimator_id(McEstimator which) noexcept;
std::string_view mc_estimator_label(McEstimator which) noexcept;

/// The five point estimates of one simulated pooled sample, in McEstimator
/// order.
std::array<double, kMcEstimators> replicate(const McConfig& config, std::uint64_t replication,
                                            std::vector<Warning>* warnings = nullptr);

struct McRow {
  McEstimator estimator;
  double average = 0.0;
  /// Standard deviation across replications; absent with one replication.
  std::optional<double> se;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
};

struct McResultTable {
  McConfig config;
  std::array<McRow, kMcEstimators> rows;
  std::vector<Warning> warnings;

  const McRow& row(McEstimator which) const { return rows[static_cast<std::size_t>(which)]; }
  /// SD of W with reweighting over SD of Z; absent with one replication.
  std::optional<double> se_ratio() const;
};

/// Runs every replication on its own seeded substream. The table is
/// bit-identical for any worker count.
McResultTable run_mc(const McConfig& config, int workers = 1);

/// Predicted SE ratio of the W and Z estimators, sqrt((p_c - p_d)/(1 - p_d)).
double precision_prediction(const McConfig& config);

std::string to_json_string(const McResultTable& table);
std::string to_text(const McResultTable& table);

}  // namespace waitlist
