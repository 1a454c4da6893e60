#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waitlist/rational.hpp"

namespace waitlist {

enum class Instrument { Z, V, W };
enum class PoolingMode { FixedEffects, Reweighting };
enum class Estimator { Wald, TSLS };

std::string_view to_string(Instrument instrument) noexcept;
std::string_view to_string(PoolingMode mode) noexcept;
std::string_view to_string(Estimator estimator) noexcept;

enum class WarningCode {
  Undersubscribed,
  AccepterViolation,
  SeatMismatch,
  DegenerateStratum,
  SingleStratumFE,
  Unvalidated,
  ZShareMismatch,
  DegenerateTable,
};

std::string_view to_string(WarningCode code) noexcept;

struct Warning {
  WarningCode code;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

/// One observed applicant. `accepter` is only known in simulated data.
struct StudentRecord {
  std::string student_id;
  std::string stratum_id;
  int rank = 0;
  bool offered = false;
  bool enrolled = false;
  double outcome = 0.0;
  std::optional<bool> accepter;
};

/// Seat counts: a per-stratum entry wins over `all`; with neither, the
/// largest enrolled count across strata is used.
struct SeatSpec {
  std::optional<int> all;
  std::map<std::string, int> per_stratum;
};

struct StratumSummary {
  std::string id;
  int size = 0;
  int seats = 0;
  int t_last_offer = 0;
  int enrolled = 0;
  bool undersubscribed = false;
};

/// Z, V and W for every record (indexed like the input records).
struct DerivedInstruments {
  std::vector<StratumSummary> strata;
  std::vector<std::size_t> stratum_of;
  std::vector<int> z;
  std::vector<int> v;
  std::vector<int> w;
  std::vector<Warning> warnings;
};

/// Validates the rank and offer structure of every stratum and derives the
/// three instruments. T is the largest offered rank; offers must form the
/// prefix 1..T. Throws Ingestion (duplicate or gapped ranks, enrolled
/// without offer), NonPrefixOffers or AmbiguousSeats.
DerivedInstruments derive_instruments(std::span<const StudentRecord> records,
                                      const SeatSpec& seats = {});

/// The rows an analysis with one instrument may use. For V and W, strata
/// in which every student was offered carry no comparison group and are
/// dropped with a warning; W = -1 rows stay listed so they can be counted
/// as exclusions.
struct InstrumentColumn {
  Instrument instrument = Instrument::W;
  std::vector<std::string> stratum_ids;
  std::vector<std::size_t> record;
  std::vector<std::size_t> stratum;
  std::vector<int> value;
  std::vector<std::size_t> dropped_strata;
  std::vector<Warning> warnings;
};

InstrumentColumn instrument_column(const DerivedInstruments& derived, Instrument instrument);

struct StratumWeights {
  ExactRational treated;
  ExactRational control;
};

struct SampleRow {
  std::size_t record = 0;
  std::size_t stratum = 0;
  bool instrument = false;
  double weight = 1.0;
};

struct WeightedInstrumentSample {
  Instrument instrument = Instrument::W;
  PoolingMode mode = PoolingMode::FixedEffects;
  std::vector<std::string> stratum_ids;
  std::vector<SampleRow> rows;
  /// Records with W = -1.
  std::vector<std::size_t> excluded;
  /// Exact arm weights per stratum index; absent for strata without rows.
  std::vector<std::optional<StratumWeights>> strata;
  std::vector<Warning> warnings;
};

/// Inverse probability weights: a row in arm a of stratum k gets
/// (pooled share of arm a) / (share of arm a in stratum k), shares taken
/// over non-excluded rows. Throws DegenerateStratum when a stratum lacks
/// one of the arms.
WeightedInstrumentSample ipw_weights(const InstrumentColumn& column);

/// Same rows with unit weights, as used by the fixed-effects estimator.
WeightedInstrumentSample unit_weights(const InstrumentColumn& column);

WeightedInstrumentSample build_sample(const InstrumentColumn& column, PoolingMode mode);

inline constexpr double kFirstStageTolerance = 1e-12;

/// (weighted mean y | z=1 - weighted mean y | z=0) divided by the same
/// contrast in d. z holds 0/1 values.
double wald(std::span<const double> y, std::span<const double> d, std::span<const double> z,
            std::span<const double> weights = {});

struct EstimateReport {
  Estimator estimator = Estimator::TSLS;
  std::optional<Instrument> instrument;
  PoolingMode pooling = PoolingMode::FixedEffects;
  double point_estimate = 0.0;
  /// Conventional homoskedastic IV standard error.
  std::optional<double> std_error;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
  std::vector<Warning> warnings;
};

/// Just-identified IV of y on d instrumented by z.
/// FixedEffects: y, d and z are demeaned within stratum first. Weights are
/// optional there and trigger an Unvalidated warning.
/// Reweighting: weighted IV with a constant and no stratum terms; weights
/// are required.
EstimateReport tsls(std::span<const double> y, std::span<const double> d, std::span<const double> z,
                    std::span<const std::size_t> strata, PoolingMode mode,
                    std::span<const double> weights = {});

/// Runs tsls on the rows of a sample. y and d are indexed by record.
EstimateReport estimate(std::span<const double> y, std::span<const double> d,
                        const WeightedInstrumentSample& sample);

struct BalanceShares {
  ExactRational treated_arm;
  ExactRational control_arm;
};

/// Weighted accepter shares by instrument arm, computed exactly from the
/// per-stratum weights. Throws MissingTypes if a used record has no
/// accepter flag.
BalanceShares balance_diagnostic(std::span<const StudentRecord> records,
                                 const WeightedInstrumentSample& sample);

}  // namespace waitlist
