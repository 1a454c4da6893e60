#include "waitlist/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "waitlist/combinatorics.hpp"
#include "waitlist/error.hpp"
#include "waitlist/waitlist.hpp"

namespace waitlist {

namespace {

using nlohmann::json;

constexpr double kZ975 = 1.96;

void config_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::Config, "field '" + field + "': " + what);
}

template <typename T>
void read_field(const json& doc, const char* name, T& target) {
  const auto it = doc.find(name);
  if (it == doc.end()) return;
  if constexpr (std::is_same_v<T, double>) {
    if (!it->is_number()) config_error(name, "expected a number");
    target = it->get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!it->is_number_unsigned()) config_error(name, "expected a nonnegative integer");
    target = it->get<std::uint64_t>();
  } else {
    if (!it->is_number_integer()) config_error(name, "expected an integer");
    const auto value = it->get<std::int64_t>();
    if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
      config_error(name, "out of range");
    }
    target = static_cast<int>(value);
  }
}

}  // namespace

void McConfig::validate() const {
  if (n_strata < 1) config_error("n_strata", "must be at least 1");
  if (seats < 1) config_error("seats", "must be at least 1");
  if (accepters_per_stratum <= seats) config_error("accepters_per_stratum", "must exceed seats");
  if (accepters_per_stratum > students_per_stratum) {
    config_error("accepters_per_stratum", "cannot exceed students_per_stratum");
  }
  if (replications < 1) config_error("replications", "must be at least 1");
  if (!(y0_sd >= 0.0) || !std::isfinite(y0_sd)) config_error("y0_sd", "must be finite and nonnegative");
  if (!std::isfinite(y0_refuser_mean)) config_error("y0_refuser_mean", "must be finite");
  if (!std::isfinite(y0_accepter_mean)) config_error("y0_accepter_mean", "must be finite");
  if (!std::isfinite(treatment_effect)) config_error("treatment_effect", "must be finite");
}

McConfig parse_mc_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");

  static constexpr const char* kKnown[] = {
      "n_strata",         "students_per_stratum", "accepters_per_stratum", "seats",        "y0_refuser_mean",
      "y0_accepter_mean", "y0_sd",                "treatment_effect",      "replications", "seed"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      config_error(key, "unknown field");
    }
  }

  McConfig config;
  read_field(doc, "n_strata", config.n_strata);
  read_field(doc, "students_per_stratum", config.students_per_stratum);
  read_field(doc, "accepters_per_stratum", config.accepters_per_stratum);
  read_field(doc, "seats", config.seats);
  read_field(doc, "y0_refuser_mean", config.y0_refuser_mean);
  read_field(doc, "y0_accepter_mean", config.y0_accepter_mean);
  read_field(doc, "y0_sd", config.y0_sd);
  read_field(doc, "treatment_effect", config.treatment_effect);
  read_field(doc, "replications", config.replications);
  read_field(doc, "seed", config.seed);
  config.validate();
  return config;
}

namespace {

json config_json(const McConfig& config) {
  return json{{"n_strata", config.n_strata},
              {"students_per_stratum", config.students_per_stratum},
              {"accepters_per_stratum", config.accepters_per_stratum},
              {"seats", config.seats},
              {"y0_refuser_mean", config.y0_refuser_mean},
              {"y0_accepter_mean", config.y0_accepter_mean},
              {"y0_sd", config.y0_sd},
              {"treatment_effect", config.treatment_effect},
              {"replications", config.replications},
              {"seed", config.seed}};
}

json optional_number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

std::string to_json_string(const McConfig& config) { return config_json(config).dump(2); }

std::vector<StudentRecord> simulate_stratum(const McConfig& config, Rng& rng, const std::string& stratum_id) {
  const LotteryParams params(config.students_per_stratum, config.seats, config.accepters_per_stratum);
  const OrderingPattern pattern = draw_ordering(params, rng);
  const AssignmentResult assignment = run_waitlist(pattern, config.seats);

  std::vector<StudentRecord> records;
  records.reserve(static_cast<std::size_t>(pattern.size()));
  for (int rank = 1; rank <= pattern.size(); ++rank) {
    const auto i = static_cast<std::size_t>(rank - 1);
    const bool accepter = pattern.at_rank(rank) == StudentType::Accepter;
    const double y0 = rng.normal(accepter ? config.y0_accepter_mean : config.y0_refuser_mean, config.y0_sd);
    const double y1 = accepter ? y0 + config.treatment_effect : y0;
    StudentRecord rec;
    rec.student_id = stratum_id + "-" + std::to_string(rank);
    rec.stratum_id = stratum_id;
    rec.rank = rank;
    rec.offered = assignment.offered[i];
    rec.enrolled = assignment.treated[i];
    rec.outcome = assignment.treated[i] ? y1 : y0;
    rec.accepter = accepter;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string_view mc_estimator_id(McEstimator which) noexcept {
  switch (which) {
    case McEstimator::VFixedEffects: return "V_fixed_effects";
    case McEstimator::VReweighting: return "V_reweighting";
    case McEstimator::WFixedEffects: return "W_fixed_effects";
    case McEstimator::WReweighting: return "W_reweighting";
    case McEstimator::Z: return "Z";
  }
  return "?";
}

std::string_view mc_estimator_label(McEstimator which) noexcept {
  switch (which) {
    case McEstimator::VFixedEffects: return "Instrument V, fixed effects";
    case McEstimator::VReweighting: return "Instrument V, reweighting";
    case McEstimator::WFixedEffects: return "Instrument W, fixed effects";
    case McEstimator::WReweighting: return "Instrument W, reweighting";
    case McEstimator::Z: return "Instrument Z";
  }
  return "?";
}

std::array<double, kMcEstimators> replicate(const McConfig& config, std::uint64_t replication,
                                            std::vector<Warning>* warnings) {
  Rng rng(substream_seed(config.seed, replication));
  std::vector<StudentRecord> records;
  records.reserve(static_cast<std::size_t>(config.n_strata * config.students_per_stratum));
  for (int k = 1; k <= config.n_strata; ++k) {
    auto stratum = simulate_stratum(config, rng, std::to_string(k));
    std::move(stratum.begin(), stratum.end(), std::back_inserter(records));
  }

  std::vector<double> y(records.size());
  std::vector<double> d(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    y[i] = records[i].outcome;
    d[i] = records[i].enrolled ? 1.0 : 0.0;
  }

  SeatSpec seats;
  seats.all = config.seats;
  const DerivedInstruments derived = derive_instruments(records, seats);
  const InstrumentColumn v = instrument_column(derived, Instrument::V);
  const InstrumentColumn w = instrument_column(derived, Instrument::W);
  const InstrumentColumn z = instrument_column(derived, Instrument::Z);

  // Reweighting and fixed effects coincide for Z when every stratum has the
  // same Z = 1 share; fixed effects is used either way.
  const WeightedInstrumentSample z_sample = unit_weights(z);
  if (warnings) {
    std::vector<std::int64_t> size(derived.strata.size(), 0);
    std::vector<std::int64_t> ones(derived.strata.size(), 0);
    for (const SampleRow& row : z_sample.rows) {
      ++size[row.stratum];
      ones[row.stratum] += row.instrument ? 1 : 0;
    }
    for (std::size_t k = 1; k < size.size(); ++k) {
      if (ExactRational(BigInt(ones[k]), BigInt(size[k])) != ExactRational(BigInt(ones[0]), BigInt(size[0]))) {
        warnings->push_back({WarningCode::ZShareMismatch,
                             "replication " + std::to_string(replication) +
                                 ": Z shares differ across strata, Z row uses fixed effects"});
        break;
      }
    }
  }

  std::array<double, kMcEstimators> out{};
  out[0] = estimate(y, d, unit_weights(v)).point_estimate;
  out[1] = estimate(y, d, ipw_weights(v)).point_estimate;
  out[2] = estimate(y, d, unit_weights(w)).point_estimate;
  out[3] = estimate(y, d, ipw_weights(w)).point_estimate;
  out[4] = estimate(y, d, z_sample).point_estimate;
  return out;
}

std::optional<double> McResultTable::se_ratio() const {
  const auto& w = row(McEstimator::WReweighting).se;
  const auto& z = row(McEstimator::Z).se;
  if (!w || !z || *z == 0.0) return std::nullopt;
  return *w / *z;
}

McResultTable run_mc(const McConfig& config, int workers) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.replications);
  const auto n_workers = static_cast<std::size_t>(std::clamp<long>(workers, 1, static_cast<long>(reps)));

  std::vector<std::array<double, kMcEstimators>> estimates(reps);
  std::vector<std::vector<Warning>> rep_warnings(reps);
  std::vector<std::exception_ptr> failures(reps);

  auto work = [&](std::size_t worker) {
    for (std::size_t r = worker; r < reps; r += n_workers) {
      try {
        estimates[r] = replicate(config, r, &rep_warnings[r]);
      } catch (const Error& e) {
        failures[r] = std::make_exception_ptr(Error(e.code(), "replication " + std::to_string(r) + ": " + e.what()));
        return;
      } catch (...) {
        failures[r] = std::current_exception();
        return;
      }
    }
  };
  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(work, t);
    for (auto& thread : threads) thread.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  McResultTable table;
  table.config = config;
  for (const auto& ws : rep_warnings) table.warnings.insert(table.warnings.end(), ws.begin(), ws.end());
  if (reps == 1) {
    table.warnings.push_back({WarningCode::DegenerateTable, "one replication: no dispersion or interval"});
  }
  for (std::size_t e = 0; e < kMcEstimators; ++e) {
    McRow& row = table.rows[e];
    row.estimator = static_cast<McEstimator>(e);
    double sum = 0.0;
    for (const auto& est : estimates) sum += est[e];
    row.average = sum / static_cast<double>(reps);
    if (reps > 1) {
      double ss = 0.0;
      for (const auto& est : estimates) ss += (est[e] - row.average) * (est[e] - row.average);
      const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
      const double half = kZ975 * sd / std::sqrt(static_cast<double>(reps));
      row.se = sd;
      row.ci_low = row.average - half;
      row.ci_high = row.average + half;
    }
  }
  return table;
}

double precision_prediction(const McConfig& config) {
  const double students = config.students_per_stratum;
  const double p_c = config.accepters_per_stratum / students;
  const double p_d = config.seats / students;
  return std::sqrt(variance_ratio(p_c, p_d));
}

std::string to_json_string(const McResultTable& table) {
  json rows = json::array();
  for (const McRow& row : table.rows) {
    rows.push_back(json{{"estimator", mc_estimator_id(row.estimator)},
                        {"label", mc_estimator_label(row.estimator)},
                        {"average", row.average},
                        {"se", optional_number(row.se)},
                        {"ci_low", optional_number(row.ci_low)},
                        {"ci_high", optional_number(row.ci_high)},
                        {"replications", table.config.replications},
                        {"seed", table.config.seed}});
  }
  json warnings = json::array();
  for (const Warning& w : table.warnings) {
    warnings.push_back(json{{"code", to_string(w.code)}, {"message", w.message}});
  }
  json doc{{"schema_version", 1},
           {"command", "mc"},
           {"rng", Rng::kAlgorithm},
           {"config", config_json(table.config)},
           {"rows", rows},
           {"se_ratio_w_reweighting_over_z", optional_number(table.se_ratio())},
           {"precision_prediction", optional_number([&]() -> std::optional<double> {
              try {
                return precision_prediction(table.config);
              } catch (const Error&) {
                return std::nullopt;
              }
            }())},
           {"warnings", warnings}};
  return doc.dump(2) + "\n";
}

std::string to_text(const McResultTable& table) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-30s| %8s | %8s | %s\n", "", "Average", "SE", "95% CI");
  os << line << std::string(70, '-') << "\n";
  for (const McRow& row : table.rows) {
    const std::string label(mc_estimator_label(row.estimator));
    if (row.se) {
      std::snprintf(line, sizeof line, "%-30s| %8.4f | %8.4f | [%.4f,%.4f]\n", label.c_str(), row.average, *row.se,
                    *row.ci_low, *row.ci_high);
    } else {
      std::snprintf(line, sizeof line, "%-30s| %8.4f | %8s | %s\n", label.c_str(), row.average, "n/a", "n/a");
    }
    os << line;
  }
  os << "\nreplications " << table.config.replications << ", seed " << table.config.seed << ", rng "
     << Rng::kAlgorithm << "\n";
  if (const auto ratio = table.se_ratio()) {
    std::snprintf(line, sizeof line, "SE ratio W (reweighting) / Z: %.4f (predicted %.4f)\n", *ratio,
                  precision_prediction(table.config));
    os << line;
  }
  for (const Warning& w : table.warnings) os << "warning: " << to_string(w.code) << ": " << w.message << "\n";
  return os.str();
}

}  // namespace waitlist
