#include "waitlist/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "waitlist/error.hpp"

namespace waitlist {

std::string_view to_string(Instrument instrument) noexcept {
  switch (instrument) {
    case Instrument::Z: return "Z";
    case Instrument::V: return "V";
    case Instrument::W: return "W";
  }
  return "?";
}

std::string_view to_string(PoolingMode mode) noexcept {
  return mode == PoolingMode::FixedEffects ? "fixed_effects" : "reweighting";
}

std::string_view to_string(Estimator estimator) noexcept {
  return estimator == Estimator::Wald ? "wald" : "tsls";
}

std::string_view to_string(WarningCode code) noexcept {
  switch (code) {
    case WarningCode::Undersubscribed: return "Undersubscribed";
    case WarningCode::AccepterViolation: return "AccepterViolation";
    case WarningCode::SeatMismatch: return "SeatMismatch";
    case WarningCode::DegenerateStratum: return "DegenerateStratum";
    case WarningCode::SingleStratumFE: return "SingleStratumFE";
    case WarningCode::Unvalidated: return "Unvalidated";
    case WarningCode::ZShareMismatch: return "ZShareMismatch";
    case WarningCode::DegenerateTable: return "DegenerateTable";
  }
  return "?";
}

namespace {

std::string data_row(std::size_t index) { return std::to_string(index + 1); }

int resolve_seats(const SeatSpec& spec, const std::string& stratum, int inferred) {
  if (auto it = spec.per_stratum.find(stratum); it != spec.per_stratum.end()) return it->second;
  if (spec.all) return *spec.all;
  return inferred;
}

}  // namespace

DerivedInstruments derive_instruments(std::span<const StudentRecord> records, const SeatSpec& seats) {
  DerivedInstruments out;
  out.stratum_of.resize(records.size());

  // Group by stratum in order of first appearance.
  std::unordered_map<std::string, std::size_t> index_of;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto [it, inserted] = index_of.try_emplace(records[i].stratum_id, members.size());
    if (inserted) {
      members.emplace_back();
      out.strata.push_back(StratumSummary{records[i].stratum_id});
    }
    members[it->second].push_back(i);
    out.stratum_of[i] = it->second;
  }

  // rank_to_record[k][r - 1] is the record holding rank r in stratum k.
  std::vector<std::vector<std::size_t>> rank_to_record(members.size());
  int max_enrolled = 0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    StratumSummary& stratum = out.strata[k];
    const auto& rows = members[k];
    stratum.size = static_cast<int>(rows.size());
    constexpr std::size_t kUnset = ~std::size_t{0};
    auto& by_rank = rank_to_record[k];
    by_rank.assign(rows.size(), kUnset);
    for (const std::size_t i : rows) {
      const StudentRecord& rec = records[i];
      if (rec.rank < 1 || rec.rank > stratum.size) {
        throw Error(ErrorCode::Ingestion, "stratum '" + stratum.id + "': rank " + std::to_string(rec.rank) +
                                              " at data row " + data_row(i) + " is outside 1.." +
                                              std::to_string(stratum.size));
      }
      auto& slot = by_rank[static_cast<std::size_t>(rec.rank - 1)];
      if (slot != kUnset) {
        throw Error(ErrorCode::Ingestion, "stratum '" + stratum.id + "': duplicate rank " +
                                              std::to_string(rec.rank) + " at data rows " + data_row(slot) +
                                              " and " + data_row(i));
      }
      slot = i;
      if (rec.enrolled && !rec.offered) {
        throw Error(ErrorCode::Ingestion, "stratum '" + stratum.id + "': data row " + data_row(i) +
                                              " is enrolled without an offer");
      }
      if (rec.offered) stratum.t_last_offer = std::max(stratum.t_last_offer, rec.rank);
      if (rec.enrolled) ++stratum.enrolled;
    }
    if (stratum.t_last_offer == 0) {
      throw Error(ErrorCode::NonPrefixOffers, "stratum '" + stratum.id + "' has no offers");
    }
    for (int r = 1; r < stratum.t_last_offer; ++r) {
      const std::size_t i = by_rank[static_cast<std::size_t>(r - 1)];
      if (!records[i].offered) {
        throw Error(ErrorCode::NonPrefixOffers,
                    "stratum '" + stratum.id + "': rank " + std::to_string(r) + " (data row " + data_row(i) +
                        ") was skipped although rank " + std::to_string(stratum.t_last_offer) +
                        " received an offer");
      }
    }
    max_enrolled = std::max(max_enrolled, stratum.enrolled);
  }

  const bool needs_inference =
      !seats.all && std::any_of(out.strata.begin(), out.strata.end(), [&](const StratumSummary& s) {
        return !seats.per_stratum.contains(s.id);
      });
  if (needs_inference && max_enrolled == 0) {
    throw Error(ErrorCode::AmbiguousSeats, "no enrolled students: supply the seat count");
  }

  out.z.resize(records.size());
  out.v.resize(records.size());
  out.w.resize(records.size());
  for (std::size_t k = 0; k < out.strata.size(); ++k) {
    StratumSummary& stratum = out.strata[k];
    stratum.seats = resolve_seats(seats, stratum.id, max_enrolled);
    if (stratum.seats < 1 || stratum.seats >= stratum.size) {
      throw Error(ErrorCode::AmbiguousSeats, "stratum '" + stratum.id + "': " + std::to_string(stratum.seats) +
                                                 " seats for " + std::to_string(stratum.size) +
                                                 " applicants (need 1 <= s < n)");
    }
    if (stratum.enrolled > stratum.seats) {
      throw Error(ErrorCode::Ingestion, "stratum '" + stratum.id + "': " + std::to_string(stratum.enrolled) +
                                            " enrolled but only " + std::to_string(stratum.seats) + " seats");
    }
    if (stratum.enrolled < stratum.seats) {
      if (stratum.t_last_offer == stratum.size) {
        stratum.undersubscribed = true;
        out.warnings.push_back({WarningCode::Undersubscribed,
                                "stratum '" + stratum.id + "': every applicant was offered but only " +
                                    std::to_string(stratum.enrolled) + " of " + std::to_string(stratum.seats) +
                                    " seats filled"});
      } else {
        out.warnings.push_back({WarningCode::SeatMismatch,
                                "stratum '" + stratum.id + "': offers stopped at rank " +
                                    std::to_string(stratum.t_last_offer) + " with " +
                                    std::to_string(stratum.enrolled) + " of " + std::to_string(stratum.seats) +
                                    " seats filled; the seat count for this stratum may be wrong"});
      }
    } else {
      const std::size_t last = rank_to_record[k][static_cast<std::size_t>(stratum.t_last_offer - 1)];
      if (!records[last].enrolled) {
        out.warnings.push_back({WarningCode::AccepterViolation,
                                "stratum '" + stratum.id + "': the last offer (rank " +
                                    std::to_string(stratum.t_last_offer) + ", data row " + data_row(last) +
                                    ") did not enroll although all seats are filled"});
      }
    }
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const StratumSummary& stratum = out.strata[out.stratum_of[i]];
    const int rank = records[i].rank;
    const int t = stratum.t_last_offer;
    out.z[i] = rank <= stratum.seats ? 1 : 0;
    out.v[i] = rank <= t ? 1 : 0;
    if (rank < t) {
      out.w[i] = 1;
    } else if (rank == t && !stratum.undersubscribed) {
      out.w[i] = -1;
    } else {
      out.w[i] = 0;
    }
  }
  return out;
}

InstrumentColumn instrument_column(const DerivedInstruments& derived, Instrument instrument) {
  InstrumentColumn column;
  column.instrument = instrument;
  column.stratum_ids.reserve(derived.strata.size());
  for (const auto& s : derived.strata) column.stratum_ids.push_back(s.id);

  std::vector<bool> dropped(derived.strata.size(), false);
  if (instrument != Instrument::Z) {
    for (std::size_t k = 0; k < derived.strata.size(); ++k) {
      const StratumSummary& s = derived.strata[k];
      if (s.undersubscribed) {
        dropped[k] = true;
        column.warnings.push_back({WarningCode::Undersubscribed,
                                   "stratum '" + s.id + "' refused for " + std::string(to_string(instrument)) +
                                       "-analysis: undersubscribed"});
      } else if (s.t_last_offer == s.size) {
        dropped[k] = true;
        column.warnings.push_back({WarningCode::DegenerateStratum,
                                   "stratum '" + s.id + "' refused for " + std::string(to_string(instrument)) +
                                       "-analysis: every applicant was offered, no comparison group"});
      }
      if (dropped[k]) column.dropped_strata.push_back(k);
    }
  }

  const std::vector<int>& values =
      instrument == Instrument::Z ? derived.z : (instrument == Instrument::V ? derived.v : derived.w);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t k = derived.stratum_of[i];
    if (dropped[k]) continue;
    column.record.push_back(i);
    column.stratum.push_back(k);
    column.value.push_back(values[i]);
  }
  return column;
}

namespace {

WeightedInstrumentSample sample_skeleton(const InstrumentColumn& column, PoolingMode mode) {
  WeightedInstrumentSample sample;
  sample.instrument = column.instrument;
  sample.mode = mode;
  sample.stratum_ids = column.stratum_ids;
  sample.warnings = column.warnings;
  sample.strata.resize(column.stratum_ids.size());
  for (std::size_t j = 0; j < column.record.size(); ++j) {
    if (column.value[j] < 0) {
      sample.excluded.push_back(column.record[j]);
    } else {
      sample.rows.push_back({column.record[j], column.stratum[j], column.value[j] == 1, 1.0});
    }
  }
  return sample;
}

}  // namespace

WeightedInstrumentSample unit_weights(const InstrumentColumn& column) {
  WeightedInstrumentSample sample = sample_skeleton(column, PoolingMode::FixedEffects);
  for (const SampleRow& row : sample.rows) {
    if (!sample.strata[row.stratum]) sample.strata[row.stratum] = StratumWeights{1, 1};
  }
  return sample;
}

WeightedInstrumentSample ipw_weights(const InstrumentColumn& column) {
  WeightedInstrumentSample sample = sample_skeleton(column, PoolingMode::Reweighting);
  const std::size_t n_strata = sample.strata.size();
  std::vector<std::int64_t> size(n_strata, 0);
  std::vector<std::int64_t> treated(n_strata, 0);
  for (const SampleRow& row : sample.rows) {
    ++size[row.stratum];
    if (row.instrument) ++treated[row.stratum];
  }
  const auto total = static_cast<std::int64_t>(sample.rows.size());
  std::int64_t total_treated = 0;
  for (const auto t : treated) total_treated += t;

  const ExactRational pooled_treated(BigInt(total_treated), BigInt(std::max<std::int64_t>(total, 1)));
  const ExactRational pooled_control = ExactRational(1) - pooled_treated;
  for (std::size_t k = 0; k < n_strata; ++k) {
    if (size[k] == 0) continue;
    if (treated[k] == 0 || treated[k] == size[k]) {
      throw Error(ErrorCode::DegenerateStratum,
                  "stratum '" + sample.stratum_ids[k] + "' has no " +
                      (treated[k] == 0 ? "instrument=1" : "instrument=0") + " rows");
    }
    const ExactRational share(BigInt(treated[k]), BigInt(size[k]));
    sample.strata[k] = StratumWeights{pooled_treated / share, pooled_control / (ExactRational(1) - share)};
  }
  std::vector<double> treated_weight(n_strata, 0.0);
  std::vector<double> control_weight(n_strata, 0.0);
  for (std::size_t k = 0; k < n_strata; ++k) {
    if (!sample.strata[k]) continue;
    treated_weight[k] = sample.strata[k]->treated.to_double();
    control_weight[k] = sample.strata[k]->control.to_double();
  }
  for (SampleRow& row : sample.rows) {
    row.weight = row.instrument ? treated_weight[row.stratum] : control_weight[row.stratum];
  }
  return sample;
}

WeightedInstrumentSample build_sample(const InstrumentColumn& column, PoolingMode mode) {
  return mode == PoolingMode::Reweighting ? ipw_weights(column) : unit_weights(column);
}

namespace {

void require_same_size(std::size_t expected, std::size_t actual, std::string_view name) {
  if (expected != actual) {
    throw Error(ErrorCode::MismatchedInputs, std::string(name) + " has " + std::to_string(actual) +
                                                 " entries, expected " + std::to_string(expected));
  }
}

void require_positive(std::span<const double> weights) {
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::DomainError, "weights must be finite and strictly positive");
    }
  }
}

}  // namespace

double wald(std::span<const double> y, std::span<const double> d, std::span<const double> z,
            std::span<const double> weights) {
  require_same_size(y.size(), d.size(), "d");
  require_same_size(y.size(), z.size(), "z");
  if (!weights.empty()) require_same_size(y.size(), weights.size(), "weights");
  require_positive(weights);

  double sw[2] = {0, 0};
  double sy[2] = {0, 0};
  double sd[2] = {0, 0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const int arm = z[i] != 0.0 ? 1 : 0;
    const double w = weights.empty() ? 1.0 : weights[i];
    sw[arm] += w;
    sy[arm] += w * y[i];
    sd[arm] += w * d[i];
  }
  if (sw[0] == 0.0 || sw[1] == 0.0) {
    throw Error(ErrorCode::DegenerateStratum, "instrument is constant");
  }
  const double first_stage = sd[1] / sw[1] - sd[0] / sw[0];
  if (std::abs(first_stage) < kFirstStageTolerance) {
    throw Error(ErrorCode::ZeroFirstStage, "treatment rates do not differ across instrument arms");
  }
  return (sy[1] / sw[1] - sy[0] / sw[0]) / first_stage;
}

EstimateReport tsls(std::span<const double> y, std::span<const double> d, std::span<const double> z,
                    std::span<const std::size_t> strata, PoolingMode mode, std::span<const double> weights) {
  const std::size_t n = y.size();
  require_same_size(n, d.size(), "d");
  require_same_size(n, z.size(), "z");
  if (mode == PoolingMode::FixedEffects) require_same_size(n, strata.size(), "strata");
  if (!weights.empty()) require_same_size(n, weights.size(), "weights");
  require_positive(weights);
  if (n == 0) throw Error(ErrorCode::DegenerateStratum, "no observations");

  EstimateReport report;
  report.estimator = Estimator::TSLS;
  report.pooling = mode;
  report.n_used = n;

  if (mode == PoolingMode::Reweighting && weights.empty()) {
    throw Error(ErrorCode::DomainError, "reweighting mode requires weights");
  }
  if (mode == PoolingMode::FixedEffects && !weights.empty()) {
    report.warnings.push_back({WarningCode::Unvalidated, "weighted fixed-effects 2SLS has not been validated"});
  }

  // Group index per row: strata under fixed effects, one group otherwise.
  std::vector<std::size_t> group(n, 0);
  std::size_t groups = 1;
  if (mode == PoolingMode::FixedEffects) {
    std::unordered_map<std::size_t, std::size_t> compact;
    for (std::size_t i = 0; i < n; ++i) {
      group[i] = compact.try_emplace(strata[i], compact.size()).first->second;
    }
    groups = compact.size();
    if (groups == 1) {
      report.warnings.push_back({WarningCode::SingleStratumFE, "only one stratum: fixed effects reduce to plain IV"});
    }
  }

  // Weights rescaled to mean one; this leaves the point estimate unchanged
  // and gives the variance estimate its usual scale.
  std::vector<double> w(n, 1.0);
  if (!weights.empty()) {
    double total = 0.0;
    for (const double x : weights) total += x;
    for (std::size_t i = 0; i < n; ++i) w[i] = weights[i] * static_cast<double>(n) / total;
  }

  std::vector<double> sw(groups, 0.0);
  std::vector<double> my(groups, 0.0);
  std::vector<double> md(groups, 0.0);
  std::vector<double> mz(groups, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sw[group[i]] += w[i];
    my[group[i]] += w[i] * y[i];
    md[group[i]] += w[i] * d[i];
    mz[group[i]] += w[i] * z[i];
  }
  for (std::size_t g = 0; g < groups; ++g) {
    my[g] /= sw[g];
    md[g] /= sw[g];
    mz[g] /= sw[g];
  }

  double szd = 0.0;
  double szy = 0.0;
  double szz = 0.0;
  double sum_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = group[i];
    const double zt = z[i] - mz[g];
    szd += w[i] * zt * (d[i] - md[g]);
    szy += w[i] * zt * (y[i] - my[g]);
    szz += w[i] * zt * zt;
    sum_w += w[i];
  }
  if (std::abs(szd) / sum_w < kFirstStageTolerance) {
    throw Error(ErrorCode::ZeroFirstStage, "instrument does not move treatment");
  }
  const double beta = szy / szd;
  report.point_estimate = beta;

  const auto dof = static_cast<long>(n) - static_cast<long>(groups) - 1;
  if (dof > 0) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t g = group[i];
      const double e = (y[i] - my[g]) - beta * (d[i] - md[g]);
      sse += w[i] * e * e;
    }
    const double sigma2 = sse / static_cast<double>(dof);
    report.std_error = std::sqrt(sigma2 * szz) / std::abs(szd);
  }
  return report;
}

EstimateReport estimate(std::span<const double> y, std::span<const double> d,
                        const WeightedInstrumentSample& sample) {
  require_same_size(y.size(), d.size(), "d");
  const std::size_t n = sample.rows.size();
  std::vector<double> ys(n);
  std::vector<double> ds(n);
  std::vector<double> zs(n);
  std::vector<double> ws(n);
  std::vector<std::size_t> strata(n);
  for (std::size_t j = 0; j < n; ++j) {
    const SampleRow& row = sample.rows[j];
    if (row.record >= y.size()) {
      throw Error(ErrorCode::MismatchedInputs, "sample refers to record " + std::to_string(row.record) +
                                                   " beyond the outcome vector");
    }
    ys[j] = y[row.record];
    ds[j] = d[row.record];
    zs[j] = row.instrument ? 1.0 : 0.0;
    ws[j] = row.weight;
    strata[j] = row.stratum;
  }
  std::span<const double> weights;
  if (sample.mode == PoolingMode::Reweighting) weights = ws;
  EstimateReport report = tsls(ys, ds, zs, strata, sample.mode, weights);
  report.instrument = sample.instrument;
  report.n_excluded = sample.excluded.size();
  report.warnings.insert(report.warnings.begin(), sample.warnings.begin(), sample.warnings.end());
  return report;
}

BalanceShares balance_diagnostic(std::span<const StudentRecord> records, const WeightedInstrumentSample& sample) {
  ExactRational weight[2];
  ExactRational accepters[2];
  for (const SampleRow& row : sample.rows) {
    const StudentRecord& rec = records[row.record];
    if (!rec.accepter) {
      throw Error(ErrorCode::MissingTypes, "accepter status unknown for student '" + rec.student_id + "'");
    }
    const StratumWeights& sw = *sample.strata[row.stratum];
    const ExactRational& w = row.instrument ? sw.treated : sw.control;
    const int arm = row.instrument ? 1 : 0;
    weight[arm] += w;
    if (*rec.accepter) accepters[arm] += w;
  }
  if (weight[0].is_zero() || weight[1].is_zero()) {
    throw Error(ErrorCode::DegenerateStratum, "an instrument arm is empty");
  }
  return {accepters[1] / weight[1], accepters[0] / weight[0]};
}

}  // namespace waitlist
