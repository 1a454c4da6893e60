#include "csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "waitlist/error.hpp"

namespace waitlist::cli {

namespace {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  return text;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Ingestion, "line " + std::to_string(line) + ": " + what);
}

enum Column { kStudent, kStratum, kRank, kOffered, kEnrolled, kOutcome, kAccepter, kColumns };
constexpr std::array<std::string_view, kColumns> kNames = {"student_id", "stratum_id", "rank",    "offered",
                                                            "enrolled",   "outcome",    "accepter"};

bool parse_flag(std::string_view text, std::size_t line, std::string_view column) {
  if (text == "1") return true;
  if (text == "0") return false;
  fail(line, std::string(column) + " must be 0 or 1, got '" + std::string(text) + "'");
}

}  // namespace

StudentTable read_student_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(1, "missing header");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::array<std::optional<std::size_t>, kColumns> position;
  const auto header = split(line);
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (std::size_t c = 0; c < kColumns; ++c) {
      if (header[i] == kNames[c]) {
        if (position[c]) fail(line_no, "duplicate column '" + std::string(kNames[c]) + "'");
        position[c] = i;
      }
    }
  }
  for (std::size_t c = 0; c < kAccepter; ++c) {
    if (!position[c]) fail(line_no, "header lacks required column '" + std::string(kNames[c]) + "'");
  }

  StudentTable table;
  table.has_accepter = position[kAccepter].has_value();
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      fail(line_no, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    auto field = [&](Column c) { return fields[*position[c]]; };

    StudentRecord rec;
    rec.student_id = std::string(field(kStudent));
    rec.stratum_id = std::string(field(kStratum));
    if (rec.student_id.empty()) fail(line_no, "empty student_id");
    if (rec.stratum_id.empty()) fail(line_no, "empty stratum_id");

    const auto rank_text = field(kRank);
    const auto [rank_end, rank_ec] = std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rec.rank);
    if (rank_ec != std::errc() || rank_end != rank_text.data() + rank_text.size() || rec.rank < 1) {
      fail(line_no, "rank must be a positive integer, got '" + std::string(rank_text) + "'");
    }
    rec.offered = parse_flag(field(kOffered), line_no, "offered");
    rec.enrolled = parse_flag(field(kEnrolled), line_no, "enrolled");

    const auto y_text = field(kOutcome);
    const auto [y_end, y_ec] = std::from_chars(y_text.data(), y_text.data() + y_text.size(), rec.outcome);
    if (y_ec != std::errc() || y_end != y_text.data() + y_text.size() || !std::isfinite(rec.outcome)) {
      fail(line_no, "outcome must be a finite decimal, got '" + std::string(y_text) + "'");
    }
    if (table.has_accepter) rec.accepter = parse_flag(field(kAccepter), line_no, "accepter");
    table.records.push_back(std::move(rec));
  }
  if (table.records.empty()) fail(line_no, "no data rows");
  return table;
}

void write_student_csv(std::ostream& out, std::span<const StudentRecord> records, bool with_accepter) {
  out << "student_id,stratum_id,rank,offered,enrolled,outcome" << (with_accepter ? ",accepter" : "") << "\n";
  char number[32];
  for (const StudentRecord& rec : records) {
    std::snprintf(number, sizeof number, "%.17g", rec.outcome);
    out << rec.student_id << ',' << rec.stratum_id << ',' << rec.rank << ',' << (rec.offered ? 1 : 0) << ','
        << (rec.enrolled ? 1 : 0) << ',' << number;
    if (with_accepter) out << ',' << (rec.accepter.value_or(false) ? 1 : 0);
    out << "\n";
  }
}

}  // namespace waitlist::cli
