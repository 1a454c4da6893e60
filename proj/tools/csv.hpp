#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "waitlist/estimation.hpp"

namespace waitlist::cli {

struct StudentTable {
  std::vector<StudentRecord> records;
  /// True when the optional `accepter` column is present.
  bool has_accepter = false;
};

/// Reads the student CSV: a required header naming student_id, stratum_id,
/// rank, offered, enrolled and outcome (any order), plus an optional
/// accepter column. Throws Ingestion errors carrying the line number.
StudentTable read_student_csv(std::istream& in);

void write_student_csv(std::ostream& out, std::span<const StudentRecord> records, bool with_accepter);

}  // namespace waitlist::cli
