#ifndef TSE_TABLE_IO_HPP
#define TSE_TABLE_IO_HPP

// CSV / JSON serialization shared by the library tables and the CLI.
// Numbers are written in the shortest decimal form that reads back to the
// identical double (at most 17 significant digits).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tse/core.hpp"
#include "tse/sampling.hpp"
#include "tse/scenario.hpp"

namespace tse {

std::string format_double(double x);
std::optional<double> parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// Comma separated, '\n' line endings, fields quoted only when they contain
/// a comma, quote or newline.
std::string to_csv(const CsvTable& table);
/// Inverse of to_csv. Throws InvalidArgument on ragged or malformed input.
CsvTable parse_csv(std::string_view text);

/// Array of objects keyed by header; numeric-looking fields become numbers,
/// empty fields become null.
std::string to_json(const CsvTable& table);

// Tables for the library's result types.
CsvTable trajectory_table(const std::vector<RawState>& states);
CsvTable sweep_table(const std::vector<SweepRow>& rows);
CsvTable replication_table(const std::vector<EmpiricalTrajectory>& runs);
CsvTable deviation_table(const std::vector<DeviationRow>& rows);

}  // namespace tse

#endif  // TSE_TABLE_IO_HPP
