#ifndef TOPSAMP_CSV_HPP
#define TOPSAMP_CSV_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace topsamp {

using Cell = std::variant<std::int64_t, double, std::string>;

/// A rectangular result table written as CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// 17 significant digits, '.' decimal point, "nan"/"inf"/"-inf" for
/// non-finite values.
std::string format_double(double v);

/// Header row plus one line per row, comma separated, LF line endings.
void write_csv(std::ostream& out, const Table& table);

/// {"columns": [...], "rows": [[...]], "metadata": {...}}; non-finite
/// doubles become null.
void write_json(std::ostream& out, const Table& table, const nlohmann::json& metadata);

}  // namespace topsamp

#endif  // TOPSAMP_CSV_HPP
