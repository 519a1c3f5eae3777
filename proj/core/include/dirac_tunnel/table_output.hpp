#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dirac_tunnel {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// Column-oriented result table, written either as CSV (with a leading
/// '# key=value ...' comment line) or as a JSON object.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// 17 significant digits, '.' separator, independent of the global locale.
std::string format_real(double value);

void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Table& table);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace dirac_tunnel
