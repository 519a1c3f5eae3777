#include "dirac_tunnel/table_output.hpp"

#include <array>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "dirac_tunnel/errors.hpp"

namespace dirac_tunnel {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

namespace {

std::string csv_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<V, std::string>) {
          return v;
        } else {
          return fmt::format("{}", v);
        }
      },
      cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, cell);
}

}  // namespace

void write_csv(std::ostream& os, const Table& table) {
  if (!table.meta.empty()) {
    os << '#';
    for (const auto& [key, value] : table.meta) os << ' ' << key << '=' << value;
    os << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& table) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.meta) meta[key] = value;
  doc["meta"] = meta;
  doc["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const Cell& c : row) r.push_back(json_cell(c));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

std::string to_csv(const Table& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

std::string to_json(const Table& table) {
  std::ostringstream os;
  write_json(os, table);
  return os.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace dirac_tunnel
