#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace eefluct {

/// Shortest round-trip decimal; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double value);

/// Comma-separated table with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t n_rows() const noexcept { return rows_.size(); }

  /// Throws ValidationError if the cell count does not match the header.
  void add_row(std::vector<std::string> cells);

  /// '#' + compact metadata JSON, header, rows; '\n' line endings.
  std::string render(const nlohmann::json& metadata) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `contents` next to `path` and renames it into place, so readers
/// never observe a partial file. Throws Error(Io) on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace eefluct
