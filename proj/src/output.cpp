#include "eefluct/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include "eefluct/error.hpp"

namespace eefluct {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw Error(ErrorKind::ValidationError, "CSV row has " + std::to_string(cells.size()) +
                                                " cells, header has " +
                                                std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const nlohmann::json& metadata) const {
  std::string out = "#" + metadata.dump() + "\n";
  auto append_line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append_line(columns_);
  for (const auto& row : rows_) append_line(row);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorKind::Io, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(ErrorKind::Io, "cannot move output into place at " + path.string() + ": " +
                                   ec.message());
  }
}

}  // namespace eefluct
