#include "core/csv.hpp"

#include <charconv>
#include <filesystem>
#include <system_error>

#include "core/config.hpp"
#include "core/errors.hpp"

namespace gfet {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create output directory '" + path + "': " + ec.message());
}

CsvWriter::CsvWriter(const std::string& path, const DeviceConfig& cfg,
                     const std::vector<std::string>& header,
                     const std::vector<std::string>& extra_comments)
    : out_(path, std::ios::binary), columns_(header.size()), path_(path) {
  if (!out_) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : cfg.to_key_values()) out_ << "# " << k << "=" << v << "\n";
  for (const auto& c : extra_comments) out_ << "# " << c << "\n";
  for (std::size_t i = 0; i < header.size(); ++i)
    out_ << header[i] << (i + 1 < header.size() ? "," : "");
  out_ << "\n";
}

CsvWriter::~CsvWriter() { out_.flush(); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw IoError("csv row width mismatch in " + path_);
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "");
  out_ << "\n";
  if (!out_) throw IoError("write failure on " + path_);
}

void CsvWriter::row_cells(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw IoError("csv row width mismatch in " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
  out_ << "\n";
  if (!out_) throw IoError("write failure on " + path_);
}

}  // namespace gfet
