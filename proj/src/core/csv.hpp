#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace gfet {

struct DeviceConfig;

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

// Comma-separated writer with LF line endings and a `# key=value` preamble
// echoing the resolved configuration, so every emitted file is reproducible.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const DeviceConfig& cfg,
            const std::vector<std::string>& header,
            const std::vector<std::string>& extra_comments = {});
  ~CsvWriter();

  void row(const std::vector<double>& values);
  // Mixed row: string cells are written verbatim (used for status columns).
  void row_cells(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::string path_;
};

void ensure_directory(const std::string& path);

}  // namespace gfet
