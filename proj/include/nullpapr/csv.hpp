#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace nullpapr {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Minimal comma-separated writer with a fixed header. Cells are written
/// exactly as given; numbers go through format_double.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            std::initializer_list<std::string_view> header);

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace nullpapr
