#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace homonet {

// Doubles print with "%.12g": enough digits to be stable across runs while
// keeping CSVs readable.
std::string format_double(double v);

// Minimal CSV writer; fields containing comma, quote or newline are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& fields);
  void close();

 private:
  struct Impl;
  Impl* impl_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

// FNV-1a, used for content-addressed pipeline caching.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace homonet
