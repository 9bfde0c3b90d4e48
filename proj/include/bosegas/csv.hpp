#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bosegas/lattice.hpp"

namespace bosegas {

/// RFC-4180 field quoting: fields holding a comma, quote, CR or LF are
/// wrapped in quotes with inner quotes doubled.
std::string csv_escape(const std::string& field);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);
std::string format_ivec(const IVec3& n);

/// Writes CRLF-terminated rows. Throws ConfigError if the file cannot be opened.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

}  // namespace bosegas
