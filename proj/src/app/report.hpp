#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace bosegas::app {

/// A result table written as RFC-4180 CSV and as a JSON array of row objects.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Cells are numbers, strings or booleans; size must match the columns.
  void add(std::vector<nlohmann::json> row);
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<nlohmann::json>>& rows() const { return rows_; }

  /// Writes <stem>.csv and <stem>.json into dir and records both in `written`.
  void write(const std::filesystem::path& dir, const std::string& stem,
             std::vector<std::filesystem::path>& written) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<nlohmann::json>> rows_;
};

std::string cell_text(const nlohmann::json& cell);

/// Git blob hash of a byte string: SHA-1 over "blob <size>\0" + bytes.
std::string git_blob_hash(const std::string& bytes);
std::string git_blob_hash_file(const std::filesystem::path& path);

/// manifest.json: tool, version, command, effective config, UTC timestamp,
/// per-file blob hashes and a content hash over the sorted (name, hash) list.
/// Returns the content hash.
std::string write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const nlohmann::json& config,
                           const std::vector<std::filesystem::path>& files);

}  // namespace bosegas::app
