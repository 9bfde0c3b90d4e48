#include "app/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "bosegas/csv.hpp"
#include "bosegas/errors.hpp"

namespace bosegas::app {

using nlohmann::json;

void Table::add(std::vector<json> row) {
  if (row.size() != columns_.size()) throw std::logic_error("table row width mismatch");
  rows_.push_back(std::move(row));
}

std::string cell_text(const json& cell) {
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
  if (cell.is_number_integer()) return std::to_string(cell.get<long long>());
  if (cell.is_number_unsigned()) return std::to_string(cell.get<unsigned long long>());
  if (cell.is_number_float()) return format_double(cell.get<double>());
  if (cell.is_null()) return "";
  return cell.dump();
}

void Table::write(const std::filesystem::path& dir, const std::string& stem,
                  std::vector<std::filesystem::path>& written) const {
  const auto csv_path = dir / (stem + ".csv");
  {
    CsvWriter w(csv_path);
    w.row(columns_);
    for (const auto& r : rows_) {
      std::vector<std::string> f;
      for (const auto& c : r) f.push_back(cell_text(c));
      w.row(f);
    }
  }
  json arr = json::array();
  for (const auto& r : rows_) {
    json obj = json::object();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      // JSON has no NaN/inf; keep them as strings.
      if (r[i].is_number_float() && !std::isfinite(r[i].get<double>())) {
        obj[columns_[i]] = cell_text(r[i]);
      } else {
        obj[columns_[i]] = r[i];
      }
    }
    arr.push_back(std::move(obj));
  }
  const auto json_path = dir / (stem + ".json");
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + json_path.string());
  out << arr.dump(2) << "\n";
  written.push_back(csv_path);
  written.push_back(json_path);
}

std::string git_blob_hash(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return git_blob_hash(ss.str());
}

std::string write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const json& config, const std::vector<std::filesystem::path>& files) {
  std::vector<std::pair<std::string, std::string>> entries;
  json jf = json::array();
  for (const auto& f : files) entries.emplace_back(f.filename().string(), git_blob_hash_file(f));
  std::sort(entries.begin(), entries.end());
  std::string listing;
  for (const auto& [name, hash] : entries) {
    listing += hash + " " + name + "\n";
    jf.push_back({{"name", name}, {"blob", hash}, {"bytes", std::filesystem::file_size(dir / name)}});
  }
  const std::string content_hash = git_blob_hash(listing);

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

  json m = {{"tool", "bosegas"},
            {"version", BOSEGAS_VERSION},
            {"command", command},
            {"timestamp", stamp},
            {"config", config},
            {"files", jf},
            {"content_hash", content_hash}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw ConfigError("cannot write manifest in " + dir.string());
  out << m.dump(2) << "\n";
  return content_hash;
}

}  // namespace bosegas::app
