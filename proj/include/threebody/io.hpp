#pragma once
// Tables, JSON documents and atomically committed output directories.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace threebody {

using json = nlohmann::ordered_json;

/// 12 significant digits; inf, -inf and nan spelled out.
std::string format_number(double value);

/// Finite values as numbers, the rest as the strings of format_number.
json json_number(double value);
json json_array(const std::vector<double>& values);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Files staged in memory and written only by commit(), after the computation
/// has succeeded. The manifest is written last.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path directory);

  void add(const std::string& name, std::string content);
  void add(const std::string& name, const json& document);
  void add(const std::string& name, const CsvTable& table);
  const std::filesystem::path& directory() const { return directory_; }
  std::vector<std::string> names() const;

  void commit(const json& manifest) const;

 private:
  std::filesystem::path directory_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace threebody
