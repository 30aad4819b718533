#pragma once

// Check records, CSV tables and the JSON-lines report envelope. Files are
// written to a temporary sibling and renamed into place.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "platemr/verdict.hpp"

namespace platemr {

inline constexpr const char* kToolName = "plate-mr";
inline constexpr const char* kToolVersion = "0.1.0";

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double bound = 0.0;  // NaN when the record is informational
  Verdict verdict = Verdict::pass;
  std::string anchor;  // which identity or estimate the check exercises
  std::string detail;
};

struct ReportEnvelope {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;
  double wall_time = 0.0;

  std::size_t failures() const;
  bool ok() const { return failures() == 0; }
};

// 0 when no record failed, 1 otherwise.
int exit_code(const ReportEnvelope& env);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
};

// Shortest round-trip decimal form; nan/inf spelled out.
std::string format_number(double v);

std::string to_csv(const CsvTable& table);
// Envelope line, one line per record, summary line.
std::string to_jsonl(const ReportEnvelope& env);

void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace platemr
