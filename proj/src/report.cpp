#include "platemr/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unistd.h>

#include "json.hpp"
#include "platemr/errors.hpp"

namespace platemr {

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::size_t ReportEnvelope::failures() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.verdict == Verdict::fail;
  return n;
}

int exit_code(const ReportEnvelope& env) { return env.ok() ? 0 : 1; }

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw ArgumentError("csv row has the wrong number of cells");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + csv_cell(table.columns[i]);
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += '\n';
  }
  return out;
}

std::string to_jsonl(const ReportEnvelope& env) {
  using json = nlohmann::ordered_json;
  std::string out;
  json head = {{"type", "envelope"}, {"tool", kToolName},   {"version", kToolVersion},
               {"command", env.command}, {"seed", env.seed}, {"config", env.config}};
  out += head.dump() + '\n';
  for (const auto& r : env.records) {
    json line = {{"type", "record"},   {"name", r.name},     {"value", number(r.value)}, {"bound", number(r.bound)},
                 {"verdict", to_string(r.verdict)}, {"anchor", r.anchor}};
    if (!r.detail.empty()) line["detail"] = r.detail;
    out += line.dump() + '\n';
  }
  json tail = {{"type", "summary"},
               {"records", env.records.size()},
               {"failed", env.failures()},
               {"verdict", env.ok() ? "pass" : "fail"},
               {"wall_time_s", env.wall_time}};
  out += tail.dump() + '\n';
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ArgumentError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw ArgumentError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ArgumentError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace platemr
