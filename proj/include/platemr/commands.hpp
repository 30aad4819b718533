#pragma once

// Dispatch of a validated RunConfig to the module operations.

#include <iosfwd>
#include <string>
#include <vector>

#include "platemr/config.hpp"
#include "platemr/report.hpp"

namespace platemr {

struct RunResult {
  ReportEnvelope envelope;
  CsvTable table;
  std::vector<std::string> summary;  // key=value lines for the terminal
};

// Module errors become a failed "error" record carrying the message.
RunResult run(const RunConfig& config);

// run(), then writes the CSV and JSON-lines files and prints the summary.
// Returns the exit status (0 all pass, 1 any fail).
int run_and_write(const RunConfig& config, std::ostream& out);

}  // namespace platemr
