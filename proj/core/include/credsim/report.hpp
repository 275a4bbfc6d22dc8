#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "credsim/runner.hpp"

namespace credsim {

// CSV with one row per VM plus one idle row per scenario. Fixed column
// order and fixed-precision formatting keep output byte-stable for a given
// (scenario, seed).
void write_csv(std::ostream& os, std::span<const RunReport> reports);
std::string csv_string(std::span<const RunReport> reports);

// JSON mirror of the report structure (stable field order).
std::string json_string(std::span<const RunReport> reports);
std::vector<RunReport> reports_from_json_string(const std::string& text);

// Writes to the path, or to the stream when path is empty. I/O failures
// surface as ConfigError with the path.
void write_output(const std::string& path, const std::string& content,
                  std::ostream& fallback);

}  // namespace credsim
