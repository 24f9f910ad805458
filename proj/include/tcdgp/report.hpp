#pragma once

#include <string>

#include "tcdgp/scenario.hpp"

namespace tcdgp {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kCsvHeader = "cycle,segment,direction,count,mean_speed,truth_mean,abs_err";

// CSV: '#'-prefixed config and metric lines, then kCsvHeader and one row per
// (cycle, segment, direction). Missing aggregates leave mean_speed and
// abs_err empty.
std::string toCsv(const RunReport& report);

// JSON object with exactly the keys config, metrics and cycles.
std::string toJson(const RunReport& report);

// Throws std::runtime_error when the file cannot be written.
void emitReport(const RunReport& report, OutputFormat format, const std::string& path);

}  // namespace tcdgp
