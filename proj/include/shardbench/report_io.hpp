#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "shardbench/experiments.hpp"

namespace shardbench {

/// Run metadata embedded in every JSON report so a run can be reproduced
/// from its own output (timing fields aside).
struct ReportMeta {
  std::string kind;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json meta_to_json(const ReportMeta& meta);

// CSV schemas are fixed: header row mandatory, `.` decimal separator, UTF-8,
// timings in integer nanoseconds, ratios with two decimals ("inf" when the
// optimal is zero but records moved).

std::string table1_to_csv(const std::vector<Table1Row>& rows);
std::string table1_to_json(const std::vector<Table1Row>& rows, const ReportMeta& meta);

/// Strict parse of the table1 CSV schema. Throws kIncompleteInput when there
/// are no data rows, kInvalidArgument on malformed content.
std::vector<Table1Row> parse_table1_csv(const std::string& text);
std::vector<Table1Row> parse_table1_json(const std::string& text);

std::string grades_to_csv(const std::vector<GradeRow>& rows);
std::string grades_to_json(const std::vector<GradeRow>& rows, const GradeThresholds& thresholds,
                           const ReportMeta& meta);

std::string nodewalk_steps_to_csv(const std::vector<NodeWalkTrace>& traces);
std::string nodewalk_distribution_to_csv(const std::vector<NodeWalkTrace>& traces);
std::string nodewalk_to_json(const std::vector<NodeWalkTrace>& traces, const ReportMeta& meta);

std::string timing_to_json(const std::vector<TimingRow>& rows, const ReportMeta& meta);

}  // namespace shardbench
