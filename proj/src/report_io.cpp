#include "shardbench/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "shardbench/version.hpp"

namespace shardbench {
namespace {

using nlohmann::json;

constexpr const char* kTable1Header =
    "algorithm,lookup_ns,variance_before,variance_after,moved_ratio";
constexpr const char* kGradesHeader = "algorithm,uniformity,rebalancing,lookup_speed";

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string ratio_text(double ratio, bool infinite) {
  return infinite ? "inf" : fixed2(ratio);
}

json ratio_json(double ratio, bool infinite) {
  if (infinite) return "inf";
  return ratio;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(field);
  return fields;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw Error(Errc::kInvalidArgument, "malformed number '" + text + "'");
  }
  return value;
}

Table1Row parse_table1_fields(const std::vector<std::string>& fields) {
  Table1Row row;
  const auto algorithm = algorithm_from_string(fields[0]);
  if (!algorithm) {
    throw Error(Errc::kInvalidArgument, "unknown algorithm '" + fields[0] + "'");
  }
  row.algorithm = *algorithm;
  row.lookup_ns = parse_number(fields[1]);
  row.variance_before = parse_number(fields[2]);
  row.variance_after = parse_number(fields[3]);
  if (fields[4] == "inf") {
    row.moved_ratio = std::numeric_limits<double>::infinity();
    row.ratio_infinite = true;
  } else {
    row.moved_ratio = parse_number(fields[4]);
  }
  return row;
}

}  // namespace

json meta_to_json(const ReportMeta& meta) {
  json out = json::object();
  out["tool"] = kToolName;
  out["version"] = kVersionString;
  out["kind"] = meta.kind;
  out["seed"] = meta.seed;
  out["config"] = meta.config;
  return out;
}

std::string table1_to_csv(const std::vector<Table1Row>& rows) {
  std::ostringstream out;
  out << kTable1Header << '\n';
  for (const Table1Row& row : rows) {
    out << to_string(row.algorithm) << ',' << std::llround(row.lookup_ns) << ','
        << fixed2(row.variance_before) << ',' << fixed2(row.variance_after) << ','
        << ratio_text(row.moved_ratio, row.ratio_infinite) << '\n';
  }
  return out.str();
}

std::string table1_to_json(const std::vector<Table1Row>& rows, const ReportMeta& meta) {
  json doc = json::object();
  doc["meta"] = meta_to_json(meta);
  json out_rows = json::array();
  for (const Table1Row& row : rows) {
    json r = json::object();
    r["algorithm"] = to_string(row.algorithm);
    r["lookup_ns"] = row.lookup_ns;
    r["variance_before"] = row.variance_before;
    r["variance_after"] = row.variance_after;
    r["moved_ratio"] = ratio_json(row.moved_ratio, row.ratio_infinite);
    out_rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(out_rows);
  return doc.dump(2) + "\n";
}

std::vector<Table1Row> parse_table1_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  std::vector<Table1Row> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kTable1Header) {
        throw Error(Errc::kInvalidArgument, "unexpected table1 CSV header: '" + line + "'");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw Error(Errc::kInvalidArgument, "table1 CSV row needs 5 fields: '" + line + "'");
    }
    rows.push_back(parse_table1_fields(fields));
  }
  if (rows.empty()) {
    throw Error(Errc::kIncompleteInput, "table1 input has no data rows");
  }
  return rows;
}

std::vector<Table1Row> parse_table1_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::kInvalidArgument, std::string("bad table1 JSON: ") + e.what());
  }
  if (!doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(Errc::kInvalidArgument, "table1 JSON has no rows array");
  }
  std::vector<Table1Row> rows;
  for (const json& r : doc["rows"]) {
    Table1Row row;
    const auto algorithm = algorithm_from_string(r.at("algorithm").get<std::string>());
    if (!algorithm) {
      throw Error(Errc::kInvalidArgument, "unknown algorithm in table1 JSON");
    }
    row.algorithm = *algorithm;
    row.lookup_ns = r.at("lookup_ns").get<double>();
    row.variance_before = r.at("variance_before").get<double>();
    row.variance_after = r.at("variance_after").get<double>();
    const json& ratio = r.at("moved_ratio");
    if (ratio.is_string()) {
      if (ratio.get<std::string>() != "inf") {
        throw Error(Errc::kInvalidArgument, "bad moved_ratio in table1 JSON");
      }
      row.moved_ratio = std::numeric_limits<double>::infinity();
      row.ratio_infinite = true;
    } else {
      row.moved_ratio = ratio.get<double>();
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw Error(Errc::kIncompleteInput, "table1 input has no data rows");
  }
  return rows;
}

std::string grades_to_csv(const std::vector<GradeRow>& rows) {
  std::ostringstream out;
  out << kGradesHeader << '\n';
  for (const GradeRow& row : rows) {
    out << to_string(row.algorithm) << ',' << to_string(row.uniformity) << ','
        << to_string(row.rebalancing) << ',' << to_string(row.lookup_speed) << '\n';
  }
  return out.str();
}

std::string grades_to_json(const std::vector<GradeRow>& rows, const GradeThresholds& thresholds,
                           const ReportMeta& meta) {
  json doc = json::object();
  doc["meta"] = meta_to_json(meta);
  doc["meta"]["thresholds"] = {
      {"uniformity_high", thresholds.uniformity_high},
      {"uniformity_medium", thresholds.uniformity_medium},
      {"rebalance_high", thresholds.rebalance_high},
      {"rebalance_medium", thresholds.rebalance_medium},
      {"speed_high", thresholds.speed_high},
      {"speed_medium", thresholds.speed_medium},
  };
  json out_rows = json::array();
  for (const GradeRow& row : rows) {
    json r = json::object();
    r["algorithm"] = to_string(row.algorithm);
    r["uniformity"] = to_string(row.uniformity);
    r["rebalancing"] = to_string(row.rebalancing);
    r["lookup_speed"] = to_string(row.lookup_speed);
    out_rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(out_rows);
  return doc.dump(2) + "\n";
}

std::string nodewalk_steps_to_csv(const std::vector<NodeWalkTrace>& traces) {
  std::ostringstream out;
  out << "algorithm,step,label,moved,optimal,moved_ratio,variance_before,variance_after,"
         "elapsed_seconds\n";
  for (const NodeWalkTrace& trace : traces) {
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      const RebalanceReport& report = trace.steps[i].report;
      out << to_string(trace.algorithm) << ',' << (i + 1) << ',' << report.label << ','
          << report.moved << ',' << report.optimal << ','
          << ratio_text(report.ratio, report.ratio_infinite) << ','
          << fixed2(report.stats_before.variance) << ',' << fixed2(report.stats_after.variance)
          << ',' << fixed6(report.elapsed_seconds) << '\n';
    }
  }
  return out.str();
}

std::string nodewalk_distribution_to_csv(const std::vector<NodeWalkTrace>& traces) {
  std::ostringstream out;
  out << "algorithm,step,label,total";
  if (!traces.empty()) {
    for (ShardId id : traces.front().shard_universe) {
      out << ",shard_" << id;
    }
  }
  out << '\n';
  auto emit = [&](const NodeWalkTrace& trace, std::size_t step, const std::string& label,
                  const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    out << to_string(trace.algorithm) << ',' << step << ',' << label << ',' << total;
    for (std::uint64_t c : counts) {
      out << ',' << c;
    }
    out << '\n';
  };
  for (const NodeWalkTrace& trace : traces) {
    emit(trace, 0, "initial", trace.initial_counts);
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
      emit(trace, i + 1, trace.steps[i].label, trace.steps[i].counts);
    }
  }
  return out.str();
}

std::string timing_to_json(const std::vector<TimingRow>& rows, const ReportMeta& meta) {
  json doc = json::object();
  doc["meta"] = meta_to_json(meta);
  json out_rows = json::array();
  for (const TimingRow& row : rows) {
    out_rows.push_back({{"algorithm", to_string(row.algorithm)},
                        {"mean_lookup_ns", row.mean_lookup_ns}});
  }
  doc["rows"] = std::move(out_rows);
  return doc.dump(2) + "\n";
}

std::string nodewalk_to_json(const std::vector<NodeWalkTrace>& traces, const ReportMeta& meta) {
  json doc = json::object();
  doc["meta"] = meta_to_json(meta);
  json out_traces = json::array();
  for (const NodeWalkTrace& trace : traces) {
    json t = json::object();
    t["algorithm"] = to_string(trace.algorithm);
    t["shard_universe"] = trace.shard_universe;
    t["initial_counts"] = trace.initial_counts;
    t["roundtrip_restored"] = trace.roundtrip_restored;
    json steps = json::array();
    for (const NodeWalkStep& step : trace.steps) {
      json s = json::object();
      s["label"] = step.label;
      s["moved"] = step.report.moved;
      s["optimal"] = step.report.optimal;
      s["moved_ratio"] = ratio_json(step.report.ratio, step.report.ratio_infinite);
      s["variance_before"] = step.report.stats_before.variance;
      s["variance_after"] = step.report.stats_after.variance;
      s["elapsed_seconds"] = step.report.elapsed_seconds;
      s["counts"] = step.counts;
      steps.push_back(std::move(s));
    }
    t["steps"] = std::move(steps);
    out_traces.push_back(std::move(t));
  }
  doc["traces"] = std::move(out_traces);
  return doc.dump(2) + "\n";
}

}  // namespace shardbench
