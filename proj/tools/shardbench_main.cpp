// shardbench command line: runs the rebalance benchmark experiments against
// the shared library's C API and writes the CSV/JSON reports.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shardbench.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

constexpr const char* kOutDirEnv = "SHARDBENCH_OUT_DIR";

struct ScopedString {
  char* value = nullptr;
  ~ScopedString() { sb_string_free(value); }
  char** out() { return &value; }
};

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return (env != nullptr && *env != '\0') ? env : ".";
}

fs::path resolve_out(const std::string& flag_value, const std::string& default_name) {
  if (!flag_value.empty()) return flag_value;
  return fs::path(default_out_dir()) / default_name;
}

fs::path sibling_with_extension(const fs::path& base, const char* extension) {
  fs::path out = base;
  out.replace_extension(extension);
  return out;
}

bool write_file(const fs::path& path, const char* content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path.string() << "' for writing\n";
    return false;
  }
  out << content;
  out.flush();
  if (!out) {
    std::cerr << "error: short write to '" << path.string() << "'\n";
    return false;
  }
  std::cout << "wrote " << path.string() << "\n";
  return true;
}

bool parse_algorithms(const std::string& names, uint32_t* mask) {
  *mask = 0;
  if (names.empty() || names == "all") return true;
  std::stringstream in(names);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    sb_algorithm algorithm;
    if (sb_algorithm_from_name(token.c_str(), &algorithm) != SB_OK) {
      std::cerr << "error: unknown algorithm '" << token << "'\n";
      return false;
    }
    *mask |= 1u << algorithm;
  }
  return true;
}

int exit_code_for(sb_status status) {
  // Configuration and capacity problems come from flag combinations;
  // everything else is a runtime failure.
  switch (status) {
    case SB_ERR_CONFIGURATION:
    case SB_ERR_CAPACITY:
    case SB_ERR_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

int report_api_error(const char* what, sb_status status) {
  std::cerr << "error: " << what << ": " << sb_status_name(status) << " ("
            << sb_last_error_message() << ")\n";
  return exit_code_for(status);
}

struct CommonFlags {
  std::string algorithms = "all";
  std::uint64_t seed = 42;
  std::uint32_t ring_points = 16;
  std::uint32_t maglev_m = 103;
  std::uint32_t anchor_capacity = 64;

  void attach(CLI::App* cmd) {
    cmd->add_option("--algorithms", algorithms,
                    "Comma-separated algorithm names, or 'all'")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed for the run")->capture_default_str();
    cmd->add_option("--ring-points", ring_points,
                    "Consistent hashing points per shard")->capture_default_str();
    cmd->add_option("--maglev-m", maglev_m,
                    "Maglev lookup table size (prime)")->capture_default_str();
    cmd->add_option("--anchor-capacity", anchor_capacity,
                    "AnchorHash anchor set size")->capture_default_str();
  }

  // Overlays the shared flags onto a config whose command-specific fields
  // CLI11 already populated.
  bool fill(sb_experiment_config* config) const {
    if (!parse_algorithms(algorithms, &config->algorithm_mask)) return false;
    config->seed = seed;
    config->params.ring_points_per_shard = ring_points;
    config->params.maglev_table_size = maglev_m;
    config->params.anchor_capacity = anchor_capacity;
    return true;
  }
};

int run_simulate(const CommonFlags& common, const sb_experiment_config& config_in,
                 const std::string& out_flag, const std::string& json_flag) {
  sb_experiment_config config = config_in;
  if (!common.fill(&config)) return kExitUsage;

  ScopedString json, csv;
  const sb_status status = sb_run_simulation(&config, json.out(), csv.out());
  if (status != SB_OK) return report_api_error("simulation failed", status);

  const fs::path csv_path = resolve_out(out_flag, "table1.csv");
  const fs::path json_path =
      json_flag.empty() ? sibling_with_extension(csv_path, ".json") : fs::path(json_flag);
  if (!write_file(csv_path, csv.value) || !write_file(json_path, json.value)) {
    return kExitFailure;
  }
  std::cout << csv.value;
  return kExitOk;
}

int run_nodewalk(const CommonFlags& common, const sb_experiment_config& config_in,
                 const std::string& out_flag, const std::string& dist_flag,
                 const std::string& json_flag) {
  sb_experiment_config config = config_in;
  if (!common.fill(&config)) return kExitUsage;

  ScopedString json, steps_csv, dist_csv;
  const sb_status status =
      sb_run_node_walk(&config, json.out(), steps_csv.out(), dist_csv.out());
  if (status != SB_OK) return report_api_error("node walk failed", status);

  const fs::path steps_path = resolve_out(out_flag, "nodewalk_steps.csv");
  const fs::path dist_path = resolve_out(dist_flag, "nodewalk_distribution.csv");
  const fs::path json_path =
      json_flag.empty() ? sibling_with_extension(steps_path, ".json") : fs::path(json_flag);
  if (!write_file(steps_path, steps_csv.value) || !write_file(dist_path, dist_csv.value) ||
      !write_file(json_path, json.value)) {
    return kExitFailure;
  }
  std::cout << steps_csv.value;
  return kExitOk;
}

int run_grade(const std::string& table1_path, const sb_grade_thresholds& thresholds,
              const std::string& out_flag, const std::string& json_flag) {
  std::ifstream in(table1_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read '" << table1_path << "'\n";
    return kExitFailure;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  ScopedString json, csv;
  const sb_status status =
      sb_grade(text.c_str(), &thresholds, table1_path.c_str(), json.out(), csv.out());
  if (status == SB_ERR_INCOMPLETE_INPUT) {
    std::cerr << "error: '" << table1_path << "' has no gradable rows ("
              << sb_last_error_message() << ")\n";
    return kExitFailure;
  }
  if (status != SB_OK) return report_api_error("grading failed", status);

  const fs::path csv_path = resolve_out(out_flag, "grades.csv");
  const fs::path json_path =
      json_flag.empty() ? sibling_with_extension(csv_path, ".json") : fs::path(json_flag);
  if (!write_file(csv_path, csv.value) || !write_file(json_path, json.value)) {
    return kExitFailure;
  }
  std::cout << csv.value;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hash-based shard placement benchmark"};
  app.set_version_flag("--version", sb_version());
  app.require_subcommand(1);

  // simulate: distribute records, drop shards, measure movement and spread.
  auto* simulate = app.add_subcommand(
      "simulate", "Distribute records, drop shards and report per-algorithm metrics");
  CommonFlags sim_common;
  sim_common.attach(simulate);
  sb_experiment_config sim_config;
  sb_experiment_config_init(&sim_config);
  std::string sim_removal = "random";
  std::string sim_out, sim_json;
  simulate->add_option("--records", sim_config.record_count, "Records to distribute")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--shards", sim_config.initial_shards, "Initial shard count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--drop", sim_config.shards_to_drop, "Shards to remove")
      ->capture_default_str();
  simulate->add_option("--trials", sim_config.trials, "Trials to average over")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--removal-mode", sim_removal, "Drop selection: random or highest")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "highest"}));
  simulate->add_option("--out", sim_out, "CSV output path (default $SHARDBENCH_OUT_DIR/table1.csv)");
  simulate->add_option("--json-out", sim_json, "JSON output path (default: CSV path with .json)");

  // nodewalk: remove three nodes one by one, then add them back.
  auto* nodewalk = app.add_subcommand(
      "nodewalk", "Walk a node topology: remove three nodes one by one, then re-add them");
  CommonFlags walk_common;
  walk_common.attach(nodewalk);
  sb_experiment_config walk_config;
  sb_experiment_config_init(&walk_config);
  std::string walk_out, walk_dist, walk_json;
  nodewalk->add_option("--records", walk_config.record_count, "Records to distribute")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  nodewalk->add_option("--nodes", walk_config.node_count, "Node count (at least 4)")
      ->capture_default_str();
  nodewalk->add_option("--shards-per-node", walk_config.shards_per_node, "Shards per node")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  nodewalk->add_option("--out", walk_out,
                       "Step CSV output path (default $SHARDBENCH_OUT_DIR/nodewalk_steps.csv)");
  nodewalk->add_option("--dist-out", walk_dist,
                       "Distribution matrix CSV path (default nodewalk_distribution.csv)");
  nodewalk->add_option("--json-out", walk_json, "JSON output path");

  // grade: Low/Medium/High per algorithm from a table1 report.
  auto* grade = app.add_subcommand("grade", "Grade a table1 report against the three criteria");
  std::string grade_table1, grade_out, grade_json;
  sb_grade_thresholds thresholds;
  sb_grade_thresholds_init(&thresholds);
  grade->add_option("--table1", grade_table1, "table1 report to grade (CSV or JSON)")->required();
  grade->add_option("--uniformity-high", thresholds.uniformity_high,
                    "Variance-vs-best bound for a High uniformity grade")->capture_default_str();
  grade->add_option("--uniformity-medium", thresholds.uniformity_medium,
                    "Variance-vs-best bound for a Medium uniformity grade")->capture_default_str();
  grade->add_option("--rebalance-high", thresholds.rebalance_high,
                    "Moved-ratio bound for a High rebalancing grade")->capture_default_str();
  grade->add_option("--rebalance-medium", thresholds.rebalance_medium,
                    "Moved-ratio bound for a Medium rebalancing grade")->capture_default_str();
  grade->add_option("--speed-high", thresholds.speed_high,
                    "Time-vs-fastest bound for a High speed grade")->capture_default_str();
  grade->add_option("--speed-medium", thresholds.speed_medium,
                    "Time-vs-fastest bound for a Medium speed grade")->capture_default_str();
  grade->add_option("--out", grade_out, "CSV output path (default $SHARDBENCH_OUT_DIR/grades.csv)");
  grade->add_option("--json-out", grade_json, "JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (simulate->parsed()) {
    if (sim_config.shards_to_drop >= sim_config.initial_shards) {
      std::cerr << "error: --drop must be smaller than --shards\n";
      return kExitUsage;
    }
    sim_config.removal_mode =
        sim_removal == "highest" ? SB_REMOVAL_HIGHEST_IDS : SB_REMOVAL_RANDOM;
    return run_simulate(sim_common, sim_config, sim_out, sim_json);
  }
  if (nodewalk->parsed()) {
    if (walk_config.node_count < 4) {
      std::cerr << "error: the walk removes three nodes; --nodes must be at least 4\n";
      return kExitUsage;
    }
    return run_nodewalk(walk_common, walk_config, walk_out, walk_dist, walk_json);
  }
  if (grade->parsed()) {
    return run_grade(grade_table1, thresholds, grade_out, grade_json);
  }
  return kExitUsage;
}
