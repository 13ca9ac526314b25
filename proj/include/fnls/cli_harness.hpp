#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace fnls {

enum class Verdict { Pass, Fail, ReportOnly };
std::string to_string(Verdict v);

// Flat key=value text. Lines starting with '#' or ';' are comments; a line "[grid]" makes
// following keys read as grid.<key> until the next header.
class Config {
 public:
  Config() = default;

  // Throws ConfigError with the line number on malformed input or duplicate keys.
  static Config parse(const std::string& text);
  // ConfigError if the file cannot be read.
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;    // comma separated
  std::vector<std::int64_t> get_ints(const std::string& key) const;  // comma separated

  // Sorted key=value lines; parse(serialize()) round-trips.
  std::string serialize() const;

 private:
  std::map<std::string, std::string> entries_;
};

// Shortest decimal that reads back to the same double.
std::string format_number(double x);
// RFC-4180 quoting.
std::string csv_field(const std::string& s);
std::string utc_timestamp();

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  // Body without the timestamp line.
  std::string to_csv() const;
};

// "# generated <timestamp>" then the CSV body; CRLF line ends. ConfigError if the file cannot be written.
void write_csv(const std::filesystem::path& path, const Table& table, const std::string& timestamp);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

std::string render_svg(const Plot& plot);

struct ExperimentOutput {
  std::map<std::string, double> metrics;
  Verdict verdict = Verdict::ReportOnly;
  std::string detail;
  std::vector<Table> tables;
  std::vector<Plot> plots;
};

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string doc;
};

struct ExperimentContext {
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct ExperimentSpec {
  std::string name;
  std::string anchor;
  std::string summary;
  std::vector<ConfigKey> keys;
  // Receives a config with every key present.
  std::function<ExperimentOutput(const Config&, const ExperimentContext&)> run;
};

const std::vector<ExperimentSpec>& experiment_registry();
// RegistryError listing the valid names.
const ExperimentSpec& find_experiment(const std::string& name);
// Defaults overlaid with `overrides`; ConfigError on keys the experiment does not declare.
Config effective_config(const ExperimentSpec& spec, const Config& overrides);

struct ExperimentRecord {
  std::string name;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, double> outputs;
  Verdict verdict = Verdict::ReportOnly;
  std::string anchor;
  std::string detail;
  std::vector<std::string> files;

  std::string to_json() const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  bool plot = false;
  std::size_t workers = 1;
};

// Writes <name>.csv (one per table, suffixed by table name after the first), <name>.cfg,
// <name>_record.json and, with plot, <name>*.svg into out_dir.
ExperimentRecord run_experiment(const std::string& name, const Config& overrides, const std::filesystem::path& out_dir,
                                const RunOptions& options = {});
// In-memory run without files.
ExperimentRecord evaluate_experiment(const std::string& name, const Config& overrides, const RunOptions& options,
                                     ExperimentOutput* output = nullptr);

enum class Suite { Smoke, Full };
Suite parse_suite(const std::string& name);

struct CriterionStep {
  std::string experiment;
  Config smoke;
  Config full;
};

struct CriterionSpec {
  int id = 0;
  std::string title;
  // PASS when every step passes.
  std::vector<CriterionStep> steps;
  // Keys divided by the tightening factor in any step that declares them.
  std::vector<std::string> tolerance_keys;
};

const std::vector<CriterionSpec>& acceptance_criteria();

struct CriterionResult {
  int id = 0;
  std::string title;
  std::string anchor;
  std::string experiment;
  Verdict verdict = Verdict::Fail;
  std::string detail;
  double seconds = 0.0;
};

// Criteria run as independent jobs on `workers` threads; tighten maps criterion id -> factor.
std::vector<CriterionResult> verify_all(Suite suite, const std::map<int, double>& tighten = {}, std::size_t workers = 1,
                                        std::uint64_t seed = 1);
Table summary_table(const std::vector<CriterionResult>& results);

}  // namespace fnls
