#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rddg/classify.hpp"
#include "rddg/orchestrator.hpp"
#include "rddg/tabular.hpp"

namespace rddg {

/// Ordered key-value config file with [section] headers. '#' and ';' start
/// comments; section and key order is preserved so attribute sections keep
/// the declared column order.
class ConfigFile {
 public:
  struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    const std::string* find(const std::string& key) const;
  };

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& content, const std::string& origin = "<string>");

  const Section* find_section(const std::string& name) const;
  std::vector<const Section*> sections_with_prefix(const std::string& prefix) const;

  /// Applies a "section.key=value" override, creating the entry when absent.
  void set(const std::string& dotted_key, const std::string& value);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

 private:
  std::vector<Section> sections_;
  std::string origin_;
};

/// One fully-bound run configuration: dataset source, split, pipeline,
/// evaluation options and output locations.
struct RunConfig {
  enum class Source { benchmark, csv };

  Source source = Source::benchmark;
  std::string benchmark_name = "real_estate";
  std::size_t benchmark_n = 1000;
  std::uint64_t benchmark_seed = 0;
  std::string csv_path;
  Schema schema;  // declared in the config for csv sources

  double train_fraction = 0.8;
  std::uint64_t split_seed = 42;

  PipelineConfig pipeline;

  int fidelity_bins = 50;

  std::vector<ClassifierKind> classifier_kinds = {ClassifierKind::logistic};
  std::vector<std::uint64_t> classifier_seeds = {1, 2, 3, 4, 5};
  std::string minority_class;  // empty: smallest support in the training split

  std::string output_dir = "out";
  bool write_transcript = false;
  std::string log_level = "info";  // quiet | info

  /// Loads the dataset this config points at (generator or CSV).
  Dataset load_dataset() const;
};

/// Binds a parsed config file; every constraint violation names the
/// offending section.key.
RunConfig bind_run_config(const ConfigFile& file);

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

/// Schema from [schema] + ordered [attribute X] sections.
Schema schema_from_config(const ConfigFile& file);

/// Reproducibility manifest written next to every run's outputs.
void write_manifest(const std::string& output_dir, const RunConfig& cfg,
                    const std::string& subcommand, const std::vector<std::string>& outputs);

}  // namespace rddg
