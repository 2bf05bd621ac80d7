#include "rddg/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rddg/benchmark_data.hpp"
#include "rddg/error.hpp"
#include "rddg/text.hpp"

#ifndef RDDG_VERSION
#define RDDG_VERSION "0.1.0"
#endif

namespace rddg {

const std::string* ConfigFile::Section::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

ConfigFile ConfigFile::parse_string(const std::string& content, const std::string& origin) {
  ConfigFile file;
  file.origin_ = origin;
  Section* current = nullptr;
  std::size_t line_no = 0;
  std::istringstream in(content);
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = text::trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      file.sections_.push_back({text::trim(line.substr(1, line.size() - 2)), {}});
      current = &file.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    if (!current)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any [section]");
    current->entries.emplace_back(text::trim(line.substr(0, eq)),
                                  text::trim(line.substr(eq + 1)));
  }
  return file;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

const ConfigFile::Section* ConfigFile::find_section(const std::string& name) const {
  for (const auto& s : sections_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const ConfigFile::Section*> ConfigFile::sections_with_prefix(
    const std::string& prefix) const {
  std::vector<const Section*> out;
  for (const auto& s : sections_)
    if (text::starts_with(s.name, prefix)) out.push_back(&s);
  return out;
}

void ConfigFile::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos)
    throw ConfigError("override needs the form section.key=value, got: " + dotted_key);
  const std::string section = dotted_key.substr(0, dot);
  const std::string key = dotted_key.substr(dot + 1);
  for (auto& s : sections_) {
    if (s.name != section) continue;
    for (auto& [k, v] : s.entries) {
      if (k == key) {
        v = value;
        return;
      }
    }
    s.entries.emplace_back(key, value);
    return;
  }
  sections_.push_back({section, {{key, value}}});
}

std::optional<std::string> ConfigFile::get(const std::string& section,
                                           const std::string& key) const {
  const auto* s = find_section(section);
  if (!s) return std::nullopt;
  const auto* v = s->find(key);
  if (!v) return std::nullopt;
  return *v;
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  auto v = get(section, key);
  return v ? *v : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  auto parsed = text::parse_double(*v);
  if (!parsed)
    throw ConfigError(section + "." + key + " must be a number, got '" + *v + "'");
  return *parsed;
}

long ConfigFile::get_long(const std::string& section, const std::string& key,
                          long fallback) const {
  const double v = get_double(section, key, static_cast<double>(fallback));
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw ConfigError(section + "." + key + " must be an integer");
  return l;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  auto v = get(section, key);
  if (!v) return fallback;
  const std::string s = text::lowercase(*v);
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError(section + "." + key + " must be a boolean, got '" + *v + "'");
}

Schema schema_from_config(const ConfigFile& file) {
  const auto* schema_section = file.find_section("schema");
  if (!schema_section) throw ConfigError("csv sources need a [schema] section");

  Schema schema;
  schema.label = file.get_or("schema", "label", "");
  if (schema.label.empty()) throw ConfigError("schema.label must name the class attribute");
  const std::string classes = file.get_or("schema", "classes", "");
  for (const auto& c : text::split(classes, ','))
    if (!text::trim(c).empty()) schema.classes.push_back(text::trim(c));
  if (schema.classes.size() < 2)
    throw ConfigError("schema.classes needs at least 2 comma-separated class labels");

  for (const auto* section : file.sections_with_prefix("attribute ")) {
    AttributeSpec attr;
    attr.name = text::trim(section->name.substr(10));
    const std::string kind = text::lowercase(file.get_or(section->name, "kind", "numeric"));
    if (kind == "numeric") {
      attr.kind = AttributeKind::numeric;
    } else if (kind == "categorical") {
      attr.kind = AttributeKind::categorical;
      for (const auto& c : text::split(file.get_or(section->name, "categories", ""), ','))
        if (!text::trim(c).empty()) attr.categories.push_back(text::trim(c));
    } else {
      throw ConfigError(section->name + ".kind must be numeric or categorical");
    }
    attr.description = file.get_or(section->name, "description", "");
    schema.attributes.push_back(std::move(attr));
  }
  schema.validate();
  return schema;
}

RunConfig bind_run_config(const ConfigFile& file) {
  RunConfig cfg;

  const std::string source = text::lowercase(file.get_or("dataset", "source", "benchmark"));
  const bool has_benchmark = file.get("dataset", "benchmark").has_value();
  const bool has_csv = file.get("dataset", "csv").has_value();
  if (has_benchmark && has_csv)
    throw ConfigError("dataset must declare exactly one source: benchmark or csv, not both");
  if (source == "benchmark") {
    cfg.source = RunConfig::Source::benchmark;
    cfg.benchmark_name = file.get_or("dataset", "benchmark", "real_estate");
    parse_benchmark_name(cfg.benchmark_name);  // validates
    cfg.benchmark_n = static_cast<std::size_t>(file.get_long("dataset", "n", 1000));
    cfg.benchmark_seed = static_cast<std::uint64_t>(file.get_long("dataset", "seed", 0));
    cfg.schema = benchmark_schema(parse_benchmark_name(cfg.benchmark_name));
  } else if (source == "csv") {
    cfg.source = RunConfig::Source::csv;
    cfg.csv_path = file.get_or("dataset", "csv", "");
    if (cfg.csv_path.empty()) throw ConfigError("dataset.csv must point at the input file");
    cfg.schema = schema_from_config(file);
  } else {
    throw ConfigError("dataset.source must be benchmark or csv, got '" + source + "'");
  }

  cfg.train_fraction = file.get_double("split", "train_fraction", 0.8);
  cfg.split_seed = static_cast<std::uint64_t>(file.get_long("split", "seed", 42));

  auto& p = cfg.pipeline;
  p.n_target = static_cast<std::size_t>(file.get_long("pipeline", "n_target", 1000));
  p.reference_batch_size =
      static_cast<std::size_t>(file.get_long("pipeline", "reference_batch_size", 30));
  p.coreset_k = static_cast<std::size_t>(file.get_long("pipeline", "coreset_k", 100));
  p.per_class_request = static_cast<int>(file.get_long("pipeline", "per_class_request", 0));
  p.seed = static_cast<std::uint64_t>(file.get_long("pipeline", "seed", 7));
  p.obfuscate = file.get_bool("pipeline", "obfuscate", false);
  p.use_mock = file.get_bool("pipeline", "use_mock", true);
  p.stall_limit = static_cast<int>(file.get_long("pipeline", "stall_limit", 5));
  p.max_iterations = static_cast<std::size_t>(file.get_long("pipeline", "max_iterations", 0));
  p.exclude_coreset_from_references =
      file.get_bool("pipeline", "exclude_coreset_from_references", false);
  p.prompt_template_dir = file.get_or("pipeline", "prompt_template_dir", "");

  p.thresholds.mean = file.get_double("thresholds", "mean", 0.10);
  p.thresholds.stddev = file.get_double("thresholds", "stddev", 0.15);
  p.thresholds.correlation = file.get_double("thresholds", "correlation", 0.15);
  p.thresholds.ks = file.get_double("thresholds", "ks", 0.10);

  if (auto hidden = file.get("probe", "hidden")) {
    p.probe.hidden.clear();
    for (const auto& h : text::split(*hidden, ',')) {
      auto v = text::parse_double(text::trim(h));
      if (!v || *v < 1) throw ConfigError("probe.hidden must be a comma list of widths >= 1");
      p.probe.hidden.push_back(static_cast<int>(*v));
    }
  }
  p.probe.attention = file.get_bool("probe", "attention", true);
  p.probe.learning_rate = file.get_double("probe", "learning_rate", 0.001);
  p.probe.batch_size = static_cast<int>(file.get_long("probe", "batch_size", 64));
  p.probe.epochs = static_cast<int>(file.get_long("probe", "epochs", 100));
  p.probe.beta1 = file.get_double("probe", "beta1", 0.5);
  p.probe.beta2 = file.get_double("probe", "beta2", 0.9);
  p.probe.seed = static_cast<std::uint64_t>(file.get_long("probe", "seed", 0));
  if (p.probe.seed == 0) p.probe.seed = p.seed;

  p.mock.mean_shift = file.get_double("mock", "mean_shift", -0.75);
  p.mock.std_scale = file.get_double("mock", "std_scale", 1.4);
  p.mock.seed = static_cast<std::uint64_t>(file.get_long("mock", "seed", 0));
  if (p.mock.seed == 0) p.mock.seed = p.seed;

  p.transport.endpoint =
      file.get_or("transport", "endpoint", "https://api.openai.com/v1/chat/completions");
  p.transport.model = file.get_or("transport", "model", "gpt-3.5-turbo-0125");
  p.transport.temperature = file.get_double("transport", "temperature", 0.7);
  p.transport.max_output_tokens =
      static_cast<int>(file.get_long("transport", "max_output_tokens", 2048));
  p.transport.max_attempts = static_cast<int>(file.get_long("transport", "max_attempts", 3));
  p.transport.backoff_base_seconds =
      file.get_double("transport", "backoff_base_seconds", 0.5);
  p.transport.credential_env = file.get_or("transport", "credential_env", "RDDG_API_KEY");
  p.transport.price_per_million_input =
      file.get_double("transport", "price_per_million_input", 0.5);
  p.transport.price_per_million_output =
      file.get_double("transport", "price_per_million_output", 1.5);
  p.transport.timeout_seconds = static_cast<int>(file.get_long("transport", "timeout_seconds", 120));
  if (file.get("transport", "api_key") || file.get("transport", "credential"))
    throw ConfigError(
        "credentials are never read from config; export them via the environment variable "
        "named in transport.credential_env");

  cfg.fidelity_bins = static_cast<int>(file.get_long("fidelity", "bins", 50));

  if (auto kinds = file.get("classify", "kinds")) {
    cfg.classifier_kinds.clear();
    for (const auto& k : text::split(*kinds, ','))
      if (!text::trim(k).empty()) cfg.classifier_kinds.push_back(parse_classifier_kind(text::trim(k)));
  }
  if (auto seeds = file.get("classify", "seeds")) {
    cfg.classifier_seeds.clear();
    for (const auto& s : text::split(*seeds, ',')) {
      auto v = text::parse_double(text::trim(s));
      if (!v) throw ConfigError("classify.seeds must be a comma list of integers");
      cfg.classifier_seeds.push_back(static_cast<std::uint64_t>(*v));
    }
  }
  cfg.minority_class = file.get_or("classify", "minority_class", "");

  cfg.output_dir = file.get_or("output", "dir", "out");
  cfg.write_transcript = file.get_bool("output", "transcript", false);
  cfg.log_level = text::lowercase(file.get_or("output", "level", "info"));
  if (cfg.log_level != "quiet" && cfg.log_level != "info")
    throw ConfigError("output.level must be quiet or info, got '" + cfg.log_level + "'");

  if (cfg.pipeline.n_target < 1) throw ConfigError("pipeline.n_target must be >= 1");
  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigFile file = ConfigFile::parse_file(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override needs the form section.key=value, got: " + o);
    file.set(text::trim(o.substr(0, eq)), text::trim(o.substr(eq + 1)));
  }
  return bind_run_config(file);
}

Dataset RunConfig::load_dataset() const {
  if (source == Source::benchmark)
    return generate_benchmark(benchmark_name, benchmark_n, benchmark_seed);
  return load_csv(csv_path, schema);
}

void write_manifest(const std::string& output_dir, const RunConfig& cfg,
                    const std::string& subcommand, const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["version"] = RDDG_VERSION;
  j["subcommand"] = subcommand;
  j["config_hash"] = cfg.pipeline.hash();
  j["seeds"] = {{"pipeline", cfg.pipeline.seed},
                {"split", cfg.split_seed},
                {"probe", cfg.pipeline.probe.seed},
                {"mock", cfg.pipeline.mock.seed},
                {"benchmark", cfg.benchmark_seed}};
  j["dataset"] = cfg.source == RunConfig::Source::benchmark
                     ? nlohmann::json{{"source", "benchmark"},
                                      {"name", cfg.benchmark_name},
                                      {"n", cfg.benchmark_n}}
                     : nlohmann::json{{"source", "csv"}, {"path", cfg.csv_path}};
  j["outputs"] = outputs;
  const auto path = std::filesystem::path(output_dir) / "run_manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace rddg
