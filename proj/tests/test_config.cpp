#include <fstream>

#include "doctest.h"
#include "rddg/config.hpp"
#include "rddg/error.hpp"
#include "test_util.hpp"

using namespace rddg;

namespace {

const char* kBenchmarkConfig = R"(# pipeline run against a generated benchmark
[dataset]
source = benchmark
benchmark = real_estate
n = 500
seed = 3

[split]
train_fraction = 0.8
seed = 42

[pipeline]
n_target = 120
reference_batch_size = 30
coreset_k = 20
seed = 9

[thresholds]
mean = 0.2

[probe]
epochs = 12
hidden = 8,4

[classify]
kinds = logistic,knn
seeds = 1,2,3

[output]
dir = out
transcript = true
)";

const char* kCsvConfig = R"(
[dataset]
source = csv
csv = data.csv

[schema]
label = cls
classes = a,b

[attribute x]
kind = numeric
description = first coordinate

[attribute cls]
kind = categorical
categories = a,b
description = class label
)";

}  // namespace

TEST_CASE("benchmark config binds with defaults and overrides") {
  const auto file = ConfigFile::parse_string(kBenchmarkConfig);
  const RunConfig cfg = bind_run_config(file);
  CHECK(cfg.source == RunConfig::Source::benchmark);
  CHECK(cfg.benchmark_name == "real_estate");
  CHECK(cfg.benchmark_n == 500);
  CHECK(cfg.pipeline.n_target == 120);
  CHECK(cfg.pipeline.thresholds.mean == 0.2);
  CHECK(cfg.pipeline.thresholds.stddev == 0.15);  // default preserved
  CHECK(cfg.pipeline.probe.hidden == std::vector<int>{8, 4});
  CHECK(cfg.pipeline.probe.seed == 9);  // inherits the pipeline seed
  CHECK(cfg.classifier_kinds.size() == 2);
  CHECK(cfg.classifier_seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(cfg.write_transcript);
  CHECK(cfg.schema.attributes.size() == 8);

  SUBCASE("the dataset loads from the generator") {
    const Dataset ds = cfg.load_dataset();
    CHECK(ds.rows.size() == 500);
  }
}

TEST_CASE("csv config declares the schema in column order") {
  const auto file = ConfigFile::parse_string(kCsvConfig);
  const RunConfig cfg = bind_run_config(file);
  CHECK(cfg.source == RunConfig::Source::csv);
  REQUIRE(cfg.schema.attributes.size() == 2);
  CHECK(cfg.schema.attributes[0].name == "x");
  CHECK(cfg.schema.attributes[1].name == "cls");
  CHECK(cfg.schema.label == "cls");
}

TEST_CASE("config errors name the offending key") {
  SUBCASE("both sources at once") {
    auto file = ConfigFile::parse_string(kBenchmarkConfig);
    file.set("dataset.csv", "x.csv");
    CHECK_THROWS_WITH_AS(bind_run_config(file), doctest::Contains("exactly one"), ConfigError);
  }
  SUBCASE("bad numbers are rejected with the key name") {
    auto file = ConfigFile::parse_string(kBenchmarkConfig);
    file.set("pipeline.n_target", "many");
    CHECK_THROWS_WITH_AS(bind_run_config(file), doctest::Contains("pipeline.n_target"),
                         ConfigError);
  }
  SUBCASE("credentials in config are refused outright") {
    auto file = ConfigFile::parse_string(kBenchmarkConfig);
    file.set("transport.api_key", "sk-nope");
    CHECK_THROWS_WITH_AS(bind_run_config(file), doctest::Contains("environment"), ConfigError);
  }
  SUBCASE("csv without a schema section") {
    auto file = ConfigFile::parse_string("[dataset]\nsource = csv\ncsv = d.csv\n");
    CHECK_THROWS_WITH_AS(bind_run_config(file), doctest::Contains("[schema]"), ConfigError);
  }
  SUBCASE("malformed lines report file and line") {
    CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[a]\nkey value\n", "test.ini"),
                         doctest::Contains("test.ini:2"), ConfigError);
  }
  SUBCASE("missing config file reports the path") {
    CHECK_THROWS_WITH_AS(load_run_config("/no/such/config.ini"),
                         doctest::Contains("/no/such/config.ini"), ConfigError);
  }
}

TEST_CASE("overrides rewrite values before binding") {
  testutil::TempDir dir("config");
  {
    std::ofstream out(dir.file("run.ini"));
    out << kBenchmarkConfig;
  }
  const RunConfig cfg =
      load_run_config(dir.file("run.ini"), {"pipeline.n_target=77", "dataset.n=250"});
  CHECK(cfg.pipeline.n_target == 77);
  CHECK(cfg.benchmark_n == 250);
  CHECK_THROWS_AS(load_run_config(dir.file("run.ini"), {"no_equals_sign"}), ConfigError);
}

TEST_CASE("manifests record hashes, seeds and outputs") {
  testutil::TempDir dir("manifest");
  const auto file = ConfigFile::parse_string(kBenchmarkConfig);
  RunConfig cfg = bind_run_config(file);
  cfg.output_dir = dir.path().string();
  write_manifest(cfg.output_dir, cfg, "pipeline", {"synthetic.csv"});
  std::ifstream in(dir.file("run_manifest.json"));
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content.find("config_hash") != std::string::npos);
  CHECK(content.find("synthetic.csv") != std::string::npos);
  CHECK(content.find("\"pipeline\"") != std::string::npos);
}

TEST_CASE("config hashes are stable and sensitive") {
  const auto file = ConfigFile::parse_string(kBenchmarkConfig);
  const RunConfig a = bind_run_config(file);
  const RunConfig b = bind_run_config(file);
  CHECK(a.pipeline.hash() == b.pipeline.hash());
  RunConfig c = a;
  c.pipeline.n_target += 1;
  CHECK(a.pipeline.hash() != c.pipeline.hash());
}
