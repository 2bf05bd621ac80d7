// Command-line front end: reproducible runs of the synthesis pipeline and its
// evaluation stages, driven by one config file with flag overrides.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "rddg/benchmark_data.hpp"
#include "rddg/classify.hpp"
#include "rddg/config.hpp"
#include "rddg/coreset.hpp"
#include "rddg/error.hpp"
#include "rddg/fidelity.hpp"
#include "rddg/gateway.hpp"
#include "rddg/orchestrator.hpp"
#include "rddg/prompts.hpp"

namespace fs = std::filesystem;
using namespace rddg;

namespace {

struct CommonFlags {
  std::string config_path = "rddg.ini";
  std::vector<std::string> overrides;
  std::string output_dir;  // overrides config when set
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "Config file (key = value with [sections])");
  cmd->add_option("--set", flags.overrides, "Override config entries as section.key=value");
  cmd->add_option("-o,--out-dir", flags.output_dir, "Output directory (overrides output.dir)");
}

RunConfig load_config(const CommonFlags& flags) {
  RunConfig cfg = load_run_config(flags.config_path, flags.overrides);
  if (!flags.output_dir.empty()) cfg.output_dir = flags.output_dir;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

std::ostream& info(const RunConfig& cfg) {
  static std::ofstream null_sink;
  if (cfg.log_level == "quiet") {
    if (!null_sink.is_open()) null_sink.setstate(std::ios::badbit);
    return null_sink;
  }
  return std::cout;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

std::pair<Dataset, Dataset> split_from_config(const RunConfig& cfg) {
  const Dataset full = cfg.load_dataset();
  return train_test_split(full, cfg.train_fraction, cfg.split_seed);
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg) {
  if (cfg.pipeline.use_mock) {
    const ClassCodeMap codes = make_run_codes(cfg.schema, cfg.pipeline);
    return std::make_unique<MockGateway>(cfg.schema, codes, cfg.pipeline.mock);
  }
  return std::make_unique<HttpGateway>(cfg.pipeline.transport);
}

PipelineConfig pipeline_config_for_run(const RunConfig& cfg, bool want_transcript) {
  PipelineConfig p = cfg.pipeline;
  if (want_transcript && cfg.write_transcript)
    p.transcript_path = (fs::path(cfg.output_dir) / "transcript.jsonl").string();
  p.checkpoint_path = (fs::path(cfg.output_dir) / "run_state.json").string();
  return p;
}

CoreSet compute_coreset(const Dataset& train, const PipelineConfig& p) {
  const ErrorTrace trace = train_probe(train, p.probe);
  return select_coreset(train, per_sample_variance(trace), p.coreset_k);
}

int cmd_gen_benchmark(const std::string& name, std::size_t n, std::uint64_t seed,
                      const std::string& out_path) {
  const Dataset ds = generate_benchmark(name, n, seed);
  save_csv(ds, out_path);
  const ClassStats stats = class_stats(ds);
  std::cout << "wrote " << ds.rows.size() << " rows to " << out_path
            << " (IR = " << stats.imbalance_ratio << ")\n";
  return 0;
}

int cmd_split(const CommonFlags& flags) {
  const RunConfig cfg = load_config(flags);
  const auto [train, test] = split_from_config(cfg);
  const fs::path dir(cfg.output_dir);
  save_csv(train, (dir / "train.csv").string());
  save_csv(test, (dir / "test.csv").string());
  write_manifest(cfg.output_dir, cfg, "split", {"train.csv", "test.csv"});
  info(cfg) << "train: " << train.rows.size() << " rows, test: " << test.rows.size()
            << " rows -> " << cfg.output_dir << "\n";
  return 0;
}

int cmd_coreset(const CommonFlags& flags) {
  const RunConfig cfg = load_config(flags);
  const auto [train, test] = split_from_config(cfg);
  (void)test;
  const CoreSet core = compute_coreset(train, cfg.pipeline);
  const fs::path dir(cfg.output_dir);
  export_coreset(train, core, cfg.pipeline.probe, (dir / "coreset.csv").string(),
                 (dir / "coreset_scores.json").string());
  write_manifest(cfg.output_dir, cfg, "coreset", {"coreset.csv", "coreset_scores.json"});
  info(cfg) << "coreset: " << core.per_class.size() << " classes x " << core.k << " rows -> "
            << cfg.output_dir << "\n";
  return 0;
}

int cmd_mine(const CommonFlags& flags) {
  const RunConfig cfg = load_config(flags);
  const auto [train, test] = split_from_config(cfg);
  (void)test;
  PipelineConfig p = pipeline_config_for_run(cfg, true);
  p.checkpoint_path.clear();

  const CoreSet core = compute_coreset(train, p);
  const ClassCodeMap codes = make_run_codes(train.schema, p);
  const auto templates = p.prompt_template_dir.empty()
                             ? default_prompt_templates()
                             : load_prompt_templates(p.prompt_template_dir);
  auto gateway = make_gateway(cfg);

  const std::string metadata = build_metadata_prompt(train.schema, templates);
  const std::string p1 =
      build_relationship_prompt(coreset_rows(train, core), metadata, codes, templates);
  const auto r1 = gateway->complete({{ChatRole::user, p1}});
  const auto analysis = RelationshipAnalysis::from_text(r1.text);
  const std::string p2 = build_constraint_prompt(analysis, templates);
  const auto r2 = gateway->complete({{ChatRole::user, p2}});
  const auto constraints = ConstraintSet::from_text(r2.text);

  const fs::path dir(cfg.output_dir);
  write_text(dir / "analysis.txt", analysis.text);
  write_text(dir / "constraints.txt", constraints.text);
  write_text(dir / "mining_ledger.json", gateway->ledger().to_json() + "\n");
  write_manifest(cfg.output_dir, cfg, "mine", {"analysis.txt", "constraints.txt"});
  info(cfg) << "relation mining done; " << constraints.rules.size()
            << " parsed rules -> " << cfg.output_dir << "\n";
  return 0;
}

int run_and_write(const RunConfig& cfg, const Dataset& train, const PipelineConfig& p,
                  Gateway& gateway, const std::string& report_name) {
  const RunReport report = run_pipeline(train, p, gateway);
  const fs::path dir(cfg.output_dir);
  save_csv(report.synthetic, (dir / "synthetic.csv").string());
  write_text(dir / report_name, report.to_json());
  info(cfg) << "synthesized " << report.synthetic.rows.size() << " rows in "
            << report.iterations << " batches -> " << cfg.output_dir << "\n";
  return 0;
}

int cmd_synthesize(const CommonFlags& flags, bool resume_run) {
  const RunConfig cfg = load_config(flags);
  const auto [train, test] = split_from_config(cfg);
  (void)test;
  const PipelineConfig p = pipeline_config_for_run(cfg, true);
  auto gateway = make_gateway(cfg);
  if (resume_run) {
    const RunReport report = resume_pipeline(p.checkpoint_path, train, p, *gateway);
    const fs::path dir(cfg.output_dir);
    save_csv(report.synthetic, (dir / "synthetic.csv").string());
    write_text(dir / "run_report.json", report.to_json());
    info(cfg) << "resumed and synthesized " << report.synthetic.rows.size() << " rows in "
              << report.iterations << " batches -> " << cfg.output_dir << "\n";
  } else {
    run_and_write(cfg, train, p, *gateway, "run_report.json");
  }
  write_manifest(cfg.output_dir, cfg, "synthesize", {"synthetic.csv", "run_report.json"});
  return 0;
}

int cmd_fidelity(const CommonFlags& flags, std::string real_path, std::string synth_path) {
  const RunConfig cfg = load_config(flags);
  const fs::path dir(cfg.output_dir);
  if (real_path.empty()) real_path = (dir / "train.csv").string();
  if (synth_path.empty()) synth_path = (dir / "synthetic.csv").string();
  const Dataset real = load_csv(real_path, cfg.schema);
  const Dataset synth = load_csv(synth_path, cfg.schema);
  const FidelityReport report = fidelity_report(real, synth, cfg.fidelity_bins);
  write_text(dir / "fidelity.json", fidelity_report_json(report));
  write_text(dir / "fidelity.txt", fidelity_report_text(report));
  write_text(dir / "correlation_diff.csv", correlation_diff_csv(report.correlation));
  write_manifest(cfg.output_dir, cfg, "fidelity", {"fidelity.json", "fidelity.txt"});
  info(cfg) << fidelity_report_text(report);
  return 0;
}

int cmd_classify(const CommonFlags& flags, std::string train_path, std::string synth_path,
                 std::string test_path) {
  const RunConfig cfg = load_config(flags);
  const fs::path dir(cfg.output_dir);
  if (train_path.empty()) train_path = (dir / "train.csv").string();
  if (synth_path.empty()) synth_path = (dir / "synthetic.csv").string();
  if (test_path.empty()) test_path = (dir / "test.csv").string();
  const Dataset train = load_csv(train_path, cfg.schema);
  const Dataset synth = load_csv(synth_path, cfg.schema);
  const Dataset test = load_csv(test_path, cfg.schema);

  int minority = -1;
  if (!cfg.minority_class.empty()) {
    minority = train.schema.class_index(cfg.minority_class);
    if (minority < 0) throw ConfigError("classify.minority_class names an unknown class");
  }
  const MetricTable table = evaluate_augmentation(train, synth, test, cfg.classifier_kinds,
                                                  cfg.classifier_seeds, minority);
  write_text(dir / "metrics.json", table.to_json());
  write_text(dir / "metrics.txt", table.to_text());
  write_manifest(cfg.output_dir, cfg, "classify", {"metrics.json", "metrics.txt"});
  info(cfg) << table.to_text();
  return 0;
}

int cmd_pipeline(const CommonFlags& flags) {
  const RunConfig cfg = load_config(flags);
  const auto [train, test] = split_from_config(cfg);
  const fs::path dir(cfg.output_dir);
  save_csv(train, (dir / "train.csv").string());
  save_csv(test, (dir / "test.csv").string());

  const PipelineConfig p = pipeline_config_for_run(cfg, true);
  auto gateway = make_gateway(cfg);
  const RunReport report = run_pipeline(train, p, *gateway);
  save_csv(report.synthetic, (dir / "synthetic.csv").string());
  write_text(dir / "run_report.json", report.to_json());

  const FidelityReport fidelity = fidelity_report(train, report.synthetic, cfg.fidelity_bins);
  write_text(dir / "fidelity.json", fidelity_report_json(fidelity));
  write_text(dir / "fidelity.txt", fidelity_report_text(fidelity));
  write_text(dir / "correlation_diff.csv", correlation_diff_csv(fidelity.correlation));

  int minority = -1;
  if (!cfg.minority_class.empty()) {
    minority = train.schema.class_index(cfg.minority_class);
    if (minority < 0) throw ConfigError("classify.minority_class names an unknown class");
  }
  const MetricTable table = evaluate_augmentation(train, report.synthetic, test,
                                                  cfg.classifier_kinds, cfg.classifier_seeds,
                                                  minority);
  write_text(dir / "metrics.json", table.to_json());
  write_text(dir / "metrics.txt", table.to_text());

  write_manifest(cfg.output_dir, cfg, "pipeline",
                 {"train.csv", "test.csv", "synthetic.csv", "run_report.json", "fidelity.json",
                  "metrics.json"});
  info(cfg) << "pipeline complete: " << report.synthetic.rows.size() << " synthetic rows, "
            << report.iterations << " batches -> " << cfg.output_dir << "\n";
  info(cfg) << table.to_text();
  return 0;
}

int cmd_replay(const CommonFlags& flags, std::string transcript_path) {
  const RunConfig cfg = load_config(flags);
  const fs::path dir(cfg.output_dir);
  if (transcript_path.empty()) transcript_path = (dir / "transcript.jsonl").string();
  const auto [train, test] = split_from_config(cfg);
  (void)test;

  PipelineConfig p = cfg.pipeline;  // no transcript writing, no checkpoint
  ReplayGateway gateway(transcript_path);
  const RunReport report = run_pipeline(train, p, gateway);
  write_text(dir / "run_report_replay.json", report.to_json());
  write_manifest(cfg.output_dir, cfg, "replay", {"run_report_replay.json"});
  info(cfg) << "replayed " << report.iterations << " batches from " << transcript_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rddg: feedback-driven synthetic tabular data generation and evaluation"};
  app.require_subcommand(1);

  CommonFlags flags;

  std::string gb_name = "real_estate", gb_out = "benchmark.csv";
  std::size_t gb_n = 1000;
  std::uint64_t gb_seed = 0;
  auto* gen = app.add_subcommand("gen-benchmark", "Generate a built-in benchmark dataset");
  gen->add_option("--name", gb_name, "consumer_behavior|health_metrics|real_estate|social_network");
  gen->add_option("--n", gb_n, "Row count");
  gen->add_option("--seed", gb_seed, "Generator seed");
  gen->add_option("--out", gb_out, "Output CSV path");

  auto* split = app.add_subcommand("split", "Deterministic train/test split");
  add_common(split, flags);
  auto* coreset = app.add_subcommand("coreset", "Train the probe and export the core set");
  add_common(coreset, flags);
  auto* mine = app.add_subcommand("mine", "Relation mining only (prompts 1 and 2)");
  add_common(mine, flags);
  auto* synthesize = app.add_subcommand("synthesize", "Full feedback-driven generation loop");
  add_common(synthesize, flags);
  bool resume_run = false;
  synthesize->add_flag("--resume", resume_run, "Continue from the run_state.json checkpoint");

  std::string real_path, synth_path, train_path, test_path, transcript_path;
  auto* fidelity = app.add_subcommand("fidelity", "Dataset-level fidelity metrics");
  add_common(fidelity, flags);
  fidelity->add_option("--real", real_path, "Real data CSV (default <out>/train.csv)");
  fidelity->add_option("--synth", synth_path, "Synthetic data CSV (default <out>/synthetic.csv)");

  auto* classify = app.add_subcommand("classify", "Augmentation evaluation with baselines");
  add_common(classify, flags);
  classify->add_option("--train", train_path, "Real training CSV");
  classify->add_option("--synth", synth_path, "Synthetic CSV");
  classify->add_option("--test", test_path, "Held-out test CSV");

  auto* pipeline = app.add_subcommand("pipeline", "split -> synthesize -> fidelity -> classify");
  add_common(pipeline, flags);

  auto* replay = app.add_subcommand("replay", "Re-run a recorded transcript");
  add_common(replay, flags);
  replay->add_option("--transcript", transcript_path, "JSONL transcript path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_benchmark(gb_name, gb_n, gb_seed, gb_out);
    if (split->parsed()) return cmd_split(flags);
    if (coreset->parsed()) return cmd_coreset(flags);
    if (mine->parsed()) return cmd_mine(flags);
    if (synthesize->parsed()) return cmd_synthesize(flags, resume_run);
    if (fidelity->parsed()) return cmd_fidelity(flags, real_path, synth_path);
    if (classify->parsed()) return cmd_classify(flags, train_path, synth_path, test_path);
    if (pipeline->parsed()) return cmd_pipeline(flags);
    if (replay->parsed()) return cmd_replay(flags, transcript_path);
  } catch (const Error& e) {
    std::cerr << "rddg: " << e.what() << "\n";
    return static_cast<int>(e.family());
  } catch (const std::exception& e) {
    std::cerr << "rddg: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
