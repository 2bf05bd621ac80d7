#include "rddg/orchestrator.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/text.hpp"

namespace rddg {

namespace {

const char* const kSystemPrompt =
    "You are a careful tabular data analyst and generator. Follow the requested "
    "output format exactly.";

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json row_to_json(const Row& row, const Schema& schema) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t c = 0; c < row.cells.size(); ++c) {
    if (schema.attributes[c].is_numeric())
      cells.push_back(text::format_double(std::get<double>(row.cells[c])));
    else
      cells.push_back(std::get<std::string>(row.cells[c]));
  }
  return cells;
}

Row row_from_json(const nlohmann::json& cells, const Schema& schema) {
  if (cells.size() != schema.attributes.size())
    throw DataError("checkpoint row arity does not match the schema");
  Row row;
  row.cells.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto value = cells[c].get<std::string>();
    if (schema.attributes[c].is_numeric()) {
      const auto v = text::parse_double(value);
      if (!v) throw DataError("checkpoint holds an unparseable numeric cell: " + value);
      row.cells.emplace_back(*v);
    } else {
      if (schema.attributes[c].category_index(value) < 0)
        throw DataError("checkpoint holds an unknown category: " + value);
      row.cells.emplace_back(value);
    }
  }
  row.label = schema.class_index(
      std::get<std::string>(row.cells[static_cast<std::size_t>(schema.label_index())]));
  if (row.label < 0) throw DataError("checkpoint row has an unknown class label");
  return row;
}

UsageLedger ledger_sum(const UsageLedger& a, const UsageLedger& b) {
  UsageLedger out = a;
  out.input_tokens += b.input_tokens;
  out.output_tokens += b.output_tokens;
  out.requests += b.requests;
  out.wall_seconds += b.wall_seconds;
  out.cost += b.cost;
  out.any_estimated = a.any_estimated || b.any_estimated;
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (n_target < 1) throw ConfigError("n_target must be >= 1");
  if (reference_batch_size < 2) throw ConfigError("reference batch size must be >= 2");
  if (coreset_k < 1) throw ConfigError("coreset K must be >= 1");
  if (stall_limit < 1) throw ConfigError("stall limit must be >= 1");
  if (per_class_request < 0) throw ConfigError("per-class request count must be >= 0");
  thresholds.validate();
  probe.validate();
  if (!use_mock) transport.validate();
}

int PipelineConfig::effective_per_class_request(std::size_t n_classes) const {
  if (per_class_request > 0) return per_class_request;
  return std::max<int>(1, static_cast<int>(reference_batch_size / n_classes));
}

std::string PipelineConfig::canonical_json() const {
  nlohmann::json j;
  j["n_target"] = n_target;
  j["reference_batch_size"] = reference_batch_size;
  j["coreset_k"] = coreset_k;
  j["per_class_request"] = per_class_request;
  j["thresholds"] = {{"mean", thresholds.mean},
                     {"stddev", thresholds.stddev},
                     {"correlation", thresholds.correlation},
                     {"ks", thresholds.ks}};
  j["probe"] = {{"hidden", probe.hidden},       {"attention", probe.attention},
                {"learning_rate", probe.learning_rate}, {"batch_size", probe.batch_size},
                {"epochs", probe.epochs},       {"beta1", probe.beta1},
                {"beta2", probe.beta2},         {"seed", probe.seed}};
  j["use_mock"] = use_mock;
  j["mock"] = {{"mean_shift", mock.mean_shift}, {"std_scale", mock.std_scale}, {"seed", mock.seed}};
  j["transport"] = {{"endpoint", transport.endpoint},
                    {"model", transport.model},
                    {"temperature", transport.temperature},
                    {"max_output_tokens", transport.max_output_tokens}};
  j["seed"] = seed;
  j["obfuscate"] = obfuscate;
  j["exclude_coreset_from_references"] = exclude_coreset_from_references;
  j["stall_limit"] = stall_limit;
  return j.dump();
}

std::string PipelineConfig::hash() const { return fnv1a_hex(canonical_json()); }

// ---- run state -----------------------------------------------------------------

std::string RunState::to_json(const Schema& schema) const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["phase"] = phase;
  j["cursor"] = cursor;
  j["iteration"] = iteration;
  j["analysis"] = analysis;
  j["constraints"] = constraints;
  j["synthetic_rows"] = nlohmann::json::array();
  for (const auto& row : synthetic_rows) j["synthetic_rows"].push_back(row_to_json(row, schema));
  j["carry_pool"] = nlohmann::json::array();
  for (const auto& pool : carry_pool) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : pool) rows.push_back(row_to_json(row, schema));
    j["carry_pool"].push_back(rows);
  }
  j["last_feedback"] = nlohmann::json::parse(last_feedback.to_json());
  j["quality_history"] = nlohmann::json::array();
  for (const auto& q : quality_history)
    j["quality_history"].push_back(nlohmann::json::parse(q.to_json()));
  j["ledger"] = nlohmann::json::parse(ledger.to_json());
  j["stall_count"] = stall_count;
  j["gateway_state"] = nlohmann::json::parse(gateway_state);
  j["timings"] = {{"mining1", mining1_seconds},
                  {"mining2", mining2_seconds},
                  {"generation", generation_seconds}};
  return j.dump(2) + "\n";
}

RunState RunState::from_json(const std::string& json_text, const Schema& schema) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint file: ") + e.what());
  }
  RunState s;
  try {
    s.config_hash = j.at("config_hash").get<std::string>();
    s.phase = j.at("phase").get<std::string>();
    s.cursor = j.at("cursor").get<std::size_t>();
    s.iteration = j.at("iteration").get<std::size_t>();
    s.analysis = j.at("analysis").get<std::string>();
    s.constraints = j.at("constraints").get<std::string>();
    for (const auto& cells : j.at("synthetic_rows"))
      s.synthetic_rows.push_back(row_from_json(cells, schema));
    for (const auto& pool : j.at("carry_pool")) {
      std::vector<Row> rows;
      for (const auto& cells : pool) rows.push_back(row_from_json(cells, schema));
      s.carry_pool.push_back(std::move(rows));
    }
    s.last_feedback = FeedbackReport::from_json(j.at("last_feedback").dump());
    for (const auto& q : j.at("quality_history"))
      s.quality_history.push_back(BatchQuality::from_json(q.dump()));
    s.ledger = UsageLedger::from_json(j.at("ledger").dump());
    s.stall_count = j.at("stall_count").get<int>();
    s.gateway_state = j.at("gateway_state").dump();
    s.mining1_seconds = j.at("timings").at("mining1").get<double>();
    s.mining2_seconds = j.at("timings").at("mining2").get<double>();
    s.generation_seconds = j.at("timings").at("generation").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint file: ") + e.what());
  }
  return s;
}

void checkpoint(const RunState& state, const Schema& schema, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write checkpoint: " + tmp);
    out << state.to_json(schema);
    if (!out) throw DataError("failed while writing checkpoint: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

RunState resume(const std::string& path, const PipelineConfig& cfg, const Schema& schema,
                Gateway& gateway) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunState state = RunState::from_json(buf.str(), schema);
  if (state.config_hash != cfg.hash())
    throw ConfigError("checkpoint config hash " + state.config_hash +
                      " does not match the current configuration " + cfg.hash());
  gateway.restore_state(state.gateway_state);
  return state;
}

// ---- class balancing -------------------------------------------------------------

std::vector<Row> CarryPool::push_and_drain(const std::vector<Row>& parsed_rows) {
  for (const auto& row : parsed_rows) {
    if (row.label < 0 || row.label >= static_cast<int>(pools_.size()))
      throw DataError("carry pool: row with out-of-range class index");
    pools_[static_cast<std::size_t>(row.label)].push_back(row);
  }
  std::size_t take = pools_.empty() ? 0 : pools_[0].size();
  for (const auto& pool : pools_) take = std::min(take, pool.size());

  std::vector<Row> drained;
  if (take == 0) return drained;
  drained.reserve(take * pools_.size());
  for (auto& pool : pools_) {
    for (std::size_t i = 0; i < take; ++i) drained.push_back(pool[i]);
    pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return drained;
}

// ---- pipeline --------------------------------------------------------------------

BatchPlan reference_plan(const Dataset& source, std::size_t batch_size) {
  if (batch_size >= 2 * source.schema.n_classes()) {
    std::vector<bool> present(source.schema.n_classes(), false);
    for (const auto& row : source.rows) present[static_cast<std::size_t>(row.label)] = true;
    const bool all_present =
        std::all_of(present.begin(), present.end(), [](bool p) { return p; });
    if (all_present) return stratified_batches(source, batch_size);
    // declared-but-empty classes cannot be stratified over
  }
  return partition_batches(source, batch_size);
}

ClassCodeMap make_run_codes(const Schema& schema, const PipelineConfig& cfg) {
  return cfg.obfuscate ? ClassCodeMap::obfuscated(schema, cfg.seed)
                       : ClassCodeMap::plain(schema);
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["iterations"] = iterations;
  j["completed"] = completed;
  j["synthetic_rows"] = synthetic.rows.size();
  j["analysis"] = analysis;
  j["constraints"] = constraints;
  j["ledger"] = nlohmann::json::parse(ledger.to_json());
  j["quality_trajectory"] = nlohmann::json::array();
  for (const auto& q : quality_trajectory)
    j["quality_trajectory"].push_back(nlohmann::json::parse(q.to_json()));
  j["timings"] = {{"prompt1_seconds", mining1_seconds},
                  {"prompt2_seconds", mining2_seconds},
                  {"prompt3_seconds", generation_seconds},
                  {"total_seconds", total_seconds}};
  return j.dump(2) + "\n";
}

namespace {

struct LoopContext {
  const Dataset& train;
  const PipelineConfig& cfg;
  Gateway& gateway;
  PromptTemplates templates;
  ClassCodeMap codes;
  StandardizationParams params;
  Dataset reference_source;
  BatchPlan plan;
  int per_class = 0;
  TranscriptWriter transcript;
};

RunReport finish_report(const Dataset& train, RunState& state, const UsageLedger& base_ledger,
                        Gateway& gateway, bool completed) {
  RunReport report;
  report.synthetic.schema = train.schema;
  report.synthetic.rows = state.synthetic_rows;
  report.quality_trajectory = state.quality_history;
  report.ledger = ledger_sum(base_ledger, gateway.ledger());
  report.iterations = state.iteration;
  report.completed = completed;
  report.analysis = state.analysis;
  report.constraints = state.constraints;
  report.mining1_seconds = state.mining1_seconds;
  report.mining2_seconds = state.mining2_seconds;
  report.generation_seconds = state.generation_seconds;
  report.total_seconds =
      state.mining1_seconds + state.mining2_seconds + state.generation_seconds;
  return report;
}

RunReport run_generation_loop(LoopContext& ctx, RunState& state, const UsageLedger& base_ledger) {
  const Schema& schema = ctx.train.schema;
  CarryPool pool(schema.n_classes());
  pool.pools() = state.carry_pool.empty()
                     ? std::vector<std::vector<Row>>(schema.n_classes())
                     : state.carry_pool;
  // restore the loop position
  ctx.plan.cursor = state.cursor;

  while (state.synthetic_rows.size() < ctx.cfg.n_target) {
    if (ctx.cfg.max_iterations > 0 && state.iteration >= ctx.cfg.max_iterations) {
      state.carry_pool = pool.pools();
      state.cursor = ctx.plan.cursor;
      if (!ctx.cfg.checkpoint_path.empty())
        checkpoint(state, schema, ctx.cfg.checkpoint_path);
      return finish_report(ctx.train, state, base_ledger, ctx.gateway, false);
    }

    const Dataset batch = ctx.reference_source.subset(ctx.plan.current());
    ctx.gateway.register_reference(batch, ctx.per_class);

    const FeedbackReport* feedback = state.last_feedback.empty() ? nullptr : &state.last_feedback;
    const auto constraints = ConstraintSet::from_text(state.constraints);
    const std::string prompt =
        build_generation_prompt(constraints, schema, batch.rows, ctx.codes, feedback,
                                ctx.per_class, ctx.templates);
    const std::vector<ChatMessage> messages = {{ChatRole::system, kSystemPrompt},
                                               {ChatRole::user, prompt}};
    const CompletionResult result = ctx.gateway.complete(messages);
    ctx.transcript.append("generation", static_cast<int>(ctx.plan.cursor), messages, result);

    const ParsedBatch parsed = parse_generated_rows(result.text, schema, ctx.codes);
    if (!parsed.rejected.empty()) {
      nlohmann::json rejects = nlohmann::json::array();
      for (const auto& r : parsed.rejected)
        rejects.push_back({{"line", r.line}, {"reason", r.reason}});
      ctx.transcript.append_note("rejects", static_cast<int>(ctx.plan.cursor), rejects.dump());
    }

    BatchQuality quality;
    if (parsed.accepted.empty()) {
      quality.empty_batch = true;
    } else {
      Dataset synth_batch;
      synth_batch.schema = schema;
      synth_batch.rows = parsed.accepted;
      quality = evaluate_batch(synth_batch, batch, ctx.params);
    }

    // targets describe the reference rows the next prompt will embed
    const Dataset next_batch = ctx.reference_source.subset(ctx.plan.next());
    const FeedbackTargets targets = FeedbackTargets::from_batch(next_batch);
    state.last_feedback = create_feedback(quality, ctx.cfg.thresholds, targets);

    const std::vector<Row> balanced = pool.push_and_drain(parsed.accepted);
    if (balanced.empty()) {
      ++state.stall_count;
      if (state.stall_count >= ctx.cfg.stall_limit)
        throw StallError("aborting after " + std::to_string(state.stall_count) +
                         " consecutive batches with zero accepted rows; last parse diagnostic: " +
                         (parsed.diagnostic.empty() ? "rows parsed but classes never balanced"
                                                    : parsed.diagnostic));
    } else {
      state.stall_count = 0;
      state.synthetic_rows.insert(state.synthetic_rows.end(), balanced.begin(), balanced.end());
    }

    state.quality_history.push_back(quality);
    state.generation_seconds += result.usage.seconds;
    ++state.iteration;
    ctx.plan.advance();

    state.carry_pool = pool.pools();
    state.cursor = ctx.plan.cursor;
    state.gateway_state = ctx.gateway.snapshot_state();
    state.ledger = ledger_sum(base_ledger, ctx.gateway.ledger());
    if (!ctx.cfg.checkpoint_path.empty()) checkpoint(state, schema, ctx.cfg.checkpoint_path);
  }

  state.phase = "done";
  if (!ctx.cfg.checkpoint_path.empty()) checkpoint(state, schema, ctx.cfg.checkpoint_path);
  return finish_report(ctx.train, state, base_ledger, ctx.gateway, true);
}

LoopContext make_context(const Dataset& train, const PipelineConfig& cfg, Gateway& gateway,
                         const CoreSet* core) {
  LoopContext ctx{train, cfg, gateway, {}, ClassCodeMap::plain(train.schema), {}, Dataset{},
                  {},    0,   TranscriptWriter{}};
  ctx.templates = cfg.prompt_template_dir.empty()
                      ? default_prompt_templates()
                      : load_prompt_templates(cfg.prompt_template_dir);
  ctx.codes = make_run_codes(train.schema, cfg);
  ctx.params = fit_standardization(train);

  ctx.reference_source = train;
  if (cfg.exclude_coreset_from_references && core) {
    std::set<std::size_t> excluded;
    for (const auto& cls : core->per_class) excluded.insert(cls.begin(), cls.end());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train.rows.size(); ++i)
      if (!excluded.count(i)) keep.push_back(i);
    if (keep.size() >= cfg.reference_batch_size) ctx.reference_source = train.subset(keep);
  }
  ctx.plan = reference_plan(ctx.reference_source, cfg.reference_batch_size);
  ctx.per_class = cfg.effective_per_class_request(train.schema.n_classes());
  return ctx;
}

}  // namespace

RunReport run_pipeline(const Dataset& train, const PipelineConfig& cfg, Gateway& gateway) {
  cfg.validate();
  if (train.rows.empty()) throw DataError("run_pipeline: training set is empty");
  {
    std::vector<std::size_t> counts(train.schema.n_classes(), 0);
    for (const auto& row : train.rows) ++counts[static_cast<std::size_t>(row.label)];
    std::size_t present = 0;
    for (auto c : counts) present += (c > 0);
    if (present < 2) throw DataError("run_pipeline: training set needs at least 2 classes");
  }

  // core set and relation mining
  const ErrorTrace trace = train_probe(train, cfg.probe);
  const VarianceScore scores = per_sample_variance(trace);
  const CoreSet core = select_coreset(train, scores, cfg.coreset_k);

  LoopContext ctx = make_context(train, cfg, gateway, &core);
  ctx.transcript = TranscriptWriter(cfg.transcript_path, cfg.hash(), cfg.seed);

  RunState state;
  state.config_hash = cfg.hash();
  state.carry_pool.assign(train.schema.n_classes(), {});

  const std::string metadata = build_metadata_prompt(train.schema, ctx.templates);
  const std::string p1 =
      build_relationship_prompt(coreset_rows(train, core), metadata, ctx.codes, ctx.templates);
  const std::vector<ChatMessage> m1 = {{ChatRole::system, kSystemPrompt}, {ChatRole::user, p1}};
  const CompletionResult r1 = gateway.complete(m1);
  ctx.transcript.append("relationship", 0, m1, r1);
  state.analysis = RelationshipAnalysis::from_text(r1.text).text;
  state.mining1_seconds = r1.usage.seconds;

  const std::string p2 = build_constraint_prompt(RelationshipAnalysis{state.analysis}, ctx.templates);
  const std::vector<ChatMessage> m2 = {{ChatRole::system, kSystemPrompt}, {ChatRole::user, p2}};
  const CompletionResult r2 = gateway.complete(m2);
  ctx.transcript.append("constraint", 0, m2, r2);
  state.constraints = ConstraintSet::from_text(r2.text).text;
  state.mining2_seconds = r2.usage.seconds;

  state.phase = "generating";
  return run_generation_loop(ctx, state, UsageLedger{});
}

RunReport resume_pipeline(const std::string& checkpoint_path, const Dataset& train,
                          const PipelineConfig& cfg, Gateway& gateway) {
  cfg.validate();
  RunState state = resume(checkpoint_path, cfg, train.schema, gateway);
  if (state.phase == "mining")
    throw DataError("checkpoint predates relation mining; start a fresh run instead");

  const UsageLedger base_ledger = state.ledger;
  // the coreset only feeds the already-recorded mining prompts; it is
  // recomputed here only when it shapes the reference plan
  CoreSet core;
  const CoreSet* core_ptr = nullptr;
  if (cfg.exclude_coreset_from_references) {
    const ErrorTrace trace = train_probe(train, cfg.probe);
    core = select_coreset(train, per_sample_variance(trace), cfg.coreset_k);
    core_ptr = &core;
  }
  LoopContext ctx = make_context(train, cfg, gateway, core_ptr);
  if (!cfg.transcript_path.empty())
    ctx.transcript = TranscriptWriter(cfg.transcript_path, cfg.hash(), cfg.seed);

  if (state.phase == "done") return finish_report(train, state, base_ledger, gateway, true);

  // ledger deltas accumulate on the fresh gateway; base_ledger carries the past
  RunState live = state;
  live.ledger = base_ledger;
  return run_generation_loop(ctx, live, base_ledger);
}

}  // namespace rddg
