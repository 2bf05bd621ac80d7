#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rddg/coreset.hpp"
#include "rddg/feedback.hpp"
#include "rddg/gateway.hpp"
#include "rddg/prompts.hpp"
#include "rddg/tabular.hpp"

namespace rddg {

struct PipelineConfig {
  std::size_t n_target = 1000;            // stop once this many rows are accepted
  std::size_t reference_batch_size = 30;  // B
  std::size_t coreset_k = 100;            // K per class
  int per_class_request = 0;              // 0 -> reference_batch_size / n_classes
  Thresholds thresholds{};
  ProbeConfig probe{};
  bool use_mock = true;
  TransportConfig transport{};
  MockConfig mock{};
  std::uint64_t seed = 0;
  bool obfuscate = false;
  bool exclude_coreset_from_references = false;
  int stall_limit = 5;          // consecutive zero-accept batches before aborting
  std::size_t max_iterations = 0;  // 0 = unlimited; otherwise an operational cap
  std::string transcript_path;     // JSONL request/response log, empty = off
  std::string checkpoint_path;     // run-state file, empty = off
  std::string prompt_template_dir; // empty = built-in templates

  void validate() const;
  int effective_per_class_request(std::size_t n_classes) const;
  std::string canonical_json() const;
  std::string hash() const;
};

/// Everything needed to continue a run: loop position, accumulated rows,
/// last feedback, carry-over pools, history and the gateway's opaque state.
struct RunState {
  std::string config_hash;
  std::string phase = "mining";  // mining | generating | done
  std::size_t cursor = 1;
  std::size_t iteration = 0;
  std::string analysis;
  std::string constraints;
  std::vector<Row> synthetic_rows;
  std::vector<std::vector<Row>> carry_pool;  // per class
  FeedbackReport last_feedback;
  std::vector<BatchQuality> quality_history;
  UsageLedger ledger;
  int stall_count = 0;
  std::string gateway_state = "{}";
  double mining1_seconds = 0.0;
  double mining2_seconds = 0.0;
  double generation_seconds = 0.0;

  std::string to_json(const Schema& schema) const;
  static RunState from_json(const std::string& json_text, const Schema& schema);
};

/// Atomic write (temp file + rename).
void checkpoint(const RunState& state, const Schema& schema, const std::string& path);
RunState resume(const std::string& path, const PipelineConfig& cfg, const Schema& schema,
                Gateway& gateway);

struct RunReport {
  Dataset synthetic;
  std::vector<BatchQuality> quality_trajectory;
  UsageLedger ledger;
  std::size_t iterations = 0;
  bool completed = true;  // false when max_iterations stopped the loop early
  std::string analysis;
  std::string constraints;
  double mining1_seconds = 0.0;
  double mining2_seconds = 0.0;
  double generation_seconds = 0.0;
  double total_seconds = 0.0;

  std::string to_json() const;
};

/// Per-batch class balancing: parsed rows pour into per-class pools and the
/// balanced part (min class count) drains out, oldest rows first. Surplus
/// rows wait for later batches to even the classes out.
class CarryPool {
 public:
  explicit CarryPool(std::size_t n_classes) : pools_(n_classes) {}

  std::vector<Row> push_and_drain(const std::vector<Row>& parsed_rows);

  const std::vector<std::vector<Row>>& pools() const { return pools_; }
  std::vector<std::vector<Row>>& pools() { return pools_; }

 private:
  std::vector<std::vector<Row>> pools_;
};

/// Executes the full pipeline: coreset, relationship analysis, constraint
/// derivation, then the feedback-driven batch loop until n_target rows are
/// accepted (or the stall guard / iteration cap fires).
RunReport run_pipeline(const Dataset& train, const PipelineConfig& cfg, Gateway& gateway);

/// Continues a checkpointed run to completion.
RunReport resume_pipeline(const std::string& checkpoint_path, const Dataset& train,
                          const PipelineConfig& cfg, Gateway& gateway);

/// The reference plan the orchestrator uses: stratified when the batch size
/// allows it, sequential otherwise.
BatchPlan reference_plan(const Dataset& source, std::size_t batch_size);

/// The code map a run derives from its config; gateway constructors must use
/// the same one the orchestrator renders prompts with.
ClassCodeMap make_run_codes(const Schema& schema, const PipelineConfig& cfg);

}  // namespace rddg
