#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rddg/prompts.hpp"
#include "rddg/tabular.hpp"

namespace rddg {

enum class ChatRole { system, user, assistant };

struct ChatMessage {
  ChatRole role = ChatRole::user;
  std::string content;  // must be non-empty for system/user roles
};

std::string chat_role_string(ChatRole role);

/// Connection settings for a chat-completion endpoint. The model is always
/// configuration; the API credential is read from the named environment
/// variable and never stored.
struct TransportConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo-0125";
  double temperature = 0.7;
  int max_output_tokens = 2048;
  int max_attempts = 3;
  double backoff_base_seconds = 0.5;
  std::string credential_env = "RDDG_API_KEY";
  double price_per_million_input = 0.5;   // for the cost ledger
  double price_per_million_output = 1.5;
  int timeout_seconds = 120;

  void validate() const;
};

/// Monotone token/cost accounting across a run.
struct UsageLedger {
  long input_tokens = 0;
  long output_tokens = 0;
  long requests = 0;
  double wall_seconds = 0.0;
  double cost = 0.0;
  bool any_estimated = false;  // some token counts were estimated from text length

  std::string to_json() const;
  static UsageLedger from_json(const std::string& json_text);
};

struct UsageDelta {
  long input_tokens = 0;
  long output_tokens = 0;
  double seconds = 0.0;
  bool estimated = false;
};

struct CompletionResult {
  std::string text;
  UsageDelta usage;
};

double request_cost(const UsageDelta& usage, const TransportConfig& cfg);

/// Uniform completion interface. The orchestrator drives it strictly
/// sequentially; batch i+1 depends on the feedback computed from batch i.
class Gateway {
 public:
  virtual ~Gateway() = default;

  virtual CompletionResult complete(const std::vector<ChatMessage>& messages) = 0;

  /// Structured side channel announcing the reference rows for the next
  /// generation call. No-op for transports that do not need it.
  virtual void register_reference(const Dataset& batch, int rows_per_class) {
    (void)batch;
    (void)rows_per_class;
  }

  /// Opaque JSON state for checkpoint/resume. Transports without state
  /// return "{}".
  virtual std::string snapshot_state() const { return "{}"; }
  virtual void restore_state(const std::string& json_text) { (void)json_text; }

  const UsageLedger& ledger() const { return ledger_; }

 protected:
  void record(const UsageDelta& delta, double cost);

  UsageLedger ledger_;
};

/// HTTP chat-completion client with exponential full-jitter backoff on
/// retryable failures (rate limits, 5xx, transport errors).
class HttpGateway : public Gateway {
 public:
  explicit HttpGateway(TransportConfig cfg);

  CompletionResult complete(const std::vector<ChatMessage>& messages) override;

 private:
  TransportConfig cfg_;
  std::string credential_;
  std::uint64_t jitter_state_;
};

struct MockConfig {
  double mean_shift = -0.75;  // initial mean distortion, in pooled-std units (sign = direction)
  double std_scale = 1.4;     // initial multiplicative std distortion
  std::uint64_t seed = 0;
};

/// Offline generator that emits the marker-sectioned CSV grammar. Numerics
/// come from per-class Gaussians fitted on the registered reference rows and
/// are re-centered so sample moments match the intended ones exactly;
/// categoricals are sampled from fitted per-class frequencies. A quality
/// report in the prompt moves the distorted means/stds halfway toward the
/// directive targets, once per batch.
class MockGateway : public Gateway {
 public:
  MockGateway(const Schema& schema, const ClassCodeMap& codes, const MockConfig& cfg);

  CompletionResult complete(const std::vector<ChatMessage>& messages) override;
  void register_reference(const Dataset& batch, int rows_per_class) override;

  std::string snapshot_state() const override;
  void restore_state(const std::string& json_text) override;

 private:
  struct ClassFit {
    std::vector<double> mean;                       // per numeric attribute
    std::vector<double> stddev;
    std::vector<std::vector<std::size_t>> counts;   // per categorical attribute
  };

  Schema schema_;
  ClassCodeMap codes_;
  MockConfig cfg_;
  std::vector<int> numeric_cols_;
  std::vector<int> categorical_cols_;

  bool has_reference_ = false;
  int rows_per_class_ = 0;
  std::vector<ClassFit> fits_;           // per class
  std::vector<bool> class_present_;      // class had rows in the current batch
  std::vector<double> pooled_mean_;      // per numeric attribute
  std::vector<double> pooled_std_;
  std::vector<double> mean_offset_;      // persistent raw-scale distortion
  std::vector<double> std_factor_;       // persistent multiplicative distortion
  bool offsets_initialized_ = false;
  std::uint64_t call_count_ = 0;

  void apply_feedback(const std::string& prompt);
  std::string generate_batch_text();
};

/// Replays a recorded transcript: every complete() call pops the next
/// recorded response and its usage. Request prompts are checked against the
/// recording so a drifted pipeline fails loudly.
class ReplayGateway : public Gateway {
 public:
  explicit ReplayGateway(const std::string& transcript_path);

  CompletionResult complete(const std::vector<ChatMessage>& messages) override;

 private:
  struct Entry {
    std::vector<ChatMessage> messages;
    std::string response;
    UsageDelta usage;
  };
  std::vector<Entry> entries_;
  std::size_t next_ = 0;
};

/// Appends request/response pairs as JSON lines for replay and audit.
class TranscriptWriter {
 public:
  TranscriptWriter() = default;
  explicit TranscriptWriter(const std::string& path, const std::string& config_hash,
                            std::uint64_t seed);

  bool enabled() const { return !path_.empty(); }
  void append(const std::string& phase, int batch, const std::vector<ChatMessage>& messages,
              const CompletionResult& result);

  /// Free-form side entries (e.g. parser rejects); replay ignores them.
  void append_note(const std::string& kind, int batch, const std::string& payload_json);

 private:
  std::string path_;
};

}  // namespace rddg
