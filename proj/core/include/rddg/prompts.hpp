#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rddg/feedback.hpp"
#include "rddg/tabular.hpp"

namespace rddg {

/// Bijection between classes and single-letter section markers (A., B., ...)
/// plus, when obfuscation is on, between categorical values and opaque
/// three-character codes. Stable for a whole run and round-trips exactly.
class ClassCodeMap {
 public:
  /// Markers only; categorical values pass through unchanged.
  static ClassCodeMap plain(const Schema& schema);

  /// Opaque codes for every (attribute, category) pair, deterministic in seed.
  static ClassCodeMap obfuscated(const Schema& schema, std::uint64_t seed);

  /// Explicit code table: attribute name -> category -> code. Every category
  /// of every categorical attribute must be covered.
  static ClassCodeMap from_table(
      const Schema& schema,
      const std::map<std::string, std::map<std::string, std::string>>& table);

  char marker_for_class(int class_index) const;
  int class_for_marker(char letter) const;  // -1 when out of range

  std::string encode(std::size_t attr_index, const std::string& category) const;
  std::optional<std::string> decode(std::size_t attr_index, const std::string& code) const;

  bool obfuscating() const { return obfuscating_; }
  const Schema& schema() const { return schema_; }

 private:
  Schema schema_;
  bool obfuscating_ = false;
  // per attribute: category -> code and code -> category
  std::vector<std::map<std::string, std::string>> encode_maps_;
  std::vector<std::map<std::string, std::string>> decode_maps_;
};

/// Raw text of the Prompt-1 response.
struct RelationshipAnalysis {
  std::string text;

  static RelationshipAnalysis from_text(const std::string& text);  // rejects empty
};

/// Raw text of the Prompt-2 response plus any parsed "Rule n:" lines. Rules
/// are kept only when their indices come out strictly increasing; otherwise
/// the text is carried opaquely.
struct ConstraintSet {
  std::string text;
  std::vector<std::pair<int, std::string>> rules;

  static ConstraintSet from_text(const std::string& text);  // rejects empty
};

/// Outcome of parsing one LLM generation response. Candidate data lines are
/// either accepted (fully validated rows) or rejected with a reason; marker,
/// header and blank lines are not candidates.
struct ParsedBatch {
  struct Reject {
    std::string line;
    std::string reason;
  };

  std::vector<Row> accepted;
  std::vector<Reject> rejected;
  std::vector<std::size_t> per_class_counts;
  std::string diagnostic;  // set when no row was accepted

  std::string rejects_to_jsonl() const;
};

/// The four prompt templates as versioned text with {placeholder} slots.
struct PromptTemplates {
  std::string metadata;
  std::string relationship;
  std::string constraint;
  std::string generation;
};

const PromptTemplates& default_prompt_templates();

/// Loads metadata.txt / relationship.txt / constraint.txt / generation.txt
/// from a directory, falling back to the default for missing files.
PromptTemplates load_prompt_templates(const std::string& dir);

// ---- rendering -------------------------------------------------------------

std::string render_header(const Schema& schema);

std::string render_row(const Schema& schema, const Row& row, const ClassCodeMap& codes);

/// Rows grouped under their class section markers, classes in order:
///   A.
///   <row>
///   B.
///   <row>
std::string render_class_sections(const Schema& schema, const std::vector<Row>& rows,
                                  const ClassCodeMap& codes);

// ---- prompt builders (pure, byte-deterministic) -----------------------------

std::string build_metadata_prompt(const Schema& schema,
                                  const PromptTemplates& templates = default_prompt_templates());

std::string build_relationship_prompt(const Dataset& core_rows, const std::string& metadata,
                                      const ClassCodeMap& codes,
                                      const PromptTemplates& templates = default_prompt_templates());

std::string build_constraint_prompt(const RelationshipAnalysis& analysis,
                                    const PromptTemplates& templates = default_prompt_templates());

/// Generation prompt: constraints, reference rows under class markers, the
/// balance directive, and (iff feedback is non-empty) the quality-report
/// block strictly appended at the end.
std::string build_generation_prompt(const ConstraintSet& constraints, const Schema& schema,
                                    const std::vector<Row>& reference, const ClassCodeMap& codes,
                                    const FeedbackReport* feedback, int per_class_request,
                                    const PromptTemplates& templates = default_prompt_templates());

/// Tolerant parser for the marker-sectioned CSV grammar. Never throws on
/// malformed content; bad lines land in rejects with a reason.
ParsedBatch parse_generated_rows(const std::string& response, const Schema& schema,
                                 const ClassCodeMap& codes);

}  // namespace rddg
