#include "rddg/prompts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/rng.hpp"
#include "rddg/text.hpp"

namespace rddg {

namespace {

// Prompt templates, version 1. The generation template keeps {feedback_block}
// as the final placeholder so a populated feedback report is strictly
// appended to the feedback-free prompt.
const char* const kMetadataTemplate =
    "You are working with a tabular dataset.\n"
    "The dataset has the following attributes, in column order:\n"
    "{attribute_lines}"
    "The class attribute is {label}. Class sections are annotated with alphanumeric identifiers:\n"
    "{class_lines}";

const char* const kRelationshipTemplate =
    "{metadata}\n"
    "\n"
    "Here is the core set of representative samples:\n"
    "{header}\n"
    "{core_rows}"
    "\n"
    "Please analyze the relationships between these features and the {label} class. "
    "Identify any significant correlations or patterns that could help predict the class. "
    "Identify potential interactions among these features that may provide further insights.";

const char* const kConstraintTemplate =
    "{analysis}.\n"
    "Based on the above background data and the relationships among the data, "
    "rules and constraints for data generation are established.";

const char* const kGenerationTemplate =
    "{constraints}, ensure the class generation is balanced.\n"
    "\n"
    "Reference samples grouped by class section marker:\n"
    "{header}\n"
    "{sections}"
    "\n"
    "Generate {per_class} new samples per class in the same comma-separated format, "
    "grouped under the class section markers ({markers}). "
    "Output only the section marker lines and the data rows.{feedback_block}";

bool code_is_reserved(const std::string& code) {
  // these would parse as numbers
  return code == "INF" || code == "NAN";
}

}  // namespace

const PromptTemplates& default_prompt_templates() {
  static const PromptTemplates templates{kMetadataTemplate, kRelationshipTemplate,
                                         kConstraintTemplate, kGenerationTemplate};
  return templates;
}

PromptTemplates load_prompt_templates(const std::string& dir) {
  PromptTemplates templates = default_prompt_templates();
  auto load = [&](const char* file, std::string& slot) {
    const auto path = std::filesystem::path(dir) / file;
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    std::ostringstream buf;
    buf << in.rdbuf();
    slot = buf.str();
  };
  load("metadata.txt", templates.metadata);
  load("relationship.txt", templates.relationship);
  load("constraint.txt", templates.constraint);
  load("generation.txt", templates.generation);
  return templates;
}

// ---- ClassCodeMap -----------------------------------------------------------

namespace {

void require_marker_range(const Schema& schema) {
  if (schema.classes.size() > 26)
    throw DataError("class section markers support at most 26 classes, schema has " +
                    std::to_string(schema.classes.size()));
}

}  // namespace

ClassCodeMap ClassCodeMap::plain(const Schema& schema) {
  schema.validate();
  require_marker_range(schema);
  ClassCodeMap map;
  map.schema_ = schema;
  map.obfuscating_ = false;
  map.encode_maps_.resize(schema.attributes.size());
  map.decode_maps_.resize(schema.attributes.size());
  return map;
}

ClassCodeMap ClassCodeMap::obfuscated(const Schema& schema, std::uint64_t seed) {
  schema.validate();
  require_marker_range(schema);
  ClassCodeMap map;
  map.schema_ = schema;
  map.obfuscating_ = true;
  map.encode_maps_.resize(schema.attributes.size());
  map.decode_maps_.resize(schema.attributes.size());

  Rng rng(Rng::derive(seed, 131));
  std::map<std::string, bool> used;
  auto fresh_code = [&]() {
    static const char* alpha = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    static const char* alnum = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    while (true) {
      std::string code;
      code += alpha[rng.index(26)];
      code += alnum[rng.index(36)];
      code += alnum[rng.index(36)];
      if (!used.count(code) && !code_is_reserved(code)) {
        used[code] = true;
        return code;
      }
    }
  };

  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const auto& attr = schema.attributes[a];
    if (attr.is_numeric()) continue;
    for (const auto& category : attr.categories) {
      const std::string code = fresh_code();
      map.encode_maps_[a][category] = code;
      map.decode_maps_[a][code] = category;
    }
  }
  return map;
}

ClassCodeMap ClassCodeMap::from_table(
    const Schema& schema,
    const std::map<std::string, std::map<std::string, std::string>>& table) {
  schema.validate();
  require_marker_range(schema);
  ClassCodeMap map;
  map.schema_ = schema;
  map.obfuscating_ = true;
  map.encode_maps_.resize(schema.attributes.size());
  map.decode_maps_.resize(schema.attributes.size());

  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const auto& attr = schema.attributes[a];
    if (attr.is_numeric()) continue;
    auto it = table.find(attr.name);
    if (it == table.end())
      throw DataError("code table misses categorical attribute " + attr.name);
    for (const auto& category : attr.categories) {
      auto code_it = it->second.find(category);
      if (code_it == it->second.end())
        throw DataError("code table misses category '" + category + "' of " + attr.name);
      const std::string& code = code_it->second;
      if (map.decode_maps_[a].count(code))
        throw DataError("code '" + code + "' used twice within attribute " + attr.name);
      map.encode_maps_[a][category] = code;
      map.decode_maps_[a][code] = category;
    }
  }
  return map;
}

char ClassCodeMap::marker_for_class(int class_index) const {
  if (class_index < 0 || class_index >= static_cast<int>(schema_.classes.size()))
    throw DataError("marker_for_class: class index out of range");
  return static_cast<char>('A' + class_index);
}

int ClassCodeMap::class_for_marker(char letter) const {
  const int idx = letter - 'A';
  if (idx < 0 || idx >= static_cast<int>(schema_.classes.size())) return -1;
  return idx;
}

std::string ClassCodeMap::encode(std::size_t attr_index, const std::string& category) const {
  if (!obfuscating_) return category;
  const auto& m = encode_maps_.at(attr_index);
  auto it = m.find(category);
  if (it == m.end())
    throw DataError("no code for category '" + category + "' of attribute " +
                    schema_.attributes[attr_index].name);
  return it->second;
}

std::optional<std::string> ClassCodeMap::decode(std::size_t attr_index,
                                                const std::string& code) const {
  if (!obfuscating_) {
    if (schema_.attributes[attr_index].category_index(code) < 0) return std::nullopt;
    return code;
  }
  const auto& m = decode_maps_.at(attr_index);
  auto it = m.find(code);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

// ---- typed response wrappers ------------------------------------------------

RelationshipAnalysis RelationshipAnalysis::from_text(const std::string& text) {
  if (text::trim(text).empty()) throw DataError("relationship analysis is empty");
  return RelationshipAnalysis{text};
}

ConstraintSet ConstraintSet::from_text(const std::string& raw) {
  if (text::trim(raw).empty()) throw DataError("constraint set is empty");
  ConstraintSet set;
  set.text = raw;
  int last_index = 0;
  bool increasing = true;
  for (const auto& raw_line : text::split(raw, '\n')) {
    const std::string line = text::trim(raw_line);
    if (!text::starts_with(line, "Rule ")) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const auto idx = text::parse_double(line.substr(5, colon - 5));
    if (!idx) continue;
    const int n = static_cast<int>(*idx);
    if (n <= last_index) {
      increasing = false;
      break;
    }
    last_index = n;
    set.rules.emplace_back(n, text::trim(line.substr(colon + 1)));
  }
  if (!increasing) set.rules.clear();  // carried opaquely instead
  return set;
}

// ---- rendering --------------------------------------------------------------

std::string render_header(const Schema& schema) {
  std::vector<std::string> names;
  for (const auto& a : schema.attributes) names.push_back(text::csv_escape(a.name));
  return text::join(names, ",");
}

std::string render_row(const Schema& schema, const Row& row, const ClassCodeMap& codes) {
  std::vector<std::string> fields;
  fields.reserve(row.cells.size());
  for (std::size_t c = 0; c < row.cells.size(); ++c) {
    if (schema.attributes[c].is_numeric())
      fields.push_back(text::format_double(std::get<double>(row.cells[c])));
    else
      fields.push_back(codes.encode(c, std::get<std::string>(row.cells[c])));
  }
  return text::join(fields, ",");
}

std::string render_class_sections(const Schema& schema, const std::vector<Row>& rows,
                                  const ClassCodeMap& codes) {
  std::string out;
  for (std::size_t c = 0; c < schema.classes.size(); ++c) {
    bool any = false;
    for (const auto& row : rows) {
      if (row.label != static_cast<int>(c)) continue;
      if (!any) {
        out += codes.marker_for_class(static_cast<int>(c));
        out += ".\n";
        any = true;
      }
      out += render_row(schema, row, codes);
      out += '\n';
    }
  }
  return out;
}

// ---- prompt builders ---------------------------------------------------------

std::string build_metadata_prompt(const Schema& schema, const PromptTemplates& templates) {
  schema.validate();
  std::string attribute_lines;
  for (const auto& attr : schema.attributes) {
    if (text::trim(attr.description).empty())
      throw DataError("attribute lacks a description for the metadata prompt: " + attr.name);
    attribute_lines += "- " + attr.name;
    if (attr.is_numeric()) {
      attribute_lines += " (numeric): ";
    } else {
      attribute_lines += " (categorical; values: " + text::join(attr.categories, ", ") + "): ";
    }
    attribute_lines += attr.description;
    attribute_lines += '\n';
  }
  std::string class_lines;
  for (std::size_t c = 0; c < schema.classes.size(); ++c) {
    class_lines += "- ";
    class_lines += static_cast<char>('A' + c);
    class_lines += " = " + schema.classes[c] + "\n";
  }
  return text::render_template(templates.metadata, {{"attribute_lines", attribute_lines},
                                                    {"label", schema.label},
                                                    {"class_lines", class_lines}});
}

std::string build_relationship_prompt(const Dataset& core_rows, const std::string& metadata,
                                      const ClassCodeMap& codes,
                                      const PromptTemplates& templates) {
  if (core_rows.rows.empty()) throw DataError("relationship prompt needs a non-empty core set");
  std::string rows_text;
  for (const auto& row : core_rows.rows) {
    rows_text += render_row(core_rows.schema, row, codes);
    rows_text += '\n';
  }
  return text::render_template(templates.relationship,
                               {{"metadata", metadata},
                                {"header", render_header(core_rows.schema)},
                                {"core_rows", rows_text},
                                {"label", core_rows.schema.label}});
}

std::string build_constraint_prompt(const RelationshipAnalysis& analysis,
                                    const PromptTemplates& templates) {
  if (text::trim(analysis.text).empty()) throw DataError("constraint prompt needs a non-empty analysis");
  return text::render_template(templates.constraint, {{"analysis", analysis.text}});
}

std::string build_generation_prompt(const ConstraintSet& constraints, const Schema& schema,
                                    const std::vector<Row>& reference, const ClassCodeMap& codes,
                                    const FeedbackReport* feedback, int per_class_request,
                                    const PromptTemplates& templates) {
  if (reference.empty()) throw DataError("generation prompt needs a non-empty reference batch");
  if (per_class_request < 1) throw ConfigError("per-class request count must be >= 1");

  std::vector<std::string> markers;
  for (std::size_t c = 0; c < schema.classes.size(); ++c)
    markers.push_back(std::string(1, static_cast<char>('A' + c)) + ".");

  std::string feedback_block;
  if (feedback && !feedback->empty()) feedback_block = "\n\n" + feedback->rendered;

  return text::render_template(
      templates.generation,
      {{"constraints", constraints.text},
       {"header", render_header(schema)},
       {"sections", render_class_sections(schema, reference, codes)},
       {"per_class", std::to_string(per_class_request)},
       {"markers", text::join(markers, ", ")},
       {"feedback_block", feedback_block}});
}

// ---- response parsing ---------------------------------------------------------

namespace {

bool is_marker_line(const std::string& line) {
  return line.size() == 2 && line[0] >= 'A' && line[0] <= 'Z' && line[1] == '.';
}

bool is_header_line(const std::string& line, const std::vector<std::string>& names) {
  auto fields = text::split_csv_record(line);
  for (auto& f : fields) f = text::trim(f);
  if (fields == names) return true;
  // space-separated header variant, only unambiguous when no name has spaces
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens == names;
}

}  // namespace

ParsedBatch parse_generated_rows(const std::string& response, const Schema& schema,
                                 const ClassCodeMap& codes) {
  ParsedBatch batch;
  batch.per_class_counts.assign(schema.classes.size(), 0);
  const auto names = schema.attribute_names();
  const int label_col = schema.label_index();
  int current_class = -1;

  for (const auto& raw_line : text::split(response, '\n')) {
    const std::string line = text::trim(raw_line);
    if (line.empty()) continue;

    if (is_marker_line(line)) {
      const int cls = codes.class_for_marker(line[0]);
      if (cls < 0)
        batch.rejected.push_back({line, "unknown section marker"});
      else
        current_class = cls;
      continue;
    }
    if (is_header_line(line, names)) continue;

    auto fields = text::split_csv_record(line);
    for (auto& f : fields) f = text::trim(f);
    if (fields.size() != schema.attributes.size()) {
      batch.rejected.push_back(
          {line, "arity mismatch: got " + std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(schema.attributes.size())});
      continue;
    }
    if (current_class < 0) {
      batch.rejected.push_back({line, "no class section marker precedes this row"});
      continue;
    }

    Row row;
    row.cells.reserve(fields.size());
    std::string reason;
    for (std::size_t c = 0; c < fields.size() && reason.empty(); ++c) {
      const auto& attr = schema.attributes[c];
      if (attr.is_numeric()) {
        const auto v = text::parse_double(fields[c]);
        if (!v)
          reason = "numeric parse failed for " + attr.name + ": '" + fields[c] + "'";
        else
          row.cells.emplace_back(*v);
      } else {
        const auto decoded = codes.decode(c, fields[c]);
        if (!decoded)
          reason = "unknown category '" + fields[c] + "' for " + attr.name;
        else
          row.cells.emplace_back(*decoded);
      }
    }
    if (reason.empty()) {
      const auto& label_value = std::get<std::string>(row.cells[static_cast<std::size_t>(label_col)]);
      const int row_class = schema.class_index(label_value);
      if (row_class != current_class)
        reason = "label '" + label_value + "' does not match section class " +
                 schema.classes[static_cast<std::size_t>(current_class)];
    }
    if (!reason.empty()) {
      batch.rejected.push_back({line, reason});
      continue;
    }
    row.label = current_class;
    ++batch.per_class_counts[static_cast<std::size_t>(current_class)];
    batch.accepted.push_back(std::move(row));
  }

  if (batch.accepted.empty())
    batch.diagnostic = "no parseable data rows found in the response";
  return batch;
}

std::string ParsedBatch::rejects_to_jsonl() const {
  std::string out;
  for (const auto& r : rejected) {
    nlohmann::json j = {{"line", r.line}, {"reason", r.reason}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace rddg
