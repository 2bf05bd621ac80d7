#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rddg {

enum class AttributeKind { numeric, categorical };

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::string description;               // free text used in metadata prompts
  std::vector<std::string> categories;   // categorical only, ordered

  bool is_numeric() const { return kind == AttributeKind::numeric; }
  int category_index(const std::string& value) const;  // -1 when absent

  bool operator==(const AttributeSpec&) const = default;
};

/// Typed column layout shared by every dataset in a run. Attribute order is
/// the canonical column order for all serialization.
struct Schema {
  std::vector<AttributeSpec> attributes;
  std::string label;                  // name of the class attribute
  std::vector<std::string> classes;   // ordered class label strings

  void validate() const;  // throws DataError on a malformed schema

  int attribute_index(const std::string& name) const;  // -1 when absent
  int label_index() const { return attribute_index(label); }
  int class_index(const std::string& value) const;     // -1 when absent
  std::vector<int> numeric_indices() const;
  std::vector<std::string> attribute_names() const;
  std::size_t n_classes() const { return classes.size(); }

  bool operator==(const Schema&) const = default;
};

/// A cell is either a numeric value or a category string.
using Cell = std::variant<double, std::string>;

struct Row {
  std::vector<Cell> cells;  // one per schema attribute, canonical order
  int label = -1;           // resolved class index

  bool operator==(const Row&) const = default;
};

struct Dataset {
  Schema schema;
  std::vector<Row> rows;

  std::size_t size() const { return rows.size(); }
  double numeric_at(std::size_t row, std::size_t col) const;
  const std::string& category_at(std::size_t row, std::size_t col) const;

  /// Column view of a numeric attribute.
  std::vector<double> numeric_column(std::size_t col) const;

  /// Validates every row against the schema (arity, domains, class index).
  void validate() const;

  Dataset subset(const std::vector<std::size_t>& indices) const;

  bool operator==(const Dataset&) const = default;
};

/// Per-attribute mean/std fitted on one dataset and reused everywhere else.
/// Population standard deviation throughout; zero-variance columns are
/// flagged and passed through untouched rather than divided by.
struct StandardizationParams {
  struct ColumnStats {
    std::string attribute;
    double mean = 0.0;
    double stddev = 0.0;
    bool degenerate = false;  // stddev == 0
  };
  std::vector<ColumnStats> columns;  // one per numeric attribute, schema order

  const ColumnStats* find(const std::string& attribute) const;
};

/// Eager partition of row indices into generation reference batches.
/// Cursor is 1-based and cycles: advance is i <- (i mod m) + 1.
struct BatchPlan {
  std::size_t batch_size = 0;
  std::vector<std::vector<std::size_t>> groups;
  std::size_t cursor = 1;

  std::size_t n_batches() const { return groups.size(); }
  const std::vector<std::size_t>& current() const { return groups.at(cursor - 1); }
  /// The group the cursor will point at after the next advance.
  const std::vector<std::size_t>& next() const { return groups.at(cursor % groups.size()); }
  void advance() { cursor = (cursor % groups.size()) + 1; }
};

struct ClassStats {
  std::map<std::string, std::size_t> counts;   // class label -> row count
  double imbalance_ratio = 1.0;                // max count / min count
  std::vector<std::string> empty_classes;      // classes with zero rows
};

// ---- operations ------------------------------------------------------------

Dataset load_csv(const std::string& path, const Schema& schema);
Dataset parse_csv(const std::string& content, const Schema& schema);

void save_csv(const Dataset& ds, const std::string& path);
std::string to_csv_string(const Dataset& ds);

/// Text form of one cell: shortest round-trip decimal for numerics,
/// the category string otherwise.
std::string cell_to_string(const Cell& cell);

/// Deterministic shuffle split; sizes are round(N*f) and N - round(N*f).
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed);

/// Sequential batches in dataset order; a trailing partial batch is kept.
BatchPlan partition_batches(const Dataset& ds, std::size_t batch_size);

/// Class-balanced variant used for reference batches: every batch carries an
/// equal per-class quota, with smaller classes cycling their rows so no batch
/// lacks a class. Requires batch_size >= 2 * n_classes; callers fall back to
/// partition_batches otherwise.
BatchPlan stratified_batches(const Dataset& ds, std::size_t batch_size);

/// z-scores every numeric column. When params is absent they are fitted on
/// ds itself; zero-variance columns are flagged and left unchanged.
std::pair<Dataset, StandardizationParams> standardize(
    const Dataset& ds, const std::optional<StandardizationParams>& params = std::nullopt);

StandardizationParams fit_standardization(const Dataset& ds);

ClassStats class_stats(const Dataset& ds);

}  // namespace rddg
