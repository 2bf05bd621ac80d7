#include "rddg/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "rddg/error.hpp"
#include "rddg/rng.hpp"
#include "rddg/text.hpp"

namespace rddg {

int AttributeSpec::category_index(const std::string& value) const {
  for (std::size_t i = 0; i < categories.size(); ++i)
    if (categories[i] == value) return static_cast<int>(i);
  return -1;
}

void Schema::validate() const {
  if (attributes.empty()) throw DataError("schema has no attributes");
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    const auto& a = attributes[i];
    if (a.name.empty()) throw DataError("schema attribute #" + std::to_string(i) + " has an empty name");
    for (std::size_t j = i + 1; j < attributes.size(); ++j)
      if (attributes[j].name == a.name)
        throw DataError("duplicate attribute name in schema: " + a.name);
    if (a.kind == AttributeKind::categorical && a.categories.empty())
      throw DataError("categorical attribute has no categories: " + a.name);
  }
  int li = label_index();
  if (li < 0) throw DataError("label attribute not found in schema: " + label);
  if (attributes[li].kind != AttributeKind::categorical)
    throw DataError("label attribute must be categorical: " + label);
  if (classes.size() < 2) throw DataError("schema needs at least 2 classes");
  for (const auto& c : classes)
    if (attributes[li].category_index(c) < 0)
      throw DataError("class '" + c + "' is not a category of label attribute " + label);
}

int Schema::attribute_index(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i)
    if (attributes[i].name == name) return static_cast<int>(i);
  return -1;
}

int Schema::class_index(const std::string& value) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == value) return static_cast<int>(i);
  return -1;
}

std::vector<int> Schema::numeric_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < attributes.size(); ++i)
    if (attributes[i].is_numeric()) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::string> Schema::attribute_names() const {
  std::vector<std::string> names;
  names.reserve(attributes.size());
  for (const auto& a : attributes) names.push_back(a.name);
  return names;
}

double Dataset::numeric_at(std::size_t row, std::size_t col) const {
  return std::get<double>(rows[row].cells[col]);
}

const std::string& Dataset::category_at(std::size_t row, std::size_t col) const {
  return std::get<std::string>(rows[row].cells[col]);
}

std::vector<double> Dataset::numeric_column(std::size_t col) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(std::get<double>(r.cells[col]));
  return out;
}

void Dataset::validate() const {
  schema.validate();
  const std::size_t n_attr = schema.attributes.size();
  const int li = schema.label_index();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.cells.size() != n_attr)
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(row.cells.size()) +
                      " cells, schema has " + std::to_string(n_attr) + " attributes");
    for (std::size_t c = 0; c < n_attr; ++c) {
      const auto& attr = schema.attributes[c];
      if (attr.is_numeric()) {
        if (!std::holds_alternative<double>(row.cells[c]))
          throw DataError("row " + std::to_string(r) + ": attribute " + attr.name + " must be numeric");
      } else {
        if (!std::holds_alternative<std::string>(row.cells[c]))
          throw DataError("row " + std::to_string(r) + ": attribute " + attr.name + " must be categorical");
        const auto& v = std::get<std::string>(row.cells[c]);
        if (attr.category_index(v) < 0)
          throw DataError("row " + std::to_string(r) + ": unknown category '" + v +
                          "' for attribute " + attr.name);
      }
    }
    if (row.label < 0 || row.label >= static_cast<int>(schema.classes.size()))
      throw DataError("row " + std::to_string(r) + " has class index out of range");
    if (std::get<std::string>(row.cells[li]) != schema.classes[row.label])
      throw DataError("row " + std::to_string(r) + ": label cell does not match class index");
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.schema = schema;
  out.rows.reserve(indices.size());
  for (auto i : indices) out.rows.push_back(rows.at(i));
  return out;
}

const StandardizationParams::ColumnStats* StandardizationParams::find(
    const std::string& attribute) const {
  for (const auto& c : columns)
    if (c.attribute == attribute) return &c;
  return nullptr;
}

std::string cell_to_string(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) return text::format_double(std::get<double>(cell));
  return std::get<std::string>(cell);
}

namespace {

Row parse_row(const std::vector<std::string>& fields, const Schema& schema, std::size_t line_no) {
  Row row;
  row.cells.reserve(fields.size());
  for (std::size_t c = 0; c < fields.size(); ++c) {
    const auto& attr = schema.attributes[c];
    const std::string value = text::trim(fields[c]);
    if (attr.is_numeric()) {
      auto v = text::parse_double(value);
      if (!v)
        throw DataError("line " + std::to_string(line_no) + ": cannot parse numeric value '" +
                        value + "' for attribute " + attr.name);
      row.cells.emplace_back(*v);
    } else {
      if (attr.category_index(value) < 0)
        throw DataError("line " + std::to_string(line_no) + ": unknown category '" + value +
                        "' for attribute " + attr.name);
      row.cells.emplace_back(value);
    }
  }
  const int li = schema.label_index();
  row.label = schema.class_index(std::get<std::string>(row.cells[li]));
  if (row.label < 0)
    throw DataError("line " + std::to_string(line_no) + ": label value '" +
                    std::get<std::string>(row.cells[li]) + "' is not a declared class");
  return row;
}

}  // namespace

Dataset parse_csv(const std::string& content, const Schema& schema) {
  schema.validate();
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv input is empty (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = text::split_csv_record(line);
  for (auto& h : header) h = text::trim(h);
  auto expected = schema.attribute_names();
  if (header != expected)
    throw DataError("csv header mismatch: expected [" + text::join(expected, ",") +
                    "], found [" + text::join(header, ",") + "]");

  Dataset ds;
  ds.schema = schema;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto fields = text::split_csv_record(line);
    if (fields.size() != schema.attributes.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(schema.attributes.size()) + " fields, found " +
                      std::to_string(fields.size()));
    ds.rows.push_back(parse_row(fields, schema, line_no));
  }
  return ds;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open csv file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema);
}

std::string to_csv_string(const Dataset& ds) {
  std::string out;
  std::vector<std::string> header;
  for (const auto& a : ds.schema.attributes) header.push_back(text::csv_escape(a.name));
  out += text::join(header, ",");
  out += '\n';
  for (const auto& row : ds.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.cells.size());
    for (std::size_t c = 0; c < row.cells.size(); ++c) {
      if (ds.schema.attributes[c].is_numeric())
        fields.push_back(cell_to_string(row.cells[c]));
      else
        fields.push_back(text::csv_escape(std::get<std::string>(row.cells[c])));
    }
    out += text::join(fields, ",");
    out += '\n';
  }
  return out;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write csv file: " + path);
  out << to_csv_string(ds);
  if (!out) throw DataError("failed while writing csv file: " + path);
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double train_fraction,
                                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train fraction must be in (0, 1), got " +
                      text::format_double(train_fraction));
  if (ds.rows.size() < 2) throw DataError("dataset too small to split (need >= 2 rows)");

  std::vector<std::size_t> order(ds.rows.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(ds.rows.size()) * train_fraction));
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test_idx(order.begin() + n_train, order.end());
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

BatchPlan partition_batches(const Dataset& ds, std::size_t batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  BatchPlan plan;
  plan.batch_size = batch_size;
  std::vector<std::size_t> group;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    group.push_back(i);
    if (group.size() == batch_size) {
      plan.groups.push_back(std::move(group));
      group.clear();
    }
  }
  if (!group.empty()) plan.groups.push_back(std::move(group));  // trailing partial batch kept
  return plan;
}

BatchPlan stratified_batches(const Dataset& ds, std::size_t batch_size) {
  if (batch_size < 2 * ds.schema.n_classes())
    throw ConfigError("stratified batches need batch_size >= 2 * n_classes");
  // Every batch carries an equal per-class quota. Classes smaller than the
  // plan cycle their rows so no batch ever lacks a class; the largest class
  // determines the batch count and is covered without repetition.
  std::vector<std::vector<std::size_t>> per_class(ds.schema.n_classes());
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    per_class[static_cast<std::size_t>(ds.rows[i].label)].push_back(i);
  for (std::size_t c = 0; c < per_class.size(); ++c)
    if (per_class[c].empty())
      throw DataError("stratified batches: class has no rows: " + ds.schema.classes[c]);

  const std::size_t n_classes = per_class.size();
  std::vector<std::size_t> quota(n_classes, batch_size / n_classes);
  for (std::size_t c = 0; c < batch_size % n_classes; ++c) ++quota[c];

  std::size_t n_batches = 1;
  for (std::size_t c = 0; c < n_classes; ++c)
    n_batches = std::max(n_batches, (per_class[c].size() + quota[c] - 1) / quota[c]);

  BatchPlan plan;
  plan.batch_size = batch_size;
  std::vector<std::size_t> pos(n_classes, 0);
  for (std::size_t j = 0; j < n_batches; ++j) {
    std::vector<std::size_t> group;
    group.reserve(batch_size);
    for (std::size_t c = 0; c < n_classes; ++c)
      for (std::size_t k = 0; k < quota[c]; ++k)
        group.push_back(per_class[c][pos[c]++ % per_class[c].size()]);
    plan.groups.push_back(std::move(group));
  }
  return plan;
}

StandardizationParams fit_standardization(const Dataset& ds) {
  StandardizationParams params;
  for (int col : ds.schema.numeric_indices()) {
    StandardizationParams::ColumnStats stats;
    stats.attribute = ds.schema.attributes[col].name;
    const auto values = ds.numeric_column(static_cast<std::size_t>(col));
    if (!values.empty()) {
      double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                    static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size());
      stats.mean = mean;
      stats.stddev = std::sqrt(var);
    }
    stats.degenerate = (stats.stddev == 0.0);
    params.columns.push_back(stats);
  }
  return params;
}

std::pair<Dataset, StandardizationParams> standardize(
    const Dataset& ds, const std::optional<StandardizationParams>& params) {
  auto numeric = ds.schema.numeric_indices();
  if (numeric.empty()) throw DataError("standardize: dataset has no numeric attributes");

  StandardizationParams fitted = params ? *params : fit_standardization(ds);
  if (fitted.columns.size() != numeric.size())
    throw DataError("standardization params cover " + std::to_string(fitted.columns.size()) +
                    " columns, dataset has " + std::to_string(numeric.size()));
  for (std::size_t k = 0; k < numeric.size(); ++k)
    if (fitted.columns[k].attribute != ds.schema.attributes[numeric[k]].name)
      throw DataError("standardization params do not match schema at column " +
                      fitted.columns[k].attribute);

  Dataset out = ds;
  for (std::size_t k = 0; k < numeric.size(); ++k) {
    const auto& stats = fitted.columns[k];
    if (stats.degenerate) continue;  // flagged, never divided by
    const auto col = static_cast<std::size_t>(numeric[k]);
    for (auto& row : out.rows) {
      double& v = std::get<double>(row.cells[col]);
      v = (v - stats.mean) / stats.stddev;
    }
  }
  return {std::move(out), std::move(fitted)};
}

ClassStats class_stats(const Dataset& ds) {
  ClassStats stats;
  for (const auto& c : ds.schema.classes) stats.counts[c] = 0;
  for (const auto& row : ds.rows)
    ++stats.counts[ds.schema.classes[static_cast<std::size_t>(row.label)]];

  std::size_t max_count = 0;
  std::size_t min_count = std::numeric_limits<std::size_t>::max();
  for (const auto& [label, count] : stats.counts) {
    if (count == 0) stats.empty_classes.push_back(label);
    max_count = std::max(max_count, count);
    min_count = std::min(min_count, count);
  }
  if (min_count == 0)
    stats.imbalance_ratio = std::numeric_limits<double>::infinity();
  else
    stats.imbalance_ratio = static_cast<double>(max_count) / static_cast<double>(min_count);
  return stats;
}

}  // namespace rddg
