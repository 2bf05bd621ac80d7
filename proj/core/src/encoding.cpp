#include "rddg/encoding.hpp"

#include "rddg/error.hpp"

namespace rddg {

FeatureEncoder FeatureEncoder::fit(const Dataset& ds) {
  FeatureEncoder enc;
  enc.schema_ = ds.schema;
  enc.params_ = fit_standardization(ds);
  const int label = ds.schema.label_index();
  std::size_t dim = 0;
  for (std::size_t c = 0; c < ds.schema.attributes.size(); ++c) {
    if (static_cast<int>(c) == label) continue;  // the target never enters the features
    const auto& attr = ds.schema.attributes[c];
    dim += attr.is_numeric() ? 1 : attr.categories.size();
  }
  enc.dimension_ = dim;
  return enc;
}

std::vector<double> FeatureEncoder::encode(const Row& row) const {
  std::vector<double> x;
  x.reserve(dimension_);
  const int label = schema_.label_index();
  for (std::size_t c = 0; c < schema_.attributes.size(); ++c) {
    if (static_cast<int>(c) == label) continue;
    const auto& attr = schema_.attributes[c];
    if (attr.is_numeric()) {
      const auto* stats = params_.find(attr.name);
      const double v = std::get<double>(row.cells[c]);
      x.push_back(stats && !stats->degenerate ? (v - stats->mean) / stats->stddev : 0.0);
    } else {
      const int idx = attr.category_index(std::get<std::string>(row.cells[c]));
      if (idx < 0) throw DataError("encode: unknown category for attribute " + attr.name);
      for (std::size_t k = 0; k < attr.categories.size(); ++k)
        x.push_back(k == static_cast<std::size_t>(idx) ? 1.0 : 0.0);
    }
  }
  return x;
}

std::vector<std::vector<double>> FeatureEncoder::encode_all(const Dataset& ds) const {
  std::vector<std::vector<double>> out;
  out.reserve(ds.rows.size());
  for (const auto& row : ds.rows) out.push_back(encode(row));
  return out;
}

}  // namespace rddg
