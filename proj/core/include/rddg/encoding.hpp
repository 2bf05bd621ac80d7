#pragma once

#include <string>
#include <vector>

#include "rddg/tabular.hpp"

namespace rddg {

/// Dense feature encoding shared by the probe network and the baseline
/// classifiers: z-scored numerics (zero-variance columns map to 0) and
/// one-hot categoricals with the schema's full category list as the width.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;

  static FeatureEncoder fit(const Dataset& ds);

  std::size_t dimension() const { return dimension_; }
  const Schema& schema() const { return schema_; }

  std::vector<double> encode(const Row& row) const;
  std::vector<std::vector<double>> encode_all(const Dataset& ds) const;

 private:
  Schema schema_;
  StandardizationParams params_;
  std::size_t dimension_ = 0;
};

}  // namespace rddg
