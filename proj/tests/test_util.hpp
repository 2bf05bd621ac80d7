#pragma once

#include <filesystem>
#include <string>

#include "rddg/rng.hpp"
#include "rddg/tabular.hpp"

namespace testutil {

/// Two numeric attributes plus a binary class label, descriptions included.
inline rddg::Schema toy_schema() {
  rddg::Schema s;
  s.attributes = {
      {"x", rddg::AttributeKind::numeric, "first coordinate", {}},
      {"y", rddg::AttributeKind::numeric, "second coordinate", {}},
      {"cls", rddg::AttributeKind::categorical, "class label", {"a", "b"}},
  };
  s.label = "cls";
  s.classes = {"a", "b"};
  return s;
}

inline rddg::Row toy_row(double x, double y, int cls) {
  rddg::Row row;
  row.cells = {x, y, std::string(cls == 0 ? "a" : "b")};
  row.label = cls;
  return row;
}

/// Linearly separable two-class blobs at (-2,-2) and (2,2).
inline rddg::Dataset blobs(std::size_t n, std::uint64_t seed, double spread = 0.7) {
  rddg::Dataset ds;
  ds.schema = toy_schema();
  rddg::Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    const double cx = cls == 0 ? -2.0 : 2.0;
    ds.rows.push_back(toy_row(rng.normal(cx, spread), rng.normal(cx, spread), cls));
  }
  return ds;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("rddg_test_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

}  // namespace testutil
