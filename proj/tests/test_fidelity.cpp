#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rddg/error.hpp"
#include "rddg/fidelity.hpp"
#include "rddg/rng.hpp"
#include "test_util.hpp"

using namespace rddg;

namespace {

Dataset numeric_dataset(const std::vector<std::vector<double>>& columns, std::uint64_t label_seed) {
  Schema s;
  for (std::size_t c = 0; c < columns.size(); ++c)
    s.attributes.push_back({"n" + std::to_string(c), AttributeKind::numeric, "col", {}});
  s.attributes.push_back({"cls", AttributeKind::categorical, "class", {"a", "b"}});
  s.label = "cls";
  s.classes = {"a", "b"};
  Dataset ds;
  ds.schema = s;
  Rng rng(label_seed);
  for (std::size_t i = 0; i < columns[0].size(); ++i) {
    Row row;
    for (const auto& col : columns) row.cells.emplace_back(col[i]);
    const int cls = rng.index(2);
    row.cells.emplace_back(std::string(cls == 0 ? "a" : "b"));
    row.label = cls;
    ds.rows.push_back(row);
  }
  return ds;
}

}  // namespace

TEST_CASE("binned KL divergence") {
  SUBCASE("identical columns give zero") {
    std::vector<double> col;
    Rng rng(5);
    for (int i = 0; i < 500; ++i) col.push_back(rng.normal());
    CHECK(kl_divergence_binned(col, col, 50) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("two-bin hand value: 0.5 ln2 + 0.5 ln(2/3)") {
    const std::vector<double> real = {0.0, 0.0, 1.0, 1.0};    // P = [0.5, 0.5]
    const std::vector<double> synth = {0.0, 1.0, 1.0, 1.0};   // Q = [0.25, 0.75]
    CHECK(kl_divergence_binned(real, synth, 2) ==
          doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-4));
  }
  SUBCASE("disjoint synthetic support stays finite thanks to smoothing") {
    const std::vector<double> real = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> synth = {0.1, 0.1, 0.1, 0.1};
    const double kl = kl_divergence_binned(real, synth, 4);
    CHECK(std::isfinite(kl));
    CHECK(kl > 5.0);
  }
  SUBCASE("out-of-range synthetic values clip into boundary bins") {
    const std::vector<double> real = {0.0, 1.0};
    const std::vector<double> synth = {-100.0, 100.0};
    CHECK(std::isfinite(kl_divergence_binned(real, synth, 2)));
  }
  SUBCASE("non-negative on random inputs") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> a, b;
      for (int i = 0; i < 60; ++i) a.push_back(rng.normal(0, 1));
      for (int i = 0; i < 40; ++i) b.push_back(rng.normal(0.5, 2));
      CHECK(kl_divergence_binned(a, b, 10) >= 0.0);
    }
  }
  SUBCASE("histogram masses each sum to one") {
    Rng rng(2);
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) a.push_back(rng.normal());
    for (int i = 0; i < 100; ++i) b.push_back(rng.normal(1, 2));
    const Histogram h = build_histogram(a, b, 50);
    double pa = 0, pb = 0;
    for (double v : h.real_mass) pa += v;
    for (double v : h.synth_mass) pb += v;
    CHECK(pa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pb == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("empty column is an error") {
    CHECK_THROWS_AS(kl_divergence_binned({}, {1.0}, 2), DataError);
  }
}

TEST_CASE("dataset_kl is the unweighted mean of per-attribute KL") {
  Rng rng(4);
  std::vector<double> c0, c1, d0, d1;
  for (int i = 0; i < 300; ++i) {
    c0.push_back(rng.normal(0, 1));
    c1.push_back(rng.normal(5, 2));
    d0.push_back(rng.normal(0.3, 1));
    d1.push_back(rng.normal(5, 3));
  }
  const Dataset real = numeric_dataset({c0, c1}, 1);
  const Dataset synth = numeric_dataset({d0, d1}, 1);

  const double k0 = kl_divergence_binned(c0, d0, 50);
  const double k1 = kl_divergence_binned(c1, d1, 50);
  CHECK(dataset_kl(real, synth, 50) == doctest::Approx((k0 + k1) / 2.0).epsilon(1e-12));

  SUBCASE("identical datasets give zero") {
    CHECK(dataset_kl(real, real, 50) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("correlation matrix") {
  SUBCASE("exact affine dependence gives pearson 1") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
      x.push_back(i);
      y.push_back(2.0 * i + 1.0);
    }
    const Dataset ds = numeric_dataset({x, y}, 3);
    const auto m = correlation_matrix(ds);
    CHECK(m.values[0][1] == doctest::Approx(1.0));
  }
  SUBCASE("independent noise columns decorrelate at n=10000") {
    Rng rng(123);
    std::vector<double> x, y;
    for (int i = 0; i < 10000; ++i) {
      x.push_back(rng.normal());
      y.push_back(rng.normal());
    }
    const Dataset ds = numeric_dataset({x, y}, 3);
    CHECK(std::fabs(correlation_matrix(ds).values[0][1]) < 0.05);
  }
  SUBCASE("constant columns are flagged with zero correlations, unit diagonal") {
    std::vector<double> x(20, 5.0), y;
    for (int i = 0; i < 20; ++i) y.push_back(i);
    const Dataset ds = numeric_dataset({x, y}, 3);
    const auto m = correlation_matrix(ds);
    CHECK(m.values[0][1] == 0.0);
    CHECK(m.values[0][0] == 1.0);
    CHECK(m.degenerate_columns == std::vector<std::string>{"n0"});
  }
  SUBCASE("fewer than two rows is an error") {
    const Dataset ds = numeric_dataset({{1.0}, {2.0}}, 3);
    CHECK_THROWS_AS(correlation_matrix(ds), DataError);
  }
}

TEST_CASE("correlation diff metrics") {
  SUBCASE("identical datasets give all-zero metrics") {
    Rng rng(8);
    std::vector<double> x, y, z;
    for (int i = 0; i < 100; ++i) {
      x.push_back(rng.normal());
      y.push_back(rng.normal() + 0.5 * x.back());
      z.push_back(rng.normal());
    }
    const Dataset ds = numeric_dataset({x, y, z}, 2);
    const auto diff = correlation_diff_metrics(ds, ds);
    CHECK(diff.frobenius == 0.0);
    CHECK(diff.mae == 0.0);
    CHECK(diff.rmse == 0.0);
    CHECK(diff.max_diff == 0.0);
  }
  SUBCASE("n=2 hand values for off-diagonal diff 0.3") {
    const std::vector<std::vector<double>> real = {{1.0, 0.9}, {0.9, 1.0}};
    const std::vector<std::vector<double>> synth = {{1.0, 0.6}, {0.6, 1.0}};
    const auto diff = correlation_diff_from_matrices({"a", "b"}, real, synth);
    CHECK(diff.frobenius == doctest::Approx(std::sqrt(0.18)).epsilon(1e-6));
    CHECK(diff.mae == doctest::Approx(0.15).epsilon(1e-6));
    CHECK(diff.rmse == doctest::Approx(std::sqrt(0.045)).epsilon(1e-6));
    CHECK(diff.max_diff == doctest::Approx(0.3).epsilon(1e-6));
  }
  SUBCASE("ordering invariants: rmse = frobenius/n, mae <= rmse <= max_diff") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<std::vector<double>> cols_a(4), cols_b(4);
      for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < 50; ++i) {
          cols_a[c].push_back(rng.normal() + (c > 0 ? 0.4 * cols_a[0][i] : 0.0));
          cols_b[c].push_back(rng.normal());
        }
      }
      const auto diff = correlation_diff_metrics(numeric_dataset(cols_a, 1),
                                                 numeric_dataset(cols_b, 1));
      CHECK(diff.rmse == doctest::Approx(diff.frobenius / 4.0).epsilon(1e-12));
      CHECK(diff.mae <= diff.rmse + 1e-12);
      CHECK(diff.rmse <= diff.max_diff + 1e-12);
    }
  }
  SUBCASE("permuting attributes leaves summary metrics unchanged") {
    Rng rng(5);
    std::vector<std::vector<double>> a(3), b(3);
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < 80; ++i) {
        a[c].push_back(rng.normal() + 0.3 * c * (c > 0 ? a[0][i] : 0.0));
        b[c].push_back(rng.normal());
      }
    const auto d1 = correlation_diff_metrics(numeric_dataset(a, 1), numeric_dataset(b, 1));
    const auto d2 = correlation_diff_metrics(numeric_dataset({a[2], a[0], a[1]}, 1),
                                             numeric_dataset({b[2], b[0], b[1]}, 1));
    CHECK(d1.frobenius == doctest::Approx(d2.frobenius).epsilon(1e-12));
    CHECK(d1.mae == doctest::Approx(d2.mae).epsilon(1e-12));
    CHECK(d1.rmse == doctest::Approx(d2.rmse).epsilon(1e-12));
    CHECK(d1.max_diff == doctest::Approx(d2.max_diff).epsilon(1e-12));
  }
}

TEST_CASE("fidelity metrics agree with the naive oracles on random data") {
  Rng rng(31337);
  for (int trial = 0; trial < 30; ++trial) {
    const int n_cols = 2 + rng.index(4);
    const int n_rows = 20 + rng.index(200);
    std::vector<std::vector<double>> a(n_cols), b(n_cols);
    for (int c = 0; c < n_cols; ++c) {
      for (int i = 0; i < n_rows; ++i) {
        a[c].push_back(rng.normal(0, 1 + c));
        b[c].push_back(rng.normal(0.2, 1.5));
      }
    }
    const Dataset real = numeric_dataset(a, 1);
    const Dataset synth = numeric_dataset(b, 1);

    for (int c = 0; c < n_cols; ++c)
      CHECK(kl_divergence_binned(a[c], b[c], 20) ==
            doctest::Approx(oracle::kl_binned(a[c], b[c], 20)).epsilon(1e-10));

    const auto mine = correlation_diff_metrics(real, synth);
    std::vector<std::vector<double>> ra(n_cols, std::vector<double>(n_cols, 1.0));
    std::vector<std::vector<double>> rb = ra;
    for (int i = 0; i < n_cols; ++i)
      for (int j = 0; j < n_cols; ++j) {
        ra[i][j] = i == j ? 1.0 : oracle::pearson(a[i], a[j]);
        rb[i][j] = i == j ? 1.0 : oracle::pearson(b[i], b[j]);
      }
    const auto want = oracle::corr_summary(ra, rb);
    CHECK(mine.frobenius == doctest::Approx(want.frobenius).epsilon(1e-10));
    CHECK(mine.mae == doctest::Approx(want.mae).epsilon(1e-10));
    CHECK(mine.rmse == doctest::Approx(want.rmse).epsilon(1e-10));
    CHECK(mine.max_diff == doctest::Approx(want.max_diff).epsilon(1e-10));
  }
}

TEST_CASE("fidelity report renders json and text") {
  Rng rng(1);
  std::vector<double> x, y;
  for (int i = 0; i < 100; ++i) {
    x.push_back(rng.normal());
    y.push_back(rng.normal() + x.back());
  }
  const Dataset real = numeric_dataset({x, y}, 1);
  const auto report = fidelity_report(real, real, 20);
  const std::string json = fidelity_report_json(report);
  CHECK(json.find("\"mean\"") != std::string::npos);
  const std::string text = fidelity_report_text(report);
  CHECK(text.find("Frobenius") != std::string::npos);
  CHECK(text.find("KL") != std::string::npos);
}
