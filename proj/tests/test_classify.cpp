#include "doctest.h"
#include "oracles.hpp"
#include "rddg/classify.hpp"
#include "rddg/error.hpp"
#include "rddg/rng.hpp"
#include "test_util.hpp"

using namespace rddg;

TEST_CASE("classification metrics on hand confusion matrices") {
  const std::vector<std::string> classes = {"pos", "neg"};

  SUBCASE("perfect predictions give all ones") {
    const std::vector<int> y = {0, 1, 0, 1, 1};
    const auto m = classification_metrics(y, y, classes, 0);
    CHECK(m.macro_f1_weighted == 1.0);
    CHECK(m.balanced_accuracy == 1.0);
    CHECK(m.sensitivity == 1.0);
    CHECK(m.specificity == 1.0);
  }
  SUBCASE("binary TP=8 FN=2 TN=90 FP=10 gives 0.8 / 0.9 / 0.85") {
    std::vector<int> y_true, y_pred;
    auto add = [&](int t, int p, int n) {
      for (int i = 0; i < n; ++i) {
        y_true.push_back(t);
        y_pred.push_back(p);
      }
    };
    add(0, 0, 8);   // TP
    add(0, 1, 2);   // FN
    add(1, 1, 90);  // TN
    add(1, 0, 10);  // FP
    const auto m = classification_metrics(y_true, y_pred, classes, 0);
    CHECK(m.sensitivity == doctest::Approx(0.8));
    CHECK(m.specificity == doctest::Approx(0.9));
    CHECK(m.balanced_accuracy == doctest::Approx(0.85));
  }
  SUBCASE("weighted macro F1 is the support-weighted mean of one-vs-rest F1") {
    // three classes so per-class F1 of 0.8 (support 20) and 0.9 (support 80)
    // can coexist: the third class absorbs the errors
    std::vector<int> y_true, y_pred;
    auto add = [&](int t, int p, int n) {
      for (int i = 0; i < n; ++i) {
        y_true.push_back(t);
        y_pred.push_back(p);
      }
    };
    add(0, 0, 16);  // class 0: tp 16
    add(0, 2, 4);   //          fn 4 -> F1 with fp 4 below = 32/40 = 0.8
    add(1, 1, 72);  // class 1: tp 72
    add(1, 2, 8);   //          fn 8 -> F1 with fp 8 below = 144/160 = 0.9
    add(2, 0, 4);   // class 2 errors feed fp of classes 0 and 1
    add(2, 1, 8);
    const auto m = classification_metrics(y_true, y_pred, {"a", "b", "c"}, 0);
    // supports 20, 80, 12; F1s 0.8, 0.9, 0
    const double want = (0.8 * 20 + 0.9 * 80 + 0.0 * 12) / 112.0;
    CHECK(m.macro_f1_weighted == doctest::Approx(want).epsilon(1e-15));
    // the support-weighted mean itself, as in the worked example
    CHECK(0.8 * (20.0 / 100.0) + 0.9 * (80.0 / 100.0) == doctest::Approx(0.88));
  }
  SUBCASE("length mismatch and unknown labels are errors") {
    CHECK_THROWS_AS(classification_metrics({0, 1}, {0}, classes, 0), DataError);
    CHECK_THROWS_AS(classification_metrics({0, 2}, {0, 0}, classes, 0), DataError);
  }
}

TEST_CASE("metric invariants") {
  Rng rng(17);

  SUBCASE("balanced accuracy is invariant under class duplication") {
    std::vector<int> y_true, y_pred;
    for (int i = 0; i < 60; ++i) {
      y_true.push_back(rng.index(2));
      y_pred.push_back(rng.index(2));
    }
    const auto base = classification_metrics(y_true, y_pred, {"a", "b"}, 0);
    std::vector<int> dup_true = y_true, dup_pred = y_pred;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      if (y_true[i] == 1) {  // duplicate every class-1 sample
        dup_true.push_back(y_true[i]);
        dup_pred.push_back(y_pred[i]);
      }
    }
    const auto dup = classification_metrics(dup_true, dup_pred, {"a", "b"}, 0);
    CHECK(dup.balanced_accuracy == doctest::Approx(base.balanced_accuracy).epsilon(1e-15));
  }
  SUBCASE("binary balanced accuracy is the mean of sensitivity and specificity") {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> y_true, y_pred;
      for (int i = 0; i < 50; ++i) {
        y_true.push_back(rng.index(2));
        y_pred.push_back(rng.index(2));
      }
      if (std::count(y_true.begin(), y_true.end(), 0) == 0) continue;
      const auto m = classification_metrics(y_true, y_pred, {"a", "b"}, 0);
      CHECK(m.balanced_accuracy ==
            doctest::Approx((m.sensitivity + m.specificity) / 2.0).epsilon(1e-15));
    }
  }
  SUBCASE("constant predictor weighted F1 follows the support-weighted formula") {
    std::vector<int> y_true = {0, 0, 0, 1, 1, 1, 1, 1, 1, 1};
    std::vector<int> y_pred(10, 1);
    const auto m = classification_metrics(y_true, y_pred, {"a", "b"}, 0);
    // class a contributes 0; class b: precision 0.7, recall 1 -> F1 = 14/17
    CHECK(m.macro_f1_weighted == doctest::Approx((14.0 / 17.0) * 0.7));
  }
  SUBCASE("zero-support classes are defined as 0 and flagged") {
    // class c never occurs and is never predicted: recall and F1 are 0/0
    std::vector<int> y_true = {0, 0, 1, 1};
    std::vector<int> y_pred = {0, 1, 1, 1};
    const auto m = classification_metrics(y_true, y_pred, {"a", "b", "c"}, 0);
    CHECK(m.degenerate_classes == std::vector<std::string>{"c"});
    CHECK(m.balanced_accuracy == doctest::Approx((0.5 + 1.0 + 0.0) / 3.0));
  }
  SUBCASE("random multi-class instances match the recount oracle exactly") {
    for (int trial = 0; trial < 50; ++trial) {
      const int n_classes = 2 + rng.index(3);
      std::vector<int> y_true, y_pred;
      for (int i = 0; i < 20 + rng.index(100); ++i) {
        y_true.push_back(rng.index(n_classes));
        y_pred.push_back(rng.index(n_classes));
      }
      std::vector<std::string> classes;
      for (int c = 0; c < n_classes; ++c) classes.push_back(std::string(1, char('a' + c)));
      const int minority = rng.index(n_classes);
      const auto mine = classification_metrics(y_true, y_pred, classes, minority);
      const auto want = oracle::metrics(y_true, y_pred, n_classes, minority);
      CHECK(mine.macro_f1_weighted == doctest::Approx(want.macro_f1_weighted).epsilon(1e-15));
      CHECK(mine.balanced_accuracy == doctest::Approx(want.balanced_accuracy).epsilon(1e-15));
      CHECK(mine.sensitivity == doctest::Approx(want.sensitivity).epsilon(1e-15));
      CHECK(mine.specificity == doctest::Approx(want.specificity).epsilon(1e-15));
    }
  }
}

TEST_CASE("baseline classifiers") {
  const Dataset train = testutil::blobs(200, 5);

  SUBCASE("logistic separates the separable") {
    const auto model = train_baseline(train, ClassifierKind::logistic, 1);
    std::vector<int> y_true, y_pred;
    for (const auto& row : train.rows) {
      y_true.push_back(row.label);
      y_pred.push_back(model.predict(row));
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) hits += (y_true[i] == y_pred[i]);
    CHECK(static_cast<double>(hits) / y_true.size() > 0.95);
  }
  SUBCASE("knn with k=1 gets training points exactly right") {
    BaselineOptions opt;
    opt.knn_k = 1;
    const auto model = train_baseline(train, ClassifierKind::knn, 1, opt);
    for (const auto& row : train.rows) CHECK(model.predict(row) == row.label);
  }
  SUBCASE("same seed gives identical predictions") {
    const auto a = train_baseline(train, ClassifierKind::logistic, 9);
    const auto b = train_baseline(train, ClassifierKind::logistic, 9);
    const Dataset test = testutil::blobs(40, 77);
    CHECK(a.predict_all(test) == b.predict_all(test));
  }
  SUBCASE("single-class training set is rejected") {
    Dataset degenerate;
    degenerate.schema = train.schema;
    for (int i = 0; i < 10; ++i) degenerate.rows.push_back(testutil::toy_row(i, i, 0));
    CHECK_THROWS_AS(train_baseline(degenerate, ClassifierKind::logistic, 0), DataError);
  }
  SUBCASE("knn requires k below the training size") {
    BaselineOptions opt;
    opt.knn_k = 10;
    Dataset tiny;
    tiny.schema = train.schema;
    for (int i = 0; i < 6; ++i) tiny.rows.push_back(testutil::toy_row(i, i, i % 2));
    CHECK_THROWS_AS(train_baseline(tiny, ClassifierKind::knn, 0, opt), ConfigError);
  }
}

TEST_CASE("evaluate_augmentation") {
  const Dataset train = testutil::blobs(120, 3);
  const Dataset test = testutil::blobs(60, 99);

  SUBCASE("empty synthetic set makes both conditions identical") {
    Dataset empty;
    empty.schema = train.schema;
    const auto table = evaluate_augmentation(train, empty, test, {ClassifierKind::logistic},
                                             {1, 2, 3});
    REQUIRE(table.conditions.size() == 2);
    const auto& orig = table.conditions[0];
    const auto& aug = table.conditions[1];
    CHECK(orig.macro_f1_weighted.mean == doctest::Approx(aug.macro_f1_weighted.mean));
    CHECK(orig.sensitivity.mean == doctest::Approx(aug.sensitivity.mean));
    CHECK(orig.balanced_accuracy.stddev == doctest::Approx(aug.balanced_accuracy.stddev));
  }
  SUBCASE("table renders json and the published text layout") {
    Dataset synth = testutil::blobs(30, 4);
    const auto table = evaluate_augmentation(train, synth, test,
                                             {ClassifierKind::logistic, ClassifierKind::knn},
                                             {1, 2});
    const std::string text = table.to_text();
    CHECK(text.find("Macro-F1") != std::string::npos);
    CHECK(text.find("BAL ACC") != std::string::npos);
    CHECK(text.find("original") != std::string::npos);
    CHECK(text.find("augmented") != std::string::npos);
    CHECK(text.find("+-") != std::string::npos);
    CHECK(table.to_json().find("sensitivity") != std::string::npos);
  }
  SUBCASE("schema mismatch is an error") {
    Dataset other = testutil::blobs(10, 1);
    other.schema.attributes[0].name = "zz";
    CHECK_THROWS_AS(
        evaluate_augmentation(train, other, test, {ClassifierKind::logistic}, {1}), DataError);
  }
}

TEST_CASE("minority_class_of picks the smallest support") {
  Dataset ds;
  ds.schema = testutil::toy_schema();
  for (int i = 0; i < 10; ++i) ds.rows.push_back(testutil::toy_row(i, i, 0));
  for (int i = 0; i < 3; ++i) ds.rows.push_back(testutil::toy_row(i, i, 1));
  CHECK(minority_class_of(ds) == 1);
}
