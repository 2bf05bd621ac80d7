#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rddg/encoding.hpp"
#include "rddg/tabular.hpp"

namespace rddg {

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

  static ConfusionMatrix from_predictions(const std::vector<int>& y_true,
                                          const std::vector<int>& y_pred,
                                          const std::vector<std::string>& classes);

  std::size_t total() const;
  std::size_t support(std::size_t cls) const;   // row sum
  std::size_t predicted(std::size_t cls) const; // column sum
};

/// The four headline metrics. Sensitivity is the recall of the minority
/// class; specificity is the recall of the majority class in binary tasks
/// and the mean recall over non-minority classes otherwise. Zero-denominator
/// recall/F1 terms are defined as 0 and flagged rather than dropped, so
/// support weights always sum to the total.
struct ClassificationMetrics {
  double macro_f1_weighted = 0.0;
  double balanced_accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  std::vector<std::string> degenerate_classes;  // classes with a 0/0 recall or F1
};

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm, int minority_class);

ClassificationMetrics classification_metrics(const std::vector<int>& y_true,
                                             const std::vector<int>& y_pred,
                                             const std::vector<std::string>& classes,
                                             int minority_class);

enum class ClassifierKind { logistic, knn };

ClassifierKind parse_classifier_kind(const std::string& name);
std::string classifier_kind_string(ClassifierKind kind);

/// Multinomial logistic regression on the shared feature encoding, trained
/// full-batch with inverse-class-frequency sample weights. Seed only moves
/// the tiny random init, so runs are deterministic per seed.
struct LogisticModel {
  FeatureEncoder encoder;
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> bias;                  // [class]

  int predict(const Row& row) const;
};

struct KnnModel {
  FeatureEncoder encoder;
  std::vector<std::vector<double>> points;
  std::vector<int> labels;
  int k = 5;

  int predict(const Row& row) const;
};

struct BaselineModel {
  ClassifierKind kind = ClassifierKind::logistic;
  LogisticModel logistic;
  KnnModel knn;

  int predict(const Row& row) const;
  std::vector<int> predict_all(const Dataset& ds) const;
};

struct BaselineOptions {
  int logistic_iterations = 60;  // SGD epochs
  double logistic_learning_rate = 0.3;
  double logistic_l2 = 1e-4;
  int knn_k = 5;
};

BaselineModel train_baseline(const Dataset& train, ClassifierKind kind, std::uint64_t seed,
                             const BaselineOptions& options = {});

/// Mean and std over (kind, seed) pairs for one training condition.
struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct MetricTable {
  struct ConditionRow {
    std::string condition;  // "original" or "augmented"
    MetricSummary macro_f1_weighted;
    MetricSummary balanced_accuracy;
    MetricSummary sensitivity;
    MetricSummary specificity;
    std::vector<ClassificationMetrics> runs;  // one per (kind, seed)
  };
  std::vector<ConditionRow> conditions;
  std::string minority_class;

  std::string to_json() const;
  std::string to_text() const;  // aligned table, values x100
};

/// Trains on real data alone ("original") and on real + synthetic
/// ("augmented"), evaluates both on the held-out test set, and aggregates
/// over the classifier kinds x seeds grid.
MetricTable evaluate_augmentation(const Dataset& real_train, const Dataset& synth,
                                  const Dataset& test, const std::vector<ClassifierKind>& kinds,
                                  const std::vector<std::uint64_t>& seeds,
                                  int minority_class = -1,  // -1: smallest support in real_train
                                  const BaselineOptions& options = {});

/// Smallest-support class in ds (ties break by class order).
int minority_class_of(const Dataset& ds);

}  // namespace rddg
