#include "rddg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/rng.hpp"
#include "rddg/text.hpp"

namespace rddg {

ConfusionMatrix ConfusionMatrix::from_predictions(const std::vector<int>& y_true,
                                                  const std::vector<int>& y_pred,
                                                  const std::vector<std::string>& classes) {
  if (y_true.size() != y_pred.size())
    throw DataError("confusion matrix: label vectors differ in length");
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || t >= static_cast<int>(classes.size()) || p < 0 ||
        p >= static_cast<int>(classes.size()))
      throw DataError("confusion matrix: label out of range at sample " + std::to_string(i));
    ++cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return cm;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::size_t ConfusionMatrix::support(std::size_t cls) const {
  return std::accumulate(counts[cls].begin(), counts[cls].end(), std::size_t{0});
}

std::size_t ConfusionMatrix::predicted(std::size_t cls) const {
  std::size_t n = 0;
  for (const auto& row : counts) n += row[cls];
  return n;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm, int minority_class) {
  const std::size_t c = cm.classes.size();
  if (c < 2) throw DataError("classification metrics need >= 2 classes");
  if (minority_class < 0 || minority_class >= static_cast<int>(c))
    throw DataError("minority class index out of range");

  ClassificationMetrics m;
  std::vector<double> recall(c, 0.0), f1(c, 0.0);
  std::vector<std::size_t> support(c, 0);
  for (std::size_t k = 0; k < c; ++k) {
    support[k] = cm.support(k);
    const double tp = static_cast<double>(cm.counts[k][k]);
    const double fn = static_cast<double>(support[k]) - tp;
    const double fp = static_cast<double>(cm.predicted(k)) - tp;
    bool degenerate = false;
    if (support[k] == 0) {
      recall[k] = 0.0;  // defined as 0 with a flag, never dropped
      degenerate = true;
    } else {
      recall[k] = tp / (tp + fn);
    }
    const double denom = 2.0 * tp + fp + fn;
    if (denom == 0.0) {
      f1[k] = 0.0;
      degenerate = true;
    } else {
      f1[k] = 2.0 * tp / denom;
    }
    if (degenerate) m.degenerate_classes.push_back(cm.classes[k]);
  }

  const double total = static_cast<double>(cm.total());
  double weighted_f1 = 0.0;
  for (std::size_t k = 0; k < c; ++k)
    weighted_f1 += f1[k] * (total > 0 ? static_cast<double>(support[k]) / total : 0.0);
  m.macro_f1_weighted = weighted_f1;

  m.balanced_accuracy =
      std::accumulate(recall.begin(), recall.end(), 0.0) / static_cast<double>(c);
  m.sensitivity = recall[static_cast<std::size_t>(minority_class)];

  double spec_sum = 0.0;
  std::size_t spec_count = 0;
  for (std::size_t k = 0; k < c; ++k) {
    if (k == static_cast<std::size_t>(minority_class)) continue;
    spec_sum += recall[k];
    ++spec_count;
  }
  m.specificity = spec_count > 0 ? spec_sum / static_cast<double>(spec_count) : 0.0;
  return m;
}

ClassificationMetrics classification_metrics(const std::vector<int>& y_true,
                                             const std::vector<int>& y_pred,
                                             const std::vector<std::string>& classes,
                                             int minority_class) {
  return classification_metrics(ConfusionMatrix::from_predictions(y_true, y_pred, classes),
                                minority_class);
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "logistic") return ClassifierKind::logistic;
  if (name == "knn") return ClassifierKind::knn;
  throw ConfigError("unknown classifier kind: " + name + " (expected logistic or knn)");
}

std::string classifier_kind_string(ClassifierKind kind) {
  return kind == ClassifierKind::logistic ? "logistic" : "knn";
}

namespace {

std::vector<double> softmax(const std::vector<double>& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

LogisticModel train_logistic(const Dataset& train, std::uint64_t seed,
                             const BaselineOptions& options) {
  LogisticModel model;
  model.encoder = FeatureEncoder::fit(train);
  const auto X = model.encoder.encode_all(train);
  const std::size_t n = X.size();
  const std::size_t d = model.encoder.dimension();
  const std::size_t c = train.schema.n_classes();

  std::vector<std::size_t> class_count(c, 0);
  for (const auto& row : train.rows) ++class_count[static_cast<std::size_t>(row.label)];
  for (std::size_t k = 0; k < c; ++k)
    if (class_count[k] == 0)
      throw DataError("logistic baseline: class has no training rows: " + train.schema.classes[k]);

  // inverse-class-frequency sample weights, normalized to mean 1
  std::vector<double> sample_weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cls = static_cast<std::size_t>(train.rows[i].label);
    sample_weight[i] = static_cast<double>(n) /
                       (static_cast<double>(c) * static_cast<double>(class_count[cls]));
  }

  Rng init_rng(Rng::derive(seed, 97));
  model.weights.assign(c, std::vector<double>(d, 0.0));
  model.bias.assign(c, 0.0);
  for (auto& wk : model.weights)
    for (double& w : wk) w = 0.01 * init_rng.normal();

  // mini-batch SGD; the per-epoch shuffle is what makes seeds matter. The
  // returned weights are the tail average over the last quarter of epochs,
  // which damps the endpoint noise without hiding the seed dependence.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = 32;
  std::vector<std::vector<double>> avg_w(c, std::vector<double>(d, 0.0));
  std::vector<double> avg_b(c, 0.0);
  long averaged = 0;
  const int tail_start = options.logistic_iterations - options.logistic_iterations / 4;
  for (int epoch = 0; epoch < options.logistic_iterations; ++epoch) {
    Rng rng(Rng::derive(seed, 7000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::vector<std::vector<double>> grad_w(c, std::vector<double>(d, 0.0));
      std::vector<double> grad_b(c, 0.0);
      for (std::size_t ii = start; ii < end; ++ii) {
        const std::size_t i = order[ii];
        std::vector<double> z(c, 0.0);
        for (std::size_t k = 0; k < c; ++k) {
          double acc = model.bias[k];
          const auto& wk = model.weights[k];
          for (std::size_t j = 0; j < d; ++j) acc += wk[j] * X[i][j];
          z[k] = acc;
        }
        const auto p = softmax(z);
        const auto y = static_cast<std::size_t>(train.rows[i].label);
        for (std::size_t k = 0; k < c; ++k) {
          const double delta = sample_weight[i] * (p[k] - (k == y ? 1.0 : 0.0));
          grad_b[k] += delta;
          for (std::size_t j = 0; j < d; ++j) grad_w[k][j] += delta * X[i][j];
        }
      }
      const double scale = options.logistic_learning_rate / static_cast<double>(end - start);
      for (std::size_t k = 0; k < c; ++k) {
        model.bias[k] -= scale * grad_b[k];
        for (std::size_t j = 0; j < d; ++j)
          model.weights[k][j] -= scale * (grad_w[k][j] + options.logistic_l2 *
                                                             model.weights[k][j] *
                                                             static_cast<double>(end - start));
      }
    }
    if (epoch >= tail_start) {
      for (std::size_t k = 0; k < c; ++k) {
        avg_b[k] += model.bias[k];
        for (std::size_t j = 0; j < d; ++j) avg_w[k][j] += model.weights[k][j];
      }
      ++averaged;
    }
  }
  if (averaged > 0) {
    for (std::size_t k = 0; k < c; ++k) {
      model.bias[k] = avg_b[k] / static_cast<double>(averaged);
      for (std::size_t j = 0; j < d; ++j)
        model.weights[k][j] = avg_w[k][j] / static_cast<double>(averaged);
    }
  }
  return model;
}

}  // namespace

int LogisticModel::predict(const Row& row) const {
  const auto x = encoder.encode(row);
  int best = 0;
  double best_z = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    double z = bias[k];
    for (std::size_t j = 0; j < x.size(); ++j) z += weights[k][j] * x[j];
    if (z > best_z) {
      best_z = z;
      best = static_cast<int>(k);
    }
  }
  return best;
}

int KnnModel::predict(const Row& row) const {
  const auto x = encoder.encode(row);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - points[i][j];
      d2 += diff * diff;
    }
    dist.emplace_back(d2, i);
  }
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
  std::vector<std::size_t> votes;
  for (std::size_t i = 0; i < kk; ++i) {
    const auto lbl = static_cast<std::size_t>(labels[dist[i].second]);
    if (lbl >= votes.size()) votes.resize(lbl + 1, 0);
    ++votes[lbl];
  }
  int best = 0;
  std::size_t best_votes = 0;
  for (std::size_t lbl = 0; lbl < votes.size(); ++lbl) {
    if (votes[lbl] > best_votes) {  // ties break toward the lower class index
      best_votes = votes[lbl];
      best = static_cast<int>(lbl);
    }
  }
  return best;
}

int BaselineModel::predict(const Row& row) const {
  return kind == ClassifierKind::logistic ? logistic.predict(row) : knn.predict(row);
}

std::vector<int> BaselineModel::predict_all(const Dataset& ds) const {
  std::vector<int> out;
  out.reserve(ds.rows.size());
  for (const auto& row : ds.rows) out.push_back(predict(row));
  return out;
}

BaselineModel train_baseline(const Dataset& train, ClassifierKind kind, std::uint64_t seed,
                             const BaselineOptions& options) {
  if (train.rows.empty()) throw DataError("baseline training set is empty");
  std::vector<bool> seen(train.schema.n_classes(), false);
  for (const auto& row : train.rows) seen[static_cast<std::size_t>(row.label)] = true;
  if (std::count(seen.begin(), seen.end(), true) < 2)
    throw DataError("baseline training set has a single class");

  BaselineModel model;
  model.kind = kind;
  if (kind == ClassifierKind::logistic) {
    model.logistic = train_logistic(train, seed, options);
  } else {
    if (options.knn_k >= static_cast<int>(train.rows.size()))
      throw ConfigError("knn needs k < |train|");
    model.knn.encoder = FeatureEncoder::fit(train);
    model.knn.points = model.knn.encoder.encode_all(train);
    model.knn.k = options.knn_k;
    for (const auto& row : train.rows) model.knn.labels.push_back(row.label);
  }
  return model;
}

int minority_class_of(const Dataset& ds) {
  std::vector<std::size_t> counts(ds.schema.n_classes(), 0);
  for (const auto& row : ds.rows) ++counts[static_cast<std::size_t>(row.label)];
  return static_cast<int>(std::min_element(counts.begin(), counts.end()) - counts.begin());
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

MetricTable::ConditionRow evaluate_condition(const std::string& name, const Dataset& train,
                                             const Dataset& test,
                                             const std::vector<ClassifierKind>& kinds,
                                             const std::vector<std::uint64_t>& seeds,
                                             int minority_class, const BaselineOptions& options) {
  MetricTable::ConditionRow row;
  row.condition = name;
  std::vector<double> f1, bal, sens, spec;
  std::vector<int> y_true;
  for (const auto& r : test.rows) y_true.push_back(r.label);
  for (auto kind : kinds) {
    for (auto seed : seeds) {
      const auto model = train_baseline(train, kind, seed, options);
      const auto metrics = classification_metrics(y_true, model.predict_all(test),
                                                  test.schema.classes, minority_class);
      row.runs.push_back(metrics);
      f1.push_back(metrics.macro_f1_weighted);
      bal.push_back(metrics.balanced_accuracy);
      sens.push_back(metrics.sensitivity);
      spec.push_back(metrics.specificity);
    }
  }
  row.macro_f1_weighted = summarize(f1);
  row.balanced_accuracy = summarize(bal);
  row.sensitivity = summarize(sens);
  row.specificity = summarize(spec);
  return row;
}

}  // namespace

MetricTable evaluate_augmentation(const Dataset& real_train, const Dataset& synth,
                                  const Dataset& test, const std::vector<ClassifierKind>& kinds,
                                  const std::vector<std::uint64_t>& seeds, int minority_class,
                                  const BaselineOptions& options) {
  if (real_train.schema != test.schema ||
      (!synth.rows.empty() && synth.schema != real_train.schema))
    throw DataError("evaluate_augmentation: schemas differ");
  if (kinds.empty() || seeds.empty())
    throw ConfigError("evaluate_augmentation needs at least one kind and one seed");

  if (minority_class < 0) minority_class = minority_class_of(real_train);

  Dataset augmented = real_train;
  augmented.rows.insert(augmented.rows.end(), synth.rows.begin(), synth.rows.end());

  MetricTable table;
  table.minority_class = real_train.schema.classes[static_cast<std::size_t>(minority_class)];
  table.conditions.push_back(evaluate_condition("original", real_train, test, kinds, seeds,
                                                minority_class, options));
  table.conditions.push_back(evaluate_condition("augmented", augmented, test, kinds, seeds,
                                                minority_class, options));
  return table;
}

std::string MetricTable::to_json() const {
  nlohmann::json j;
  j["minority_class"] = minority_class;
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : conditions) {
    nlohmann::json cj;
    cj["condition"] = c.condition;
    auto put = [&](const char* name, const MetricSummary& s) {
      cj[name] = {{"mean", s.mean}, {"stddev", s.stddev}};
    };
    put("macro_f1_weighted", c.macro_f1_weighted);
    put("balanced_accuracy", c.balanced_accuracy);
    put("sensitivity", c.sensitivity);
    put("specificity", c.specificity);
    cj["runs"] = nlohmann::json::array();
    for (const auto& r : c.runs)
      cj["runs"].push_back({{"macro_f1_weighted", r.macro_f1_weighted},
                            {"balanced_accuracy", r.balanced_accuracy},
                            {"sensitivity", r.sensitivity},
                            {"specificity", r.specificity}});
    j["conditions"].push_back(cj);
  }
  return j.dump(2) + "\n";
}

std::string MetricTable::to_text() const {
  auto fmt = [](const MetricSummary& s) {
    return text::format_fixed(100.0 * s.mean, 2) + "+-" + text::format_fixed(100.0 * s.stddev, 2);
  };
  std::ostringstream out;
  out << "Condition    Macro-F1       BAL ACC        Sensitivity    Specificity\n";
  for (const auto& c : conditions) {
    out << c.condition;
    for (std::size_t i = c.condition.size(); i < 13; ++i) out << ' ';
    out << fmt(c.macro_f1_weighted) << "    " << fmt(c.balanced_accuracy) << "    "
        << fmt(c.sensitivity) << "    " << fmt(c.specificity) << "\n";
  }
  out << "(values x100; minority class: " << minority_class
      << "; specificity over non-minority classes)\n";
  return out.str();
}

}  // namespace rddg
