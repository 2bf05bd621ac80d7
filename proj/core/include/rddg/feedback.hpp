#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rddg/tabular.hpp"

namespace rddg {

/// Per-batch quality signature along the three guidance dimensions:
/// statistical consistency (mean/std), correlation preservation (Pearson)
/// and distribution consistency (two-sample KS). Mean/std diffs are taken
/// on the standardized scale given by the run's StandardizationParams.
struct BatchQuality {
  struct AttributeStat {
    std::string attribute;
    double mean_diff = 0.0;  // |mean(synth) - mean(ref)|, standardized
    double std_diff = 0.0;   // |std(synth) - std(ref)|, standardized
    double ks = 0.0;         // two-sample KS statistic
  };
  struct PairDiff {
    std::string a;
    std::string b;
    double diff = 0.0;  // |pearson(synth) - pearson(ref)|
  };

  std::vector<AttributeStat> attributes;  // numeric attributes, schema order
  bool correlation_available = false;     // needs >= 2 rows on both sides
  double correlation_max_diff = 0.0;
  std::vector<PairDiff> correlation_pairs;  // sorted by diff descending
  bool empty_batch = false;                 // set when no synthetic rows parsed

  double max_mean_diff() const;
  double max_std_diff() const;
  double max_ks() const;

  std::string to_json() const;
  static BatchQuality from_json(const std::string& json_text);
};

/// Gate levels for the four feedback conditions. The comparisons are
/// strict: a directive fires only when the statistic exceeds the threshold.
struct Thresholds {
  double mean = 0.10;
  double stddev = 0.15;
  double correlation = 0.15;
  double ks = 0.10;

  void validate() const;  // all must be >= 0
};

/// Raw-scale targets embedded in directives, taken from the reference rows
/// the next generation prompt will carry.
struct FeedbackTargets {
  struct Target {
    std::string attribute;
    double mean = 0.0;
    double stddev = 0.0;
  };
  std::vector<Target> targets;

  static FeedbackTargets from_batch(const Dataset& reference);
  const Target* find(const std::string& attribute) const;
};

enum class DirectiveKind { adjust_mean, maintain_variance, strengthen_correlation, align_distribution };

struct Directive {
  DirectiveKind kind;
  // adjust_mean / maintain_variance / align_distribution: per-attribute payload
  std::vector<std::pair<std::string, double>> attribute_values;
  // strengthen_correlation: offending pairs, worst first, capped at 5
  std::vector<std::pair<std::string, std::string>> pairs;
};

/// The feedback payload threaded into the next generation prompt. Rendering
/// is deterministic and starts with the quality-evaluation-report block.
struct FeedbackReport {
  std::vector<Directive> directives;
  std::string rendered;

  bool empty() const { return directives.empty(); }

  std::string to_json() const;
  static FeedbackReport from_json(const std::string& json_text);
};

/// Exact two-sample Kolmogorov-Smirnov statistic: sup |ECDF_a - ECDF_b|.
double ks_statistic(const std::vector<double>& a, const std::vector<double>& b);

/// Quality of a synthetic batch against its reference batch.
BatchQuality evaluate_batch(const Dataset& synth, const Dataset& reference,
                            const StandardizationParams& params);

/// Threshold-gated feedback: exactly the directives whose conditions fire,
/// in order mean, variance, correlation, distribution. Empty report when
/// nothing fires.
FeedbackReport create_feedback(const BatchQuality& quality, const Thresholds& thresholds,
                               const FeedbackTargets& targets);

/// Parses directive lines back out of rendered feedback text. Used by the
/// mock gateway; exposed so the encode/parse identity is testable.
std::vector<Directive> parse_directives(const std::string& rendered_feedback);

extern const char* const kFeedbackReportHeader;

}  // namespace rddg
