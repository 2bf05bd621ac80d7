#pragma once

#include <string>
#include <vector>

#include "rddg/tabular.hpp"

namespace rddg {

/// Equal-width histogram pair over the real column's range. Both mass
/// vectors are epsilon-smoothed and renormalized, so each sums to 1.
struct Histogram {
  std::vector<double> edges;  // k+1 edges
  std::vector<double> real_mass;
  std::vector<double> synth_mass;
};

/// Pearson matrices for real and synthetic data plus the four summary
/// metrics of the absolute difference matrix. Sums run over all n^2 entries
/// including the diagonal, and rmse == frobenius / n by construction.
struct CorrelationDiff {
  std::vector<std::string> attributes;
  std::vector<std::vector<double>> real_matrix;
  std::vector<std::vector<double>> synth_matrix;
  std::vector<std::vector<double>> abs_diff;
  double frobenius = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double max_diff = 0.0;
};

struct FidelityReport {
  std::vector<std::pair<std::string, double>> kl_per_attribute;
  double kl_mean = 0.0;  // macro mean over numeric attributes, natural log
  int kl_bins = 50;
  CorrelationDiff correlation;
};

/// Binned KL divergence D(P||Q) in nats. Bins are equal width over the real
/// column's range; synthetic values outside it clip into the boundary bins;
/// both histograms get 1e-10 additive smoothing before normalization.
double kl_divergence_binned(const std::vector<double>& real_col,
                            const std::vector<double>& synth_col, int bins);

Histogram build_histogram(const std::vector<double>& real_col,
                          const std::vector<double>& synth_col, int bins);

/// Macro mean of per-attribute binned KL over all numeric attributes.
double dataset_kl(const Dataset& real, const Dataset& synth, int bins = 50);

/// Pearson correlation matrix over numeric attributes. Zero-variance
/// columns keep a unit diagonal but correlate 0 with everything else and
/// are reported in degenerate_columns; NaN never propagates.
struct CorrelationMatrix {
  std::vector<std::string> attributes;
  std::vector<std::vector<double>> values;
  std::vector<std::string> degenerate_columns;
};

CorrelationMatrix correlation_matrix(const Dataset& ds);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

CorrelationDiff correlation_diff_metrics(const Dataset& real, const Dataset& synth);

CorrelationDiff correlation_diff_from_matrices(const std::vector<std::string>& attributes,
                                               const std::vector<std::vector<double>>& real_matrix,
                                               const std::vector<std::vector<double>>& synth_matrix);

FidelityReport fidelity_report(const Dataset& real, const Dataset& synth, int bins = 50);

std::string fidelity_report_json(const FidelityReport& report);
std::string fidelity_report_text(const FidelityReport& report);

/// Difference matrix as CSV for external plotting.
std::string correlation_diff_csv(const CorrelationDiff& diff);

}  // namespace rddg
