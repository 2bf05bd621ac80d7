#include "rddg/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/text.hpp"

namespace rddg {

namespace {

constexpr double kSmoothingEps = 1e-10;

std::vector<double> binned_mass(const std::vector<double>& values, const std::vector<double>& edges) {
  const int k = static_cast<int>(edges.size()) - 1;
  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  const double lo = edges.front();
  const double hi = edges.back();
  const double width = (hi - lo) / k;
  for (double v : values) {
    int bin;
    if (width == 0.0) {
      bin = 0;
    } else {
      bin = static_cast<int>(std::floor((v - lo) / width));
      bin = std::clamp(bin, 0, k - 1);  // out-of-range values clip into boundary bins
    }
    counts[static_cast<std::size_t>(bin)] += 1.0;
  }
  double total = 0.0;
  for (double& c : counts) {
    c += kSmoothingEps;
    total += c;
  }
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace

Histogram build_histogram(const std::vector<double>& real_col,
                          const std::vector<double>& synth_col, int bins) {
  if (real_col.empty() || synth_col.empty())
    throw DataError("kl divergence needs non-empty columns");
  if (bins < 2) throw ConfigError("kl divergence needs at least 2 bins");

  const auto [lo_it, hi_it] = std::minmax_element(real_col.begin(), real_col.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
  h.real_mass = binned_mass(real_col, h.edges);
  h.synth_mass = binned_mass(synth_col, h.edges);
  return h;
}

double kl_divergence_binned(const std::vector<double>& real_col,
                            const std::vector<double>& synth_col, int bins) {
  const Histogram h = build_histogram(real_col, synth_col, bins);
  double kl = 0.0;
  for (std::size_t i = 0; i < h.real_mass.size(); ++i)
    kl += h.real_mass[i] * std::log(h.real_mass[i] / h.synth_mass[i]);
  return std::max(kl, 0.0);
}

double dataset_kl(const Dataset& real, const Dataset& synth, int bins) {
  if (real.schema != synth.schema) throw DataError("dataset_kl: schemas differ");
  const auto numeric = real.schema.numeric_indices();
  if (numeric.empty()) throw DataError("dataset_kl: no numeric attributes");
  double sum = 0.0;
  for (int col : numeric)
    sum += kl_divergence_binned(real.numeric_column(static_cast<std::size_t>(col)),
                                synth.numeric_column(static_cast<std::size_t>(col)), bins);
  return sum / static_cast<double>(numeric.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DataError("pearson needs two equal-length samples with >= 2 values");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;  // degenerate columns correlate 0
  return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const Dataset& ds) {
  if (ds.rows.size() < 2) throw DataError("correlation matrix needs at least 2 rows");
  const auto numeric = ds.schema.numeric_indices();
  if (numeric.size() < 2) throw DataError("correlation matrix needs at least 2 numeric attributes");

  CorrelationMatrix m;
  std::vector<std::vector<double>> cols;
  for (int col : numeric) {
    m.attributes.push_back(ds.schema.attributes[col].name);
    cols.push_back(ds.numeric_column(static_cast<std::size_t>(col)));
  }
  const std::size_t n = cols.size();
  std::vector<bool> degenerate(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double first = cols[i].empty() ? 0.0 : cols[i][0];
    degenerate[i] = std::all_of(cols[i].begin(), cols[i].end(),
                                [&](double v) { return v == first; });
    if (degenerate[i]) m.degenerate_columns.push_back(m.attributes[i]);
  }
  m.values.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double r = (degenerate[i] || degenerate[j]) ? 0.0 : pearson(cols[i], cols[j]);
      m.values[i][j] = r;
      m.values[j][i] = r;
    }
  }
  return m;
}

CorrelationDiff correlation_diff_from_matrices(
    const std::vector<std::string>& attributes,
    const std::vector<std::vector<double>>& real_matrix,
    const std::vector<std::vector<double>>& synth_matrix) {
  const std::size_t n = real_matrix.size();
  if (n == 0 || synth_matrix.size() != n)
    throw DataError("correlation matrices must be non-empty and equally sized");

  CorrelationDiff diff;
  diff.attributes = attributes;
  diff.real_matrix = real_matrix;
  diff.synth_matrix = synth_matrix;
  diff.abs_diff.assign(n, std::vector<double>(n, 0.0));
  double sum_sq = 0.0, sum_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::fabs(real_matrix[i][j] - synth_matrix[i][j]);
      diff.abs_diff[i][j] = d;
      sum_sq += d * d;
      sum_abs += d;
      diff.max_diff = std::max(diff.max_diff, d);
    }
  }
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  diff.frobenius = std::sqrt(sum_sq);
  diff.mae = sum_abs / n2;
  diff.rmse = std::sqrt(sum_sq / n2);
  return diff;
}

CorrelationDiff correlation_diff_metrics(const Dataset& real, const Dataset& synth) {
  const CorrelationMatrix mr = correlation_matrix(real);
  const CorrelationMatrix ms = correlation_matrix(synth);
  if (mr.attributes != ms.attributes)
    throw DataError("correlation_diff_metrics: numeric attribute sets differ");
  return correlation_diff_from_matrices(mr.attributes, mr.values, ms.values);
}

FidelityReport fidelity_report(const Dataset& real, const Dataset& synth, int bins) {
  if (real.schema != synth.schema) throw DataError("fidelity report: schemas differ");
  FidelityReport report;
  report.kl_bins = bins;
  const auto numeric = real.schema.numeric_indices();
  if (numeric.empty()) throw DataError("fidelity report: no numeric attributes");
  double sum = 0.0;
  for (int col : numeric) {
    double kl = kl_divergence_binned(real.numeric_column(static_cast<std::size_t>(col)),
                                     synth.numeric_column(static_cast<std::size_t>(col)), bins);
    report.kl_per_attribute.emplace_back(real.schema.attributes[col].name, kl);
    sum += kl;
  }
  report.kl_mean = sum / static_cast<double>(numeric.size());
  if (numeric.size() >= 2 && real.rows.size() >= 2 && synth.rows.size() >= 2)
    report.correlation = correlation_diff_metrics(real, synth);
  else
    report.correlation.attributes.clear();
  return report;
}

std::string fidelity_report_json(const FidelityReport& report) {
  nlohmann::json j;
  j["kl"]["bins"] = report.kl_bins;
  j["kl"]["log_base"] = "e";
  j["kl"]["mean"] = report.kl_mean;
  nlohmann::json per_attr = nlohmann::json::object();
  for (const auto& [name, v] : report.kl_per_attribute) per_attr[name] = v;
  j["kl"]["per_attribute"] = per_attr;
  j["correlation"]["attributes"] = report.correlation.attributes;
  j["correlation"]["frobenius"] = report.correlation.frobenius;
  j["correlation"]["mae"] = report.correlation.mae;
  j["correlation"]["rmse"] = report.correlation.rmse;
  j["correlation"]["max_diff"] = report.correlation.max_diff;
  return j.dump(2) + "\n";
}

std::string fidelity_report_text(const FidelityReport& report) {
  std::ostringstream out;
  out << "Statistical fidelity report (KL in nats, " << report.kl_bins
      << " equal-width bins on the real range; log base affects absolute KL values)\n\n";
  out << "Distribution consistency (KL divergence, real || synthetic):\n";
  for (const auto& [name, v] : report.kl_per_attribute)
    out << "  " << name << ": " << text::format_fixed(v, 4) << "\n";
  out << "  mean over numeric attributes: " << text::format_fixed(report.kl_mean, 4) << "\n\n";
  out << "Correlation preservation (difference of Pearson matrices):\n";
  out << "  Frobenius norm: " << text::format_fixed(report.correlation.frobenius, 4) << "\n";
  out << "  MAE:            " << text::format_fixed(report.correlation.mae, 4) << "\n";
  out << "  RMSE:           " << text::format_fixed(report.correlation.rmse, 4) << "\n";
  out << "  Max Diff:       " << text::format_fixed(report.correlation.max_diff, 4) << "\n";
  return out.str();
}

std::string correlation_diff_csv(const CorrelationDiff& diff) {
  std::string out = "attribute," + text::join(diff.attributes, ",") + "\n";
  for (std::size_t i = 0; i < diff.abs_diff.size(); ++i) {
    std::vector<std::string> fields = {diff.attributes[i]};
    for (double v : diff.abs_diff[i]) fields.push_back(text::format_double(v));
    out += text::join(fields, ",") + "\n";
  }
  return out;
}

}  // namespace rddg
