#include "rddg/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/fidelity.hpp"
#include "rddg/text.hpp"

namespace rddg {

const char* const kFeedbackReportHeader =
    "You are generating tabular data. Here is the quality evaluation report:";

namespace {

constexpr std::size_t kMaxCorrelationPairs = 5;

double column_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double column_std(const std::vector<double>& v, double mean) {
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

std::vector<double> standardized_column(const Dataset& ds, std::size_t col,
                                        const StandardizationParams::ColumnStats& stats) {
  auto v = ds.numeric_column(col);
  if (!stats.degenerate)
    for (double& x : v) x = (x - stats.mean) / stats.stddev;
  return v;
}

std::string directive_kind_name(DirectiveKind kind) {
  switch (kind) {
    case DirectiveKind::adjust_mean: return "adjust_mean";
    case DirectiveKind::maintain_variance: return "maintain_variance";
    case DirectiveKind::strengthen_correlation: return "strengthen_correlation";
    case DirectiveKind::align_distribution: return "align_distribution";
  }
  return "?";
}

DirectiveKind directive_kind_from_name(const std::string& name) {
  if (name == "adjust_mean") return DirectiveKind::adjust_mean;
  if (name == "maintain_variance") return DirectiveKind::maintain_variance;
  if (name == "strengthen_correlation") return DirectiveKind::strengthen_correlation;
  if (name == "align_distribution") return DirectiveKind::align_distribution;
  throw DataError("unknown directive kind: " + name);
}

}  // namespace

double BatchQuality::max_mean_diff() const {
  double m = 0.0;
  for (const auto& a : attributes) m = std::max(m, a.mean_diff);
  return m;
}

double BatchQuality::max_std_diff() const {
  double m = 0.0;
  for (const auto& a : attributes) m = std::max(m, a.std_diff);
  return m;
}

double BatchQuality::max_ks() const {
  double m = 0.0;
  for (const auto& a : attributes) m = std::max(m, a.ks);
  return m;
}

std::string BatchQuality::to_json() const {
  nlohmann::json j;
  j["empty_batch"] = empty_batch;
  j["correlation_available"] = correlation_available;
  j["correlation_max_diff"] = correlation_max_diff;
  j["attributes"] = nlohmann::json::array();
  for (const auto& a : attributes)
    j["attributes"].push_back({{"attribute", a.attribute},
                               {"mean_diff", a.mean_diff},
                               {"std_diff", a.std_diff},
                               {"ks", a.ks}});
  j["correlation_pairs"] = nlohmann::json::array();
  for (const auto& p : correlation_pairs)
    j["correlation_pairs"].push_back({{"a", p.a}, {"b", p.b}, {"diff", p.diff}});
  return j.dump();
}

BatchQuality BatchQuality::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  BatchQuality q;
  q.empty_batch = j.at("empty_batch").get<bool>();
  q.correlation_available = j.at("correlation_available").get<bool>();
  q.correlation_max_diff = j.at("correlation_max_diff").get<double>();
  for (const auto& a : j.at("attributes"))
    q.attributes.push_back({a.at("attribute").get<std::string>(), a.at("mean_diff").get<double>(),
                            a.at("std_diff").get<double>(), a.at("ks").get<double>()});
  for (const auto& p : j.at("correlation_pairs"))
    q.correlation_pairs.push_back(
        {p.at("a").get<std::string>(), p.at("b").get<std::string>(), p.at("diff").get<double>()});
  return q;
}

void Thresholds::validate() const {
  if (mean < 0 || stddev < 0 || correlation < 0 || ks < 0)
    throw ConfigError("feedback thresholds must be non-negative");
}

FeedbackTargets FeedbackTargets::from_batch(const Dataset& reference) {
  FeedbackTargets t;
  for (int col : reference.schema.numeric_indices()) {
    auto v = reference.numeric_column(static_cast<std::size_t>(col));
    if (v.empty()) continue;
    double mean = column_mean(v);
    t.targets.push_back({reference.schema.attributes[col].name, mean, column_std(v, mean)});
  }
  return t;
}

const FeedbackTargets::Target* FeedbackTargets::find(const std::string& attribute) const {
  for (const auto& t : targets)
    if (t.attribute == attribute) return &t;
  return nullptr;
}

double ks_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw DataError("ks statistic needs non-empty samples");
  std::vector<double> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

BatchQuality evaluate_batch(const Dataset& synth, const Dataset& reference,
                            const StandardizationParams& params) {
  if (synth.schema != reference.schema) throw DataError("evaluate_batch: schemas differ");
  if (synth.rows.empty() || reference.rows.empty())
    throw DataError("evaluate_batch: both batches must be non-empty");

  BatchQuality q;
  const auto numeric = synth.schema.numeric_indices();
  std::vector<std::vector<double>> synth_cols, ref_cols;
  for (int col : numeric) {
    const auto& name = synth.schema.attributes[col].name;
    const auto* stats = params.find(name);
    if (!stats) throw DataError("standardization params missing attribute " + name);
    synth_cols.push_back(standardized_column(synth, static_cast<std::size_t>(col), *stats));
    ref_cols.push_back(standardized_column(reference, static_cast<std::size_t>(col), *stats));
  }

  for (std::size_t k = 0; k < synth_cols.size(); ++k) {
    BatchQuality::AttributeStat stat;
    stat.attribute = synth.schema.attributes[numeric[k]].name;
    const double ms = column_mean(synth_cols[k]);
    const double mr = column_mean(ref_cols[k]);
    stat.mean_diff = std::fabs(ms - mr);
    stat.std_diff = std::fabs(column_std(synth_cols[k], ms) - column_std(ref_cols[k], mr));
    stat.ks = ks_statistic(synth_cols[k], ref_cols[k]);
    q.attributes.push_back(stat);
  }

  q.correlation_available =
      synth.rows.size() >= 2 && reference.rows.size() >= 2 && numeric.size() >= 2;
  if (q.correlation_available) {
    for (std::size_t i = 0; i < synth_cols.size(); ++i) {
      for (std::size_t j = i + 1; j < synth_cols.size(); ++j) {
        const double rs = pearson(synth_cols[i], synth_cols[j]);
        const double rr = pearson(ref_cols[i], ref_cols[j]);
        const double diff = std::fabs(rs - rr);
        if (diff > 0.0)
          q.correlation_pairs.push_back({synth.schema.attributes[numeric[i]].name,
                                         synth.schema.attributes[numeric[j]].name, diff});
        q.correlation_max_diff = std::max(q.correlation_max_diff, diff);
      }
    }
    std::stable_sort(q.correlation_pairs.begin(), q.correlation_pairs.end(),
                     [](const auto& a, const auto& b) { return a.diff > b.diff; });
  }
  return q;
}

namespace {

std::string render_report(const BatchQuality& quality, const Thresholds& thresholds,
                          const std::vector<Directive>& directives) {
  std::ostringstream out;
  out << kFeedbackReportHeader << "\n";
  out << "1. Mean and Standard Deviation Differences:\n";
  for (const auto& a : quality.attributes)
    out << "   - " << a.attribute << ": Mean diff = " << text::format_fixed(a.mean_diff, 2)
        << ", Std dev diff = " << text::format_fixed(a.std_diff, 2) << "\n";
  out << "2. Correlation Differences:\n";
  if (!quality.correlation_available) {
    out << "   - not evaluated (too few rows)\n";
  } else if (quality.correlation_pairs.empty()) {
    out << "   - within tolerance\n";
  } else {
    const std::size_t shown = std::min(kMaxCorrelationPairs, quality.correlation_pairs.size());
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& p = quality.correlation_pairs[i];
      out << "   - (" << p.a << ", " << p.b
          << "): Corr diff = " << text::format_fixed(p.diff, 2) << "\n";
    }
  }
  out << "3. Distribution Differences (Kolmogorov-Smirnov):\n";
  bool any_ks = false;
  for (const auto& a : quality.attributes) {
    if (a.ks > thresholds.ks) {
      out << "   - " << a.attribute << ": KS statistic = " << text::format_fixed(a.ks, 2) << "\n";
      any_ks = true;
    }
  }
  if (!any_ks) out << "   - within tolerance\n";

  out << "Guidance:\n";
  for (const auto& d : directives) {
    switch (d.kind) {
      case DirectiveKind::adjust_mean: {
        std::vector<std::string> parts;
        for (const auto& [attr, v] : d.attribute_values)
          parts.push_back(attr + " = " + text::format_double(v));
        out << "Adjust mean values closer to: " << text::join(parts, ", ") << "\n";
        break;
      }
      case DirectiveKind::maintain_variance: {
        std::vector<std::string> parts;
        for (const auto& [attr, v] : d.attribute_values)
          parts.push_back(attr + " = " + text::format_double(v));
        out << "Maintain variance similar to: " << text::join(parts, ", ") << "\n";
        break;
      }
      case DirectiveKind::strengthen_correlation: {
        std::vector<std::string> parts;
        for (const auto& [a, b] : d.pairs) parts.push_back("(" + a + ", " + b + ")");
        out << "Strengthen correlation between " << text::join(parts, ", ") << "\n";
        break;
      }
      case DirectiveKind::align_distribution: {
        std::vector<std::string> parts;
        for (const auto& [attr, v] : d.attribute_values) {
          (void)v;
          parts.push_back(attr);
        }
        out << "Align distribution patterns for: " << text::join(parts, ", ") << "\n";
        break;
      }
    }
  }
  return out.str();
}

}  // namespace

FeedbackReport create_feedback(const BatchQuality& quality, const Thresholds& thresholds,
                               const FeedbackTargets& targets) {
  thresholds.validate();
  FeedbackReport report;
  if (quality.empty_batch) return report;

  Directive mean_d{DirectiveKind::adjust_mean, {}, {}};
  Directive std_d{DirectiveKind::maintain_variance, {}, {}};
  Directive ks_d{DirectiveKind::align_distribution, {}, {}};
  for (const auto& a : quality.attributes) {
    const auto* target = targets.find(a.attribute);
    if (a.mean_diff > thresholds.mean)
      mean_d.attribute_values.emplace_back(a.attribute, target ? target->mean : 0.0);
    if (a.std_diff > thresholds.stddev)
      std_d.attribute_values.emplace_back(a.attribute, target ? target->stddev : 0.0);
    if (a.ks > thresholds.ks) ks_d.attribute_values.emplace_back(a.attribute, a.ks);
  }

  Directive corr_d{DirectiveKind::strengthen_correlation, {}, {}};
  if (quality.correlation_available && quality.correlation_max_diff > thresholds.correlation) {
    for (const auto& p : quality.correlation_pairs) {
      if (p.diff > thresholds.correlation) corr_d.pairs.emplace_back(p.a, p.b);
      if (corr_d.pairs.size() == kMaxCorrelationPairs) break;
    }
  }

  if (!mean_d.attribute_values.empty()) report.directives.push_back(mean_d);
  if (!std_d.attribute_values.empty()) report.directives.push_back(std_d);
  if (!corr_d.pairs.empty()) report.directives.push_back(corr_d);
  if (!ks_d.attribute_values.empty()) report.directives.push_back(ks_d);

  if (!report.directives.empty())
    report.rendered = render_report(quality, thresholds, report.directives);
  return report;
}

std::vector<Directive> parse_directives(const std::string& rendered_feedback) {
  std::vector<Directive> out;
  auto parse_pairs = [](const std::string& payload) {
    std::vector<std::pair<std::string, double>> values;
    for (const auto& part : text::split(payload, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) continue;
      const std::string attr = text::trim(part.substr(0, eq));
      const auto v = text::parse_double(text::trim(part.substr(eq + 1)));
      if (!attr.empty() && v) values.emplace_back(attr, *v);
    }
    return values;
  };

  for (const auto& raw_line : text::split(rendered_feedback, '\n')) {
    const std::string line = text::trim(raw_line);
    if (text::starts_with(line, "Adjust mean values closer to:")) {
      Directive d{DirectiveKind::adjust_mean, parse_pairs(line.substr(29)), {}};
      out.push_back(std::move(d));
    } else if (text::starts_with(line, "Maintain variance similar to:")) {
      Directive d{DirectiveKind::maintain_variance, parse_pairs(line.substr(29)), {}};
      out.push_back(std::move(d));
    } else if (text::starts_with(line, "Strengthen correlation between ")) {
      Directive d{DirectiveKind::strengthen_correlation, {}, {}};
      std::string payload = line.substr(31);
      std::size_t pos = 0;
      while ((pos = payload.find('(', pos)) != std::string::npos) {
        const auto close = payload.find(')', pos);
        if (close == std::string::npos) break;
        auto inner = text::split(payload.substr(pos + 1, close - pos - 1), ',');
        if (inner.size() == 2)
          d.pairs.emplace_back(text::trim(inner[0]), text::trim(inner[1]));
        pos = close + 1;
      }
      out.push_back(std::move(d));
    } else if (text::starts_with(line, "Align distribution patterns for:")) {
      Directive d{DirectiveKind::align_distribution, {}, {}};
      for (const auto& part : text::split(line.substr(32), ',')) {
        const std::string attr = text::trim(part);
        if (!attr.empty()) d.attribute_values.emplace_back(attr, 0.0);
      }
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::string FeedbackReport::to_json() const {
  nlohmann::json j;
  j["rendered"] = rendered;
  j["directives"] = nlohmann::json::array();
  for (const auto& d : directives) {
    nlohmann::json dj;
    dj["kind"] = directive_kind_name(d.kind);
    dj["attribute_values"] = nlohmann::json::array();
    for (const auto& [a, v] : d.attribute_values)
      dj["attribute_values"].push_back({{"attribute", a}, {"value", v}});
    dj["pairs"] = nlohmann::json::array();
    for (const auto& [a, b] : d.pairs) dj["pairs"].push_back({{"a", a}, {"b", b}});
    j["directives"].push_back(dj);
  }
  return j.dump();
}

FeedbackReport FeedbackReport::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  FeedbackReport r;
  r.rendered = j.at("rendered").get<std::string>();
  for (const auto& dj : j.at("directives")) {
    Directive d{directive_kind_from_name(dj.at("kind").get<std::string>()), {}, {}};
    for (const auto& av : dj.at("attribute_values"))
      d.attribute_values.emplace_back(av.at("attribute").get<std::string>(),
                                      av.at("value").get<double>());
    for (const auto& p : dj.at("pairs"))
      d.pairs.emplace_back(p.at("a").get<std::string>(), p.at("b").get<std::string>());
    r.directives.push_back(std::move(d));
  }
  return r;
}

}  // namespace rddg
