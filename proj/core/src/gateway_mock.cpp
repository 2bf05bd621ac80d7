#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/feedback.hpp"
#include "rddg/gateway.hpp"
#include "rddg/rng.hpp"
#include "rddg/text.hpp"

namespace rddg {

MockGateway::MockGateway(const Schema& schema, const ClassCodeMap& codes, const MockConfig& cfg)
    : schema_(schema), codes_(codes), cfg_(cfg) {
  schema_.validate();
  const int label = schema_.label_index();
  for (std::size_t c = 0; c < schema_.attributes.size(); ++c) {
    if (schema_.attributes[c].is_numeric())
      numeric_cols_.push_back(static_cast<int>(c));
    else if (static_cast<int>(c) != label)
      categorical_cols_.push_back(static_cast<int>(c));
  }
  mean_offset_.assign(numeric_cols_.size(), 0.0);
  std_factor_.assign(numeric_cols_.size(), 1.0);
}

void MockGateway::register_reference(const Dataset& batch, int rows_per_class) {
  if (batch.schema != schema_) throw DataError("mock reference batch has a different schema");
  if (batch.rows.empty()) throw DataError("mock reference batch is empty");
  if (rows_per_class < 1) throw ConfigError("mock rows_per_class must be >= 1");

  rows_per_class_ = rows_per_class;
  fits_.assign(schema_.n_classes(), ClassFit{});
  class_present_.assign(schema_.n_classes(), false);
  pooled_mean_.assign(numeric_cols_.size(), 0.0);
  pooled_std_.assign(numeric_cols_.size(), 0.0);

  std::vector<std::vector<std::size_t>> members(schema_.n_classes());
  for (std::size_t i = 0; i < batch.rows.size(); ++i)
    members[static_cast<std::size_t>(batch.rows[i].label)].push_back(i);
  for (std::size_t c = 0; c < members.size(); ++c) class_present_[c] = !members[c].empty();

  for (std::size_t c = 0; c < fits_.size(); ++c) {
    auto& fit = fits_[c];
    fit.mean.assign(numeric_cols_.size(), 0.0);
    fit.stddev.assign(numeric_cols_.size(), 0.0);
    fit.counts.assign(categorical_cols_.size(), {});
    for (std::size_t a = 0; a < categorical_cols_.size(); ++a)
      fit.counts[a].assign(
          schema_.attributes[static_cast<std::size_t>(categorical_cols_[a])].categories.size(), 0);

    for (std::size_t a = 0; a < numeric_cols_.size(); ++a) {
      const auto col = static_cast<std::size_t>(numeric_cols_[a]);
      if (members[c].empty()) continue;
      double mean = 0.0;
      for (auto i : members[c]) mean += batch.numeric_at(i, col);
      mean /= static_cast<double>(members[c].size());
      double var = 0.0;
      for (auto i : members[c]) {
        const double d = batch.numeric_at(i, col) - mean;
        var += d * d;
      }
      fit.mean[a] = mean;
      fit.stddev[a] = std::sqrt(var / static_cast<double>(members[c].size()));
    }
    for (std::size_t a = 0; a < categorical_cols_.size(); ++a) {
      const auto col = static_cast<std::size_t>(categorical_cols_[a]);
      const auto& attr = schema_.attributes[col];
      for (auto i : members[c]) {
        const int idx = attr.category_index(batch.category_at(i, col));
        if (idx >= 0) ++fit.counts[a][static_cast<std::size_t>(idx)];
      }
    }
  }

  for (std::size_t a = 0; a < numeric_cols_.size(); ++a) {
    const auto col = static_cast<std::size_t>(numeric_cols_[a]);
    const auto values = batch.numeric_column(col);
    double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                  static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    pooled_mean_[a] = mean;
    pooled_std_[a] = std::sqrt(var / static_cast<double>(values.size()));
  }

  if (!offsets_initialized_) {
    for (std::size_t a = 0; a < numeric_cols_.size(); ++a) {
      mean_offset_[a] = cfg_.mean_shift * pooled_std_[a];
      std_factor_[a] = cfg_.std_scale;
    }
    offsets_initialized_ = true;
  }
  has_reference_ = true;
}

void MockGateway::apply_feedback(const std::string& prompt) {
  const auto header_pos = prompt.find(kFeedbackReportHeader);
  if (header_pos == std::string::npos) return;
  const auto directives = parse_directives(prompt.substr(header_pos));
  // each shift applies once per batch: offsets are updated here and the
  // updated values stay in force until the next report arrives
  for (const auto& d : directives) {
    if (d.kind == DirectiveKind::adjust_mean) {
      for (const auto& [attr, target] : d.attribute_values) {
        for (std::size_t a = 0; a < numeric_cols_.size(); ++a) {
          if (schema_.attributes[static_cast<std::size_t>(numeric_cols_[a])].name != attr) continue;
          // shift the distorted mean halfway toward the target
          mean_offset_[a] = (mean_offset_[a] + target - pooled_mean_[a]) / 2.0;
        }
      }
    } else if (d.kind == DirectiveKind::maintain_variance) {
      for (const auto& [attr, target] : d.attribute_values) {
        for (std::size_t a = 0; a < numeric_cols_.size(); ++a) {
          if (schema_.attributes[static_cast<std::size_t>(numeric_cols_[a])].name != attr) continue;
          if (pooled_std_[a] > 0.0)
            std_factor_[a] = (std_factor_[a] + target / pooled_std_[a]) / 2.0;
        }
      }
    }
    // correlation and distribution directives carry no actionable targets
    // for an independent per-attribute sampler; they are accepted silently
  }
}

std::string MockGateway::generate_batch_text() {
  Rng rng(Rng::derive(cfg_.seed, 10000 + call_count_));
  const int label_col = schema_.label_index();

  std::string out = render_header(schema_);
  out += '\n';
  for (std::size_t c = 0; c < schema_.n_classes(); ++c) {
    if (!class_present_[c]) continue;  // no exemplars in this batch, no samples
    out += codes_.marker_for_class(static_cast<int>(c));
    out += ".\n";

    // draw all numeric columns first, then re-center so the sample moments
    // hit the intended mean/std exactly
    std::vector<std::vector<double>> columns(numeric_cols_.size());
    for (std::size_t a = 0; a < numeric_cols_.size(); ++a) {
      const double eff_mean = fits_[c].mean[a] + mean_offset_[a];
      const double eff_std = fits_[c].stddev[a] * std_factor_[a];
      auto& col = columns[a];
      col.resize(static_cast<std::size_t>(rows_per_class_));
      if (rows_per_class_ == 1 || eff_std == 0.0) {
        std::fill(col.begin(), col.end(), eff_mean);
        continue;
      }
      for (double& v : col) v = rng.normal();
      double m = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
      double var = 0.0;
      for (double v : col) var += (v - m) * (v - m);
      const double s = std::sqrt(var / static_cast<double>(col.size()));
      for (double& v : col) v = eff_mean + eff_std * ((v - m) / s);
    }

    for (int r = 0; r < rows_per_class_; ++r) {
      Row row;
      row.cells.resize(schema_.attributes.size());
      row.label = static_cast<int>(c);
      row.cells[static_cast<std::size_t>(label_col)] = schema_.classes[c];
      for (std::size_t a = 0; a < numeric_cols_.size(); ++a)
        row.cells[static_cast<std::size_t>(numeric_cols_[a])] =
            columns[a][static_cast<std::size_t>(r)];
      for (std::size_t a = 0; a < categorical_cols_.size(); ++a) {
        const auto col = static_cast<std::size_t>(categorical_cols_[a]);
        const auto& attr = schema_.attributes[col];
        const auto& counts = fits_[c].counts[a];
        const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
        std::size_t choice = 0;
        if (total == 0) {
          choice = static_cast<std::size_t>(rng.index(static_cast<int>(attr.categories.size())));
        } else {
          std::uint64_t pickv = rng.below(total);
          std::size_t acc = 0;
          for (std::size_t k = 0; k < counts.size(); ++k) {
            acc += counts[k];
            if (pickv < acc) {
              choice = k;
              break;
            }
          }
        }
        row.cells[col] = attr.categories[choice];
      }
      out += render_row(schema_, row, codes_);
      out += '\n';
    }
  }
  ++call_count_;
  return out;
}

CompletionResult MockGateway::complete(const std::vector<ChatMessage>& messages) {
  std::string prompt;
  for (const auto& m : messages) prompt += m.content;

  std::string response;
  if (prompt.find("analyze the relationships") != std::string::npos) {
    std::string lines;
    int n = 1;
    for (const auto& attr : schema_.attributes) {
      if (attr.name == schema_.label) continue;
      lines += std::to_string(n) + ". " + attr.name +
               ": values differ visibly across the class sections and should be preserved.\n";
      ++n;
    }
    response = "From the given data, the following relationships stand out:\n" + lines;
    ++call_count_;
  } else if (prompt.find("rules and constraints for data generation") != std::string::npos) {
    response =
        "Rule 1: Keep every attribute within the ranges observed in the reference samples.\n"
        "Rule 2: Preserve the relationships identified in the analysis when generating values.\n"
        "Rule 3: Generate the same number of samples for every class section.\n";
    ++call_count_;
  } else {
    if (!has_reference_)
      throw TransportError("mock gateway: no reference rows registered for generation");
    apply_feedback(prompt);
    response = generate_batch_text();
  }

  UsageDelta usage;
  usage.input_tokens = static_cast<long>(prompt.size() / 4);
  usage.output_tokens = static_cast<long>(response.size() / 4);
  usage.seconds = 0.0;
  usage.estimated = true;
  record(usage, 0.0);
  return {response, usage};
}

std::string MockGateway::snapshot_state() const {
  nlohmann::json j;
  j["call_count"] = call_count_;
  j["offsets_initialized"] = offsets_initialized_;
  j["mean_offset"] = mean_offset_;
  j["std_factor"] = std_factor_;
  return j.dump();
}

void MockGateway::restore_state(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.contains("call_count")) {  // a fresh run's state restores a fresh mock
    call_count_ = 0;
    offsets_initialized_ = false;
    mean_offset_.assign(numeric_cols_.size(), 0.0);
    std_factor_.assign(numeric_cols_.size(), 1.0);
    has_reference_ = false;
    return;
  }
  call_count_ = j.at("call_count").get<std::uint64_t>();
  offsets_initialized_ = j.at("offsets_initialized").get<bool>();
  mean_offset_ = j.at("mean_offset").get<std::vector<double>>();
  std_factor_ = j.at("std_factor").get<std::vector<double>>();
  if (mean_offset_.size() != numeric_cols_.size() || std_factor_.size() != numeric_cols_.size())
    throw DataError("mock gateway state does not match the schema");
  has_reference_ = false;  // references are re-registered per batch
}

}  // namespace rddg
