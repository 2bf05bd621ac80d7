#include "rddg/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "rddg/error.hpp"
#include "rddg/rng.hpp"
#include "rddg/text.hpp"

namespace rddg {

void ProbeConfig::validate() const {
  for (int h : hidden)
    if (h < 1) throw ConfigError("probe hidden widths must be >= 1");
  if (learning_rate <= 0.0) throw ConfigError("probe learning rate must be > 0");
  if (batch_size < 1) throw ConfigError("probe batch size must be >= 1");
  if (epochs < 3) throw ConfigError("probe needs epochs >= 3 so every phase is non-empty");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0))
    throw ConfigError("Adam moment coefficients must lie in (0, 1)");
}

std::array<std::pair<int, int>, 3> phase_boundaries(int epochs) {
  const int third = epochs / 3;
  std::array<std::pair<int, int>, 3> phases;
  phases[0] = {0, third};
  phases[1] = {third, 2 * third};
  phases[2] = {2 * third, epochs};  // remainder epochs land in the late phase
  return phases;
}

namespace {

void softmax_inplace(std::vector<double>& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

/// dL/dz for p = softmax(z) given dL/dp.
std::vector<double> softmax_backward(const std::vector<double>& p, const std::vector<double>& dp) {
  double dot = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) dot += dp[i] * p[i];
  std::vector<double> dz(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) dz[i] = p[i] * (dp[i] - dot);
  return dz;
}

}  // namespace

struct ProbeNetwork::Activations {
  std::vector<double> attn_z;      // pre-softmax attention scores
  std::vector<double> attn_a;      // attention weights
  std::vector<double> h0;          // attention output (or the raw input)
  std::vector<std::vector<double>> pre;   // z_l per layer
  std::vector<std::vector<double>> post;  // h_l per layer (after ReLU where applicable)
  std::vector<double> probs;       // softmax output
};

ProbeNetwork::ProbeNetwork(int input_dim, int n_classes, const ProbeConfig& cfg)
    : input_dim_(input_dim), n_classes_(n_classes), attention_(cfg.attention) {
  cfg.validate();
  if (input_dim < 1) throw DataError("probe input dimension must be >= 1");
  if (n_classes < 2) throw DataError("probe needs at least 2 classes");

  std::size_t offset = 0;
  if (attention_) {
    attn_w_ = offset;
    offset += static_cast<std::size_t>(input_dim) * input_dim;
    attn_b_ = offset;
    offset += static_cast<std::size_t>(input_dim);
  }
  std::vector<int> dims;
  dims.push_back(input_dim);
  for (int h : cfg.hidden) dims.push_back(h);
  dims.push_back(n_classes);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.w_offset = offset;
    offset += static_cast<std::size_t>(layer.in) * layer.out;
    layer.b_offset = offset;
    offset += static_cast<std::size_t>(layer.out);
    // Block(w) = affine + ReLU for all hidden layers but the last, which is
    // purely affine; the output layer feeds softmax.
    layer.relu = static_cast<int>(l) < static_cast<int>(cfg.hidden.size()) - 1;
    layers_.push_back(layer);
  }

  params_.assign(offset, 0.0);
  Rng rng(Rng::derive(cfg.seed, 7));
  auto glorot = [&](std::size_t w_offset, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    const std::size_t count = static_cast<std::size_t>(fan_in) * fan_out;
    for (std::size_t i = 0; i < count; ++i)
      params_[w_offset + i] = rng.uniform(-limit, limit);
  };
  if (attention_) glorot(attn_w_, input_dim, input_dim);
  for (const auto& layer : layers_) glorot(layer.w_offset, layer.in, layer.out);
}

void ProbeNetwork::forward(const std::vector<double>& x, Activations& act) const {
  if (attention_) {
    act.attn_z.assign(static_cast<std::size_t>(input_dim_), 0.0);
    for (int i = 0; i < input_dim_; ++i) {
      double acc = params_[attn_b_ + i];
      const std::size_t row = attn_w_ + static_cast<std::size_t>(i) * input_dim_;
      for (int j = 0; j < input_dim_; ++j) acc += params_[row + j] * x[j];
      act.attn_z[static_cast<std::size_t>(i)] = acc;
    }
    act.attn_a = act.attn_z;
    softmax_inplace(act.attn_a);
    act.h0.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) act.h0[i] = act.attn_a[i] * x[i];
  } else {
    act.h0 = x;
  }

  act.pre.assign(layers_.size(), {});
  act.post.assign(layers_.size(), {});
  const std::vector<double>* h = &act.h0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    auto& z = act.pre[l];
    z.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      double acc = params_[layer.b_offset + o];
      const std::size_t row = layer.w_offset + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) acc += params_[row + i] * (*h)[static_cast<std::size_t>(i)];
      z[static_cast<std::size_t>(o)] = acc;
    }
    act.post[l] = z;
    if (layer.relu)
      for (double& v : act.post[l]) v = std::max(0.0, v);
    h = &act.post[l];
  }
  act.probs = *h;
  softmax_inplace(act.probs);
}

std::vector<double> ProbeNetwork::predict(const std::vector<double>& x) const {
  Activations act;
  forward(x, act);
  return act.probs;
}

double ProbeNetwork::batch_loss(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y) const {
  double total = 0.0;
  Activations act;
  for (std::size_t i = 0; i < x.size(); ++i) {
    forward(x[i], act);
    for (std::size_t k = 0; k < act.probs.size(); ++k) {
      const double target = (static_cast<int>(k) == y[i]) ? 1.0 : 0.0;
      const double d = act.probs[k] - target;
      total += d * d;
    }
  }
  return total / static_cast<double>(x.size());
}

double ProbeNetwork::batch_gradient(const std::vector<std::vector<double>>& x,
                                    const std::vector<int>& y,
                                    std::vector<double>& grad) const {
  grad.assign(params_.size(), 0.0);
  double total = 0.0;
  Activations act;
  for (std::size_t s = 0; s < x.size(); ++s) {
    forward(x[s], act);

    std::vector<double> dp(act.probs.size());
    for (std::size_t k = 0; k < act.probs.size(); ++k) {
      const double target = (static_cast<int>(k) == y[s]) ? 1.0 : 0.0;
      const double d = act.probs[k] - target;
      total += d * d;
      dp[k] = 2.0 * d;
    }
    std::vector<double> dz = softmax_backward(act.probs, dp);

    for (std::size_t li = layers_.size(); li-- > 0;) {
      const auto& layer = layers_[li];
      const std::vector<double>& h_prev = (li == 0) ? act.h0 : act.post[li - 1];
      std::vector<double> dh(static_cast<std::size_t>(layer.in), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double g = dz[static_cast<std::size_t>(o)];
        const std::size_t row = layer.w_offset + static_cast<std::size_t>(o) * layer.in;
        grad[layer.b_offset + o] += g;
        for (int i = 0; i < layer.in; ++i) {
          grad[row + i] += g * h_prev[static_cast<std::size_t>(i)];
          dh[static_cast<std::size_t>(i)] += params_[row + i] * g;
        }
      }
      if (li == 0) {
        dz = std::move(dh);
      } else {
        const auto& prev_layer = layers_[li - 1];
        if (prev_layer.relu)
          for (std::size_t i = 0; i < dh.size(); ++i)
            if (act.pre[li - 1][i] <= 0.0) dh[i] = 0.0;
        dz = std::move(dh);
      }
    }

    if (attention_) {
      // h0 = a .* x with a = softmax(attn_z)
      std::vector<double> da(static_cast<std::size_t>(input_dim_));
      for (int i = 0; i < input_dim_; ++i)
        da[static_cast<std::size_t>(i)] = dz[static_cast<std::size_t>(i)] * x[s][static_cast<std::size_t>(i)];
      const std::vector<double> dza = softmax_backward(act.attn_a, da);
      for (int i = 0; i < input_dim_; ++i) {
        const double g = dza[static_cast<std::size_t>(i)];
        grad[attn_b_ + i] += g;
        const std::size_t row = attn_w_ + static_cast<std::size_t>(i) * input_dim_;
        for (int j = 0; j < input_dim_; ++j) grad[row + j] += g * x[s][static_cast<std::size_t>(j)];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (double& g : grad) g *= inv_n;
  return total * inv_n;
}

ErrorTrace train_probe(const Dataset& ds, const ProbeConfig& cfg, const LabelFlipSchedule* flips) {
  cfg.validate();
  if (ds.rows.empty()) throw DataError("train_probe: dataset is empty");
  {
    std::vector<std::size_t> counts(ds.schema.n_classes(), 0);
    for (const auto& row : ds.rows) ++counts[static_cast<std::size_t>(row.label)];
    for (std::size_t k = 0; k < counts.size(); ++k)
      if (counts[k] == 0)
        throw DataError("train_probe: class has zero training rows: " + ds.schema.classes[k]);
  }

  const FeatureEncoder encoder = FeatureEncoder::fit(ds);
  const auto X = encoder.encode_all(ds);
  std::vector<int> labels;
  labels.reserve(ds.rows.size());
  for (const auto& row : ds.rows) labels.push_back(row.label);

  ProbeNetwork net(static_cast<int>(encoder.dimension()),
                   static_cast<int>(ds.schema.n_classes()), cfg);

  std::vector<double> m(net.n_parameters(), 0.0);
  std::vector<double> v(net.n_parameters(), 0.0);
  std::vector<double> grad;
  long step = 0;

  ErrorTrace trace;
  trace.errors.assign(ds.rows.size(), std::vector<double>(static_cast<std::size_t>(cfg.epochs), 0.0));
  trace.phases = phase_boundaries(cfg.epochs);

  const std::size_t n = ds.rows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (flips && epoch == flips->from_epoch)
      for (const auto& [row, new_class] : flips->flips) {
        if (row >= n || new_class < 0 || new_class >= net.n_classes())
          throw DataError("label flip schedule references an invalid row or class");
        labels[row] = new_class;
      }

    Rng rng(Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::vector<double>> bx;
      std::vector<int> by;
      bx.reserve(end - start);
      by.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(X[order[i]]);
        by.push_back(labels[order[i]]);
      }
      net.batch_gradient(bx, by, grad);
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      auto& params = net.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) {
        m[p] = cfg.beta1 * m[p] + (1.0 - cfg.beta1) * grad[p];
        v[p] = cfg.beta2 * v[p] + (1.0 - cfg.beta2) * grad[p] * grad[p];
        params[p] -= cfg.learning_rate * (m[p] / bc1) / (std::sqrt(v[p] / bc2) + cfg.adam_epsilon);
      }
    }

    double epoch_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = net.predict(X[i]);
      double err = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double target = (static_cast<int>(k) == labels[i]) ? 1.0 : 0.0;
        err += (p[k] - target) * (p[k] - target);
      }
      trace.errors[i][static_cast<std::size_t>(epoch - 1)] = err;
      epoch_loss += err;
    }
    if (!std::isfinite(epoch_loss))
      throw DataError("train_probe: training loss became non-finite at epoch " +
                      std::to_string(epoch) + "; the learning rate may be too high");
  }
  return trace;
}

VarianceScore per_sample_variance(const ErrorTrace& trace) {
  for (const auto& [begin, end] : trace.phases)
    if (end <= begin) throw DataError("per_sample_variance: a training phase is empty");

  VarianceScore scores;
  scores.values.reserve(trace.errors.size());
  for (const auto& errs : trace.errors) {
    double total = 0.0;
    for (const auto& [begin, end] : trace.phases) {
      const double len = static_cast<double>(end - begin);
      double mean = 0.0;
      for (int t = begin; t < end; ++t) mean += errs[static_cast<std::size_t>(t)];
      mean /= len;
      double var = 0.0;
      for (int t = begin; t < end; ++t) {
        const double d = errs[static_cast<std::size_t>(t)] - mean;
        var += d * d;
      }
      total += var / len;
    }
    scores.values.push_back(total);
  }
  return scores;
}

CoreSet select_coreset(const Dataset& ds, const VarianceScore& scores, std::size_t k) {
  if (k < 1) throw ConfigError("coreset size K must be >= 1");
  if (scores.values.size() != ds.rows.size())
    throw DataError("variance scores do not cover every row");

  CoreSet core;
  core.k = k;
  core.scores = scores.values;
  core.per_class.resize(ds.schema.n_classes());

  std::vector<std::vector<std::size_t>> by_class(ds.schema.n_classes());
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    by_class[static_cast<std::size_t>(ds.rows[i].label)].push_back(i);

  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.empty())
      throw DataError("select_coreset: class has zero rows: " + ds.schema.classes[c]);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (scores.values[a] != scores.values[b]) return scores.values[a] > scores.values[b];
      return a < b;  // ties break by ascending row index
    });
    auto& out = core.per_class[c];
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(members[i % members.size()]);
  }
  return core;
}

Dataset coreset_rows(const Dataset& ds, const CoreSet& core) {
  std::vector<std::size_t> indices;
  for (const auto& cls : core.per_class)
    indices.insert(indices.end(), cls.begin(), cls.end());
  return ds.subset(indices);
}

void export_coreset(const Dataset& ds, const CoreSet& core, const ProbeConfig& cfg,
                    const std::string& csv_path, const std::string& json_path) {
  save_csv(coreset_rows(ds, core), csv_path);

  nlohmann::json j;
  j["k"] = core.k;
  j["config"] = {{"hidden", cfg.hidden},
                 {"attention", cfg.attention},
                 {"learning_rate", cfg.learning_rate},
                 {"batch_size", cfg.batch_size},
                 {"epochs", cfg.epochs},
                 {"beta1", cfg.beta1},
                 {"beta2", cfg.beta2},
                 {"seed", cfg.seed}};
  j["per_class"] = nlohmann::json::object();
  for (std::size_t c = 0; c < core.per_class.size(); ++c) {
    nlohmann::json entries = nlohmann::json::array();
    for (auto idx : core.per_class[c])
      entries.push_back({{"row", idx}, {"variance", core.scores[idx]}});
    j["per_class"][ds.schema.classes[c]] = entries;
  }
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw DataError("cannot write coreset sidecar: " + json_path);
  out << j.dump(2) << "\n";
}

}  // namespace rddg
