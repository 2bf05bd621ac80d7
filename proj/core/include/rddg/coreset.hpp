#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rddg/encoding.hpp"
#include "rddg/tabular.hpp"

namespace rddg {

/// Probe network configuration. The architecture is
///   input -> attention -> Block(h1) -> ... -> Block(h_{m-1}) -> Linear(h_m) -> Linear(C)
/// where Block(w) is an affine map followed by ReLU, the last hidden layer
/// is purely affine, and the output head applies softmax.
struct ProbeConfig {
  std::vector<int> hidden = {64, 32, 16, 8};
  bool attention = true;
  double learning_rate = 0.001;
  int batch_size = 64;
  int epochs = 100;
  double beta1 = 0.5;   // Adam first-moment coefficient
  double beta2 = 0.9;   // Adam second-moment coefficient
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-sample, per-epoch squared L2 error between the softmax output and
/// the one-hot target, plus the early/mid/late phase boundaries. Phases are
/// equal thirds of the epoch range with the remainder on the late phase.
struct ErrorTrace {
  std::vector<std::vector<double>> errors;          // [sample][epoch]
  std::array<std::pair<int, int>, 3> phases{};      // half-open [begin, end), 0-based epochs

  int n_epochs() const { return errors.empty() ? 0 : static_cast<int>(errors[0].size()); }
};

std::array<std::pair<int, int>, 3> phase_boundaries(int epochs);

struct VarianceScore {
  std::vector<double> values;  // Var_i per training row
};

/// Class-balanced top-K selection result; every class contributes exactly K
/// entries (cycled in descending-score order when the class is smaller).
struct CoreSet {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> per_class;
  std::vector<double> scores;  // Var_i per row, as used for selection
};

/// Optional mid-training label noise injection: from `from_epoch` (1-based)
/// onward the listed rows train against, and are scored against, the new
/// class. Used to study which samples the variance criterion surfaces.
struct LabelFlipSchedule {
  int from_epoch = 1;
  std::vector<std::pair<std::size_t, int>> flips;  // row index -> new class index
};

/// Feed-forward probe with a feature-wise soft attention front layer
/// (a = softmax(W x + b), h = a .* x). Parameters live in one flat vector
/// so finite-difference checks and Adam touch every weight uniformly.
class ProbeNetwork {
 public:
  ProbeNetwork(int input_dim, int n_classes, const ProbeConfig& cfg);

  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  std::size_t n_parameters() const { return params_.size(); }

  /// Class probabilities for one encoded sample.
  std::vector<double> predict(const std::vector<double>& x) const;

  /// Mean squared-L2 loss over a batch of encoded samples.
  double batch_loss(const std::vector<std::vector<double>>& x, const std::vector<int>& y) const;

  /// Mean loss and its gradient with respect to every parameter.
  double batch_gradient(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        std::vector<double>& grad) const;

  int input_dim() const { return input_dim_; }
  int n_classes() const { return n_classes_; }

 private:
  struct Layer {
    std::size_t w_offset;
    std::size_t b_offset;
    int in;
    int out;
    bool relu;
  };

  int input_dim_;
  int n_classes_;
  bool attention_;
  std::size_t attn_w_ = 0;
  std::size_t attn_b_ = 0;
  std::vector<Layer> layers_;
  std::vector<double> params_;

  struct Activations;
  void forward(const std::vector<double>& x, Activations& act) const;
};

/// Trains the probe and records the full error trace. Deterministic given
/// the config seed; encoding is one-hot categoricals plus z-scored numerics.
ErrorTrace train_probe(const Dataset& ds, const ProbeConfig& cfg,
                       const LabelFlipSchedule* flips = nullptr);

/// Var_i = sum over the three phases of the within-phase population
/// variance of sample i's errors.
VarianceScore per_sample_variance(const ErrorTrace& trace);

/// Per class, the K rows with the highest Var_i (ties break by ascending
/// row index); classes smaller than K repeat cyclically.
CoreSet select_coreset(const Dataset& ds, const VarianceScore& scores, std::size_t k);

/// Selected rows as a dataset, classes in order, each class block in
/// descending-score order.
Dataset coreset_rows(const Dataset& ds, const CoreSet& core);

/// CSV of the selected rows plus a JSON sidecar with scores and config.
void export_coreset(const Dataset& ds, const CoreSet& core, const ProbeConfig& cfg,
                    const std::string& csv_path, const std::string& json_path);

}  // namespace rddg
