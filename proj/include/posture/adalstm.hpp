#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posture/types.hpp"

namespace posture {

/// Weights of one LSTM direction. Gate blocks are stacked in the order
/// input, forget, cell candidate, output; matrices are row-major.
struct LstmDirectionParams {
  std::size_t input = 3;
  std::size_t hidden = 10;
  std::vector<double> w_input;      // 4H x input
  std::vector<double> w_recurrent;  // 4H x H
  std::vector<double> bias;         // 4H

  static LstmDirectionParams zeros(std::size_t input, std::size_t hidden);
};

struct CellState {
  std::vector<double> h;
  std::vector<double> c;
};

/// One step of the standard gated update. Throws NonFinite or ShapeMismatch.
CellState lstm_cell_forward(const LstmDirectionParams& p, std::span<const double> x, std::span<const double> h_prev,
                            std::span<const double> c_prev);

struct NetworkShape {
  std::size_t input = 3;
  std::size_t hidden = 10;
  std::size_t dense1 = 16;
  std::size_t dense2 = 8;
  std::size_t classes = 3;

  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Offsets of every parameter block inside the flat parameter vector.
struct ParamLayout {
  std::size_t fwd_wx, fwd_wh, fwd_b;
  std::size_t bwd_wx, bwd_wh, bwd_b;
  std::size_t d1_w, d1_b, d2_w, d2_b, d3_w, d3_b;
  std::size_t total;
};

ParamLayout layout_for(const NetworkShape& shape);

enum class LrSchedule { StepDecay, Fixed };
enum class LossMode { LengthNormalized, RawSum };

struct AdaLstmConfig {
  std::size_t max_epochs = 100;
  double initial_lr = 0.01;
  double beta1 = 0.9;
  double sq_grad_decay = 0.99;
  double epsilon = 1e-8;
  std::size_t batch_size = 27;
  LrSchedule schedule = LrSchedule::StepDecay;
  double decay_factor = 0.5;
  std::size_t decay_every = 20;
  double clip_norm = 5.0;  // <= 0 disables clipping
  double init_range = 0.3;
  LossMode loss_mode = LossMode::LengthNormalized;

  /// The fixed learning-rate LSTM baseline: same network, schedule off.
  static AdaLstmConfig fixed_lr_baseline();
};

struct AdaLstmModel {
  NetworkShape shape;
  LabelSet label_set;
  AdaLstmConfig config;
  std::vector<double> params;  // flat, see layout_for

  ParamLayout layout() const { return layout_for(shape); }
  enum class Direction { Forward, Backward };
  LstmDirectionParams direction(Direction d) const;
  void set_direction(Direction d, const LstmDirectionParams& p);
};

/// Uniform(-init_range, init_range) weights, forget-gate bias +1, other biases 0.
AdaLstmModel init_model(const LabelSet& label_set, const AdaLstmConfig& config, std::uint64_t seed,
                        NetworkShape shape = {});

/// All-zero parameters; useful for boundary checks.
AdaLstmModel zero_model(const LabelSet& label_set, NetworkShape shape = {});

/// [forward h after the last sample ; backward h after the first sample]. Throws EmptySequence.
std::vector<double> bilstm_forward(const AdaLstmModel& model, std::span<const AccelSample> samples);

/// Softmax class probabilities after the dense stack (label_set order).
std::vector<double> predict_logits(const AdaLstmModel& model, std::span<const AccelSample> samples);

/// Argmax of predict_logits; ties go to the earlier label.
PostureLabel predict(const AdaLstmModel& model, std::span<const AccelSample> samples);
inline PostureLabel predict(const AdaLstmModel& model, const Episode& ep) { return predict(model, ep.samples); }

inline constexpr double kLogClamp = 1e-12;

/// -sum_i sum_j m_i y_ij log(yhat_ij); divided by sum_i m_i unless mode is RawSum.
/// `probs` holds one row of K probabilities per sequence, `labels` the true class indices.
double weighted_cross_entropy(const std::vector<std::vector<double>>& probs, const std::vector<std::size_t>& labels,
                              const std::vector<std::size_t>& lengths, LossMode mode = LossMode::LengthNormalized);

/// Zero-padded mini-batch. padded is (batch x max_len x 3); mask is true exactly on real samples.
struct Batch {
  std::vector<std::size_t> episode_indices;
  std::vector<std::size_t> lengths;
  std::vector<std::size_t> labels;  // class indices
  std::size_t max_len = 0;
  std::vector<double> padded;
  std::vector<std::uint8_t> mask;

  std::size_t size() const { return lengths.size(); }
  std::span<const double> sequence(std::size_t i) const {
    return std::span<const double>(padded).subspan(i * max_len * 3, lengths[i] * 3);
  }
};

/// Builds a batch from explicit sequences (used by tests and by make_minibatches).
Batch make_batch(const std::vector<std::span<const AccelSample>>& sequences, const std::vector<std::size_t>& labels,
                 const std::vector<std::size_t>& episode_indices = {});

/// Length-sorted consecutive groups of at most batch_size; batch order shuffled with the seed.
std::vector<Batch> make_minibatches(const std::vector<Episode>& episodes, const LabelSet& label_set,
                                    std::size_t batch_size, std::uint64_t seed);

double batch_loss(const AdaLstmModel& model, const Batch& batch);

struct GradientResult {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as model.params
};

/// Exact gradient of batch_loss by backpropagation through time in both
/// directions. Padded positions never enter the computation.
GradientResult compute_gradients(const AdaLstmModel& model, const Batch& batch);

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double lr = 0.0;

  static OptimizerState for_params(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0, 0.0}; }
};

/// Bias-corrected Adam step in place. Throws ShapeMismatch.
void adam_update(std::span<double> params, OptimizerState& state, std::span<const double> grads, double beta1,
                 double beta2, double lr, double epsilon = 1e-8);

double lr_schedule(const AdaLstmConfig& config, std::size_t epoch);

struct EpochLog {
  std::size_t epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
};

struct TrainResult {
  AdaLstmModel model;
  std::vector<EpochLog> trace;
  std::vector<std::string> warnings;
};

/// Mini-batch BPTT with Adam under the configured schedule. Deterministic per seed.
/// Throws NonFinite when a gradient blows up.
TrainResult train(AdaLstmModel model, const std::vector<Episode>& episodes, std::uint64_t seed);

/// Length-weighted mean loss over a set of episodes (order independent).
double dataset_loss(const AdaLstmModel& model, const std::vector<Episode>& episodes);

}  // namespace posture
