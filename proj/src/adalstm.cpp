#include "posture/adalstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "posture/rng.hpp"

namespace posture {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

/// Activated gates (i, f, g, o) plus new state for one step.
/// gates has 4H entries; c_prev/h_prev/c/h have H entries.
void cell_step(const double* wx, const double* wh, const double* b, std::size_t in, std::size_t hid, const double* x,
               const double* h_prev, const double* c_prev, double* gates, double* c, double* h, double* tanh_c) {
  const std::size_t rows = 4 * hid;
  for (std::size_t r = 0; r < rows; ++r) {
    double z = b[r];
    const double* wxr = wx + r * in;
    for (std::size_t k = 0; k < in; ++k) z += wxr[k] * x[k];
    const double* whr = wh + r * hid;
    for (std::size_t k = 0; k < hid; ++k) z += whr[k] * h_prev[k];
    gates[r] = z;
  }
  for (std::size_t j = 0; j < hid; ++j) {
    const double ig = sigmoid(gates[j]);
    const double fg = sigmoid(gates[hid + j]);
    const double gg = std::tanh(gates[2 * hid + j]);
    const double og = sigmoid(gates[3 * hid + j]);
    gates[j] = ig;
    gates[hid + j] = fg;
    gates[2 * hid + j] = gg;
    gates[3 * hid + j] = og;
    c[j] = fg * c_prev[j] + ig * gg;
    tanh_c[j] = std::tanh(c[j]);
    h[j] = og * tanh_c[j];
  }
}

/// Per-direction forward cache. Step s reads input (reverse ? T-1-s : s);
/// state index s+1 holds the state after step s, index 0 the zero state.
struct DirectionCache {
  std::size_t steps = 0;
  std::vector<double> gates;   // steps x 4H
  std::vector<double> c;       // (steps+1) x H
  std::vector<double> h;       // (steps+1) x H
  std::vector<double> tanh_c;  // steps x H

  void reset(std::size_t t, std::size_t hid) {
    steps = t;
    gates.assign(t * 4 * hid, 0.0);
    c.assign((t + 1) * hid, 0.0);
    h.assign((t + 1) * hid, 0.0);
    tanh_c.assign(t * hid, 0.0);
  }
};

struct Workspace {
  DirectionCache fwd, bwd;
  std::vector<double> readout, a1, z1, a2, z2, logits, probs;
};

const double* input_at(std::span<const double> seq, std::size_t steps, std::size_t s, bool reverse,
                       std::size_t in) {
  const std::size_t t = reverse ? steps - 1 - s : s;
  return seq.data() + t * in;
}

void run_direction(const double* params, std::size_t wx, std::size_t wh, std::size_t b, const NetworkShape& sh,
                   std::span<const double> seq, bool reverse, DirectionCache& cache) {
  const std::size_t steps = seq.size() / sh.input;
  const std::size_t hid = sh.hidden;
  cache.reset(steps, hid);
  for (std::size_t s = 0; s < steps; ++s) {
    cell_step(params + wx, params + wh, params + b, sh.input, hid, input_at(seq, steps, s, reverse, sh.input),
              cache.h.data() + s * hid, cache.c.data() + s * hid, cache.gates.data() + s * 4 * hid,
              cache.c.data() + (s + 1) * hid, cache.h.data() + (s + 1) * hid, cache.tanh_c.data() + s * hid);
  }
}

void affine(const double* w, const double* b, std::size_t out, std::size_t in, const double* x, double* y) {
  for (std::size_t r = 0; r < out; ++r) {
    double acc = b[r];
    const double* wr = w + r * in;
    for (std::size_t k = 0; k < in; ++k) acc += wr[k] * x[k];
    y[r] = acc;
  }
}

void softmax(const std::vector<double>& logits, std::vector<double>& probs) {
  probs.resize(logits.size());
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    probs[k] = std::exp(logits[k] - mx);
    sum += probs[k];
  }
  for (auto& p : probs) p /= sum;
}

/// Full forward pass for one sequence; leaves every intermediate in ws.
void forward_sequence(const AdaLstmModel& model, const ParamLayout& L, std::span<const double> seq, Workspace& ws) {
  const NetworkShape& sh = model.shape;
  const double* p = model.params.data();
  if (seq.empty()) throw Error(Errc::EmptySequence, "sequence has no samples");
  run_direction(p, L.fwd_wx, L.fwd_wh, L.fwd_b, sh, seq, false, ws.fwd);
  run_direction(p, L.bwd_wx, L.bwd_wh, L.bwd_b, sh, seq, true, ws.bwd);

  const std::size_t hid = sh.hidden;
  ws.readout.resize(2 * hid);
  std::copy_n(ws.fwd.h.data() + ws.fwd.steps * hid, hid, ws.readout.begin());
  std::copy_n(ws.bwd.h.data() + ws.bwd.steps * hid, hid, ws.readout.begin() + static_cast<std::ptrdiff_t>(hid));

  ws.a1.resize(sh.dense1);
  ws.z1.resize(sh.dense1);
  affine(p + L.d1_w, p + L.d1_b, sh.dense1, 2 * hid, ws.readout.data(), ws.a1.data());
  for (std::size_t k = 0; k < sh.dense1; ++k) ws.z1[k] = std::tanh(ws.a1[k]);
  ws.a2.resize(sh.dense2);
  ws.z2.resize(sh.dense2);
  affine(p + L.d2_w, p + L.d2_b, sh.dense2, sh.dense1, ws.z1.data(), ws.a2.data());
  for (std::size_t k = 0; k < sh.dense2; ++k) ws.z2[k] = std::tanh(ws.a2[k]);
  ws.logits.resize(sh.classes);
  affine(p + L.d3_w, p + L.d3_b, sh.classes, sh.dense2, ws.z2.data(), ws.logits.data());
  softmax(ws.logits, ws.probs);
}

void backprop_direction(const double* params, double* grad, std::size_t wx, std::size_t wh, std::size_t b,
                        const NetworkShape& sh, std::span<const double> seq, bool reverse,
                        const DirectionCache& cache, std::span<const double> dh_last) {
  const std::size_t hid = sh.hidden, in = sh.input, steps = cache.steps;
  std::vector<double> dh(dh_last.begin(), dh_last.end());
  std::vector<double> dc(hid, 0.0), dz(4 * hid), dh_prev(hid);
  const double* whp = params + wh;
  for (std::size_t s = steps; s-- > 0;) {
    const double* g = cache.gates.data() + s * 4 * hid;
    const double* c_prev = cache.c.data() + s * hid;
    const double* h_prev = cache.h.data() + s * hid;
    const double* tc = cache.tanh_c.data() + s * hid;
    for (std::size_t j = 0; j < hid; ++j) {
      const double ig = g[j], fg = g[hid + j], gg = g[2 * hid + j], og = g[3 * hid + j];
      const double d_o = dh[j] * tc[j];
      dc[j] += dh[j] * og * (1.0 - tc[j] * tc[j]);
      dz[j] = dc[j] * gg * ig * (1.0 - ig);
      dz[hid + j] = dc[j] * c_prev[j] * fg * (1.0 - fg);
      dz[2 * hid + j] = dc[j] * ig * (1.0 - gg * gg);
      dz[3 * hid + j] = d_o * og * (1.0 - og);
      dc[j] *= fg;
    }
    const double* x = input_at(seq, steps, s, reverse, in);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t r = 0; r < 4 * hid; ++r) {
      const double d = dz[r];
      grad[b + r] += d;
      double* gwx = grad + wx + r * in;
      for (std::size_t k = 0; k < in; ++k) gwx[k] += d * x[k];
      double* gwh = grad + wh + r * hid;
      const double* whr = whp + r * hid;
      for (std::size_t k = 0; k < hid; ++k) {
        gwh[k] += d * h_prev[k];
        dh_prev[k] += whr[k] * d;
      }
    }
    dh.swap(dh_prev);
  }
}

/// Accumulates weight * d(-log p_label)/d(theta) into grad; returns -log p_label (clamped).
double backward_sequence(const AdaLstmModel& model, const ParamLayout& L, std::span<const double> seq,
                         std::size_t label, double weight, const Workspace& ws, double* grad) {
  const NetworkShape& sh = model.shape;
  const double* p = model.params.data();
  const double py = ws.probs[label];
  const double nll = -std::log(std::max(py, kLogClamp));
  if (py <= kLogClamp) return nll;  // clamped region has zero slope

  std::vector<double> dlogits(sh.classes);
  for (std::size_t k = 0; k < sh.classes; ++k) dlogits[k] = weight * (ws.probs[k] - (k == label ? 1.0 : 0.0));

  // dense 3
  std::vector<double> dz2(sh.dense2, 0.0);
  for (std::size_t r = 0; r < sh.classes; ++r) {
    grad[L.d3_b + r] += dlogits[r];
    for (std::size_t k = 0; k < sh.dense2; ++k) {
      grad[L.d3_w + r * sh.dense2 + k] += dlogits[r] * ws.z2[k];
      dz2[k] += p[L.d3_w + r * sh.dense2 + k] * dlogits[r];
    }
  }
  // dense 2
  std::vector<double> dz1(sh.dense1, 0.0);
  for (std::size_t r = 0; r < sh.dense2; ++r) {
    const double da = dz2[r] * (1.0 - ws.z2[r] * ws.z2[r]);
    grad[L.d2_b + r] += da;
    for (std::size_t k = 0; k < sh.dense1; ++k) {
      grad[L.d2_w + r * sh.dense1 + k] += da * ws.z1[k];
      dz1[k] += p[L.d2_w + r * sh.dense1 + k] * da;
    }
  }
  // dense 1
  const std::size_t rin = 2 * sh.hidden;
  std::vector<double> dread(rin, 0.0);
  for (std::size_t r = 0; r < sh.dense1; ++r) {
    const double da = dz1[r] * (1.0 - ws.z1[r] * ws.z1[r]);
    grad[L.d1_b + r] += da;
    for (std::size_t k = 0; k < rin; ++k) {
      grad[L.d1_w + r * rin + k] += da * ws.readout[k];
      dread[k] += p[L.d1_w + r * rin + k] * da;
    }
  }
  const std::span<const double> dr(dread);
  backprop_direction(p, grad, L.fwd_wx, L.fwd_wh, L.fwd_b, sh, seq, false, ws.fwd, dr.first(sh.hidden));
  backprop_direction(p, grad, L.bwd_wx, L.bwd_wh, L.bwd_b, sh, seq, true, ws.bwd, dr.subspan(sh.hidden));
  return nll;
}

std::vector<double> flatten(std::span<const AccelSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size() * 3);
  for (const auto& s : samples) {
    if (!s.finite()) throw Error(Errc::NonFinite, "non-finite input sample");
    out.push_back(s.x);
    out.push_back(s.y);
    out.push_back(s.z);
  }
  return out;
}

double total_length(const Batch& batch) {
  double total = 0.0;
  for (std::size_t m : batch.lengths) total += static_cast<double>(m);
  return total;
}

void check_batch(const AdaLstmModel& model, const Batch& batch) {
  if (model.params.size() != model.layout().total) {
    throw Error(Errc::ShapeMismatch, "parameter vector does not match the network shape");
  }
  if (model.shape.input != 3) throw Error(Errc::ShapeMismatch, "batches carry tri-axial input");
  if (batch.labels.size() != batch.lengths.size()) {
    throw Error(Errc::DimensionMismatch, "batch labels and lengths differ in size");
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.lengths[i] == 0) throw Error(Errc::EmptySequence, "zero-length sequence in batch");
    if (batch.labels[i] >= model.shape.classes) throw Error(Errc::UnknownLabel, "class index out of range");
  }
}

}  // namespace

LstmDirectionParams LstmDirectionParams::zeros(std::size_t input, std::size_t hidden) {
  return {input, hidden, std::vector<double>(4 * hidden * input, 0.0), std::vector<double>(4 * hidden * hidden, 0.0),
          std::vector<double>(4 * hidden, 0.0)};
}

CellState lstm_cell_forward(const LstmDirectionParams& p, std::span<const double> x, std::span<const double> h_prev,
                            std::span<const double> c_prev) {
  const std::size_t hid = p.hidden;
  if (x.size() != p.input || h_prev.size() != hid || c_prev.size() != hid ||
      p.w_input.size() != 4 * hid * p.input || p.w_recurrent.size() != 4 * hid * hid || p.bias.size() != 4 * hid) {
    throw Error(Errc::ShapeMismatch, "LSTM cell operands do not match the parameter shapes");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(Errc::NonFinite, "non-finite cell input");
  }
  for (std::size_t j = 0; j < hid; ++j) {
    if (!std::isfinite(h_prev[j]) || !std::isfinite(c_prev[j])) throw Error(Errc::NonFinite, "non-finite cell state");
  }
  CellState out{std::vector<double>(hid), std::vector<double>(hid)};
  std::vector<double> gates(4 * hid), tanh_c(hid);
  cell_step(p.w_input.data(), p.w_recurrent.data(), p.bias.data(), p.input, hid, x.data(), h_prev.data(),
            c_prev.data(), gates.data(), out.c.data(), out.h.data(), tanh_c.data());
  return out;
}

ParamLayout layout_for(const NetworkShape& sh) {
  ParamLayout L{};
  std::size_t off = 0;
  const auto take = [&](std::size_t n) {
    const std::size_t at = off;
    off += n;
    return at;
  };
  const std::size_t g = 4 * sh.hidden;
  L.fwd_wx = take(g * sh.input);
  L.fwd_wh = take(g * sh.hidden);
  L.fwd_b = take(g);
  L.bwd_wx = take(g * sh.input);
  L.bwd_wh = take(g * sh.hidden);
  L.bwd_b = take(g);
  L.d1_w = take(sh.dense1 * 2 * sh.hidden);
  L.d1_b = take(sh.dense1);
  L.d2_w = take(sh.dense2 * sh.dense1);
  L.d2_b = take(sh.dense2);
  L.d3_w = take(sh.classes * sh.dense2);
  L.d3_b = take(sh.classes);
  L.total = off;
  return L;
}

AdaLstmConfig AdaLstmConfig::fixed_lr_baseline() {
  AdaLstmConfig c;
  c.schedule = LrSchedule::Fixed;
  return c;
}

LstmDirectionParams AdaLstmModel::direction(Direction d) const {
  const ParamLayout L = layout();
  const bool fwd = d == Direction::Forward;
  const std::size_t wx = fwd ? L.fwd_wx : L.bwd_wx, wh = fwd ? L.fwd_wh : L.bwd_wh, b = fwd ? L.fwd_b : L.bwd_b;
  const std::size_t g = 4 * shape.hidden;
  const auto slice = [&](std::size_t at, std::size_t n) {
    return std::vector<double>(params.begin() + static_cast<std::ptrdiff_t>(at),
                               params.begin() + static_cast<std::ptrdiff_t>(at + n));
  };
  return {shape.input, shape.hidden, slice(wx, g * shape.input), slice(wh, g * shape.hidden), slice(b, g)};
}

void AdaLstmModel::set_direction(Direction d, const LstmDirectionParams& p) {
  if (p.input != shape.input || p.hidden != shape.hidden) throw Error(Errc::ShapeMismatch, "direction shape differs");
  const ParamLayout L = layout();
  const bool fwd = d == Direction::Forward;
  std::copy(p.w_input.begin(), p.w_input.end(), params.begin() + static_cast<std::ptrdiff_t>(fwd ? L.fwd_wx : L.bwd_wx));
  std::copy(p.w_recurrent.begin(), p.w_recurrent.end(),
            params.begin() + static_cast<std::ptrdiff_t>(fwd ? L.fwd_wh : L.bwd_wh));
  std::copy(p.bias.begin(), p.bias.end(), params.begin() + static_cast<std::ptrdiff_t>(fwd ? L.fwd_b : L.bwd_b));
}

AdaLstmModel zero_model(const LabelSet& label_set, NetworkShape shape) {
  if (label_set.empty()) throw Error(Errc::UnknownClassCount, "empty label set");
  shape.classes = label_set.size();
  AdaLstmModel m;
  m.shape = shape;
  m.label_set = label_set;
  m.params.assign(layout_for(shape).total, 0.0);
  return m;
}

AdaLstmModel init_model(const LabelSet& label_set, const AdaLstmConfig& config, std::uint64_t seed,
                        NetworkShape shape) {
  AdaLstmModel m = zero_model(label_set, shape);
  m.config = config;
  const ParamLayout L = m.layout();
  Rng rng(seed);
  for (auto& w : m.params) w = rng.uniform(-config.init_range, config.init_range);
  const std::size_t hid = m.shape.hidden;
  for (std::size_t b : {L.fwd_b, L.bwd_b}) {
    for (std::size_t r = 0; r < 4 * hid; ++r) m.params[b + r] = (r >= hid && r < 2 * hid) ? 1.0 : 0.0;
  }
  for (auto [b, n] : {std::pair{L.d1_b, m.shape.dense1}, std::pair{L.d2_b, m.shape.dense2},
                      std::pair{L.d3_b, m.shape.classes}}) {
    std::fill_n(m.params.begin() + static_cast<std::ptrdiff_t>(b), n, 0.0);
  }
  return m;
}

std::vector<double> bilstm_forward(const AdaLstmModel& model, std::span<const AccelSample> samples) {
  if (samples.empty()) throw Error(Errc::EmptySequence, "sequence has no samples");
  const auto seq = flatten(samples);
  Workspace ws;
  forward_sequence(model, model.layout(), seq, ws);
  return ws.readout;
}

std::vector<double> predict_logits(const AdaLstmModel& model, std::span<const AccelSample> samples) {
  if (samples.empty()) throw Error(Errc::EmptySequence, "sequence has no samples");
  const auto seq = flatten(samples);
  Workspace ws;
  forward_sequence(model, model.layout(), seq, ws);
  return ws.probs;
}

PostureLabel predict(const AdaLstmModel& model, std::span<const AccelSample> samples) {
  const auto probs = predict_logits(model, samples);
  const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
  return model.label_set[static_cast<std::size_t>(best)];
}

double weighted_cross_entropy(const std::vector<std::vector<double>>& probs, const std::vector<std::size_t>& labels,
                              const std::vector<std::size_t>& lengths, LossMode mode) {
  if (probs.size() != labels.size() || probs.size() != lengths.size()) {
    throw Error(Errc::DimensionMismatch, "predictions, labels and lengths differ in size");
  }
  double loss = 0.0, total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] >= probs[i].size()) throw Error(Errc::DimensionMismatch, "label outside prediction row");
    const double m = static_cast<double>(lengths[i]);
    loss -= m * std::log(std::max(probs[i][labels[i]], kLogClamp));
    total += m;
  }
  if (mode == LossMode::RawSum || total == 0.0) return loss;
  return loss / total;
}

Batch make_batch(const std::vector<std::span<const AccelSample>>& sequences, const std::vector<std::size_t>& labels,
                 const std::vector<std::size_t>& episode_indices) {
  if (sequences.size() != labels.size()) throw Error(Errc::DimensionMismatch, "sequences and labels differ in size");
  Batch b;
  b.labels = labels;
  b.episode_indices = episode_indices;
  if (b.episode_indices.empty()) {
    b.episode_indices.resize(sequences.size());
    std::iota(b.episode_indices.begin(), b.episode_indices.end(), 0);
  }
  for (const auto& s : sequences) {
    if (s.empty()) throw Error(Errc::EmptySequence, "zero-length sequence");
    b.lengths.push_back(s.size());
    b.max_len = std::max(b.max_len, s.size());
  }
  b.padded.assign(sequences.size() * b.max_len * 3, 0.0);
  b.mask.assign(sequences.size() * b.max_len, 0);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    for (std::size_t t = 0; t < sequences[i].size(); ++t) {
      const AccelSample& s = sequences[i][t];
      double* dst = b.padded.data() + (i * b.max_len + t) * 3;
      dst[0] = s.x;
      dst[1] = s.y;
      dst[2] = s.z;
      b.mask[i * b.max_len + t] = 1;
    }
  }
  return b;
}

std::vector<Batch> make_minibatches(const std::vector<Episode>& episodes, const LabelSet& label_set,
                                    std::size_t batch_size, std::uint64_t seed) {
  if (episodes.empty()) throw Error(Errc::EmptyDataset, "no episodes to batch");
  if (batch_size < 1) throw Error(Errc::InvalidArgument, "batch size must be positive");
  std::vector<std::size_t> order(episodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return episodes[a].size() < episodes[b].size(); });

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::vector<std::span<const AccelSample>> seqs;
    std::vector<std::size_t> labels, idx;
    for (std::size_t k = start; k < end; ++k) {
      const Episode& ep = episodes[order[k]];
      seqs.emplace_back(ep.samples);
      labels.push_back(label_index(label_set, ep.label));
      idx.push_back(order[k]);
    }
    batches.push_back(make_batch(seqs, labels, idx));
  }
  Rng rng(seed);
  rng.shuffle(batches);
  return batches;
}

double batch_loss(const AdaLstmModel& model, const Batch& batch) {
  check_batch(model, batch);
  const ParamLayout L = model.layout();
  Workspace ws;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    forward_sequence(model, L, batch.sequence(i), ws);
    loss -= static_cast<double>(batch.lengths[i]) * std::log(std::max(ws.probs[batch.labels[i]], kLogClamp));
  }
  return model.config.loss_mode == LossMode::RawSum ? loss : loss / total_length(batch);
}

GradientResult compute_gradients(const AdaLstmModel& model, const Batch& batch) {
  check_batch(model, batch);
  const ParamLayout L = model.layout();
  GradientResult out;
  out.grad.assign(L.total, 0.0);
  const double norm = model.config.loss_mode == LossMode::RawSum ? 1.0 : total_length(batch);
  Workspace ws;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto seq = batch.sequence(i);
    forward_sequence(model, L, seq, ws);
    const double w = static_cast<double>(batch.lengths[i]) / norm;
    out.loss += w * backward_sequence(model, L, seq, batch.labels[i], w, ws, out.grad.data());
  }
  for (double g : out.grad) {
    if (!std::isfinite(g)) throw Error(Errc::NonFinite, "non-finite gradient; training aborted");
  }
  return out;
}

void adam_update(std::span<double> params, OptimizerState& state, std::span<const double> grads, double beta1,
                 double beta2, double lr, double epsilon) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(Errc::ShapeMismatch, "optimizer state, parameters and gradients differ in size");
  }
  state.step++;
  state.lr = lr;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(beta1, t);
  const double c2 = 1.0 - std::pow(beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double g = grads[k];
    state.m[k] = beta1 * state.m[k] + (1.0 - beta1) * g;
    state.v[k] = beta2 * state.v[k] + (1.0 - beta2) * g * g;
    const double m_hat = state.m[k] / c1;
    const double v_hat = state.v[k] / c2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

double lr_schedule(const AdaLstmConfig& config, std::size_t epoch) {
  if (config.schedule == LrSchedule::Fixed || config.decay_every == 0) return config.initial_lr;
  return config.initial_lr * std::pow(config.decay_factor, static_cast<double>(epoch / config.decay_every));
}

double dataset_loss(const AdaLstmModel& model, const std::vector<Episode>& episodes) {
  const ParamLayout L = model.layout();
  Workspace ws;
  double loss = 0.0, total = 0.0;
  for (const auto& ep : episodes) {
    const auto seq = flatten(ep.samples);
    forward_sequence(model, L, seq, ws);
    const double m = static_cast<double>(ep.size());
    loss -= m * std::log(std::max(ws.probs[label_index(model.label_set, ep.label)], kLogClamp));
    total += m;
  }
  return total > 0.0 ? loss / total : 0.0;
}

TrainResult train(AdaLstmModel model, const std::vector<Episode>& episodes, std::uint64_t seed) {
  if (episodes.empty()) throw Error(Errc::EmptyDataset, "no training episodes");
  TrainResult result;
  for (PostureLabel l : model.label_set) {
    const bool present = std::any_of(episodes.begin(), episodes.end(), [&](const Episode& e) { return e.label == l; });
    if (!present) result.warnings.push_back("no training episode for class " + std::string(to_string(l)));
  }
  const AdaLstmConfig& cfg = model.config;
  OptimizerState state = OptimizerState::for_params(model.params.size());

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = lr_schedule(cfg, epoch);
    const auto batches = make_minibatches(episodes, model.label_set, cfg.batch_size, derive_seed(seed, epoch));
    double weighted = 0.0, total = 0.0;
    for (const auto& batch : batches) {
      GradientResult g = compute_gradients(model, batch);
      const double len = total_length(batch);
      weighted += cfg.loss_mode == LossMode::RawSum ? g.loss : g.loss * len;
      total += len;
      if (cfg.clip_norm > 0.0) {
        double sq = 0.0;
        for (double v : g.grad) sq += v * v;
        const double n = std::sqrt(sq);
        if (n > cfg.clip_norm) {
          for (double& v : g.grad) v *= cfg.clip_norm / n;
        }
      }
      adam_update(model.params, state, g.grad, cfg.beta1, cfg.sq_grad_decay, lr, cfg.epsilon);
    }
    result.trace.push_back({epoch, lr, weighted / total});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace posture
