#include "vws/nn/train.hpp"

#include <algorithm>
#include <cmath>

#include "vws/error.hpp"
#include "vws/nn/optimizer.hpp"
#include "vws/rng.hpp"

namespace vws::nn {

namespace {

struct ChannelStats {
  double mean = 0.0;
  double std = 1.0;
};

ChannelStats fit_channel(const std::vector<double>& data) {
  ChannelStats s;
  const double n = static_cast<double>(data.size());
  double acc = 0.0;
  for (const double v : data) acc += v;
  s.mean = acc / n;
  double sq = 0.0;
  for (const double v : data) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / n);
  if (s.std < 1e-12) s.std = 1.0;
  return s;
}

}  // namespace

Normalization Normalization::fit(const SignalFrame& train_frame) {
  Normalization norm;
  for (const char* name : channels::kModelInputs) {
    const ChannelStats s = fit_channel(train_frame.channel(name));
    norm.in_mean.push_back(s.mean);
    norm.in_std.push_back(s.std);
  }
  for (const char* name : channels::kModelTargets) {
    const ChannelStats s = fit_channel(train_frame.channel(name));
    norm.out_mean.push_back(s.mean);
    norm.out_std.push_back(s.std);
  }
  return norm;
}

Sequence Normalization::inputs(const SignalFrame& frame) const {
  const std::size_t n = frame.length();
  Sequence seq = Sequence::zeros(n, channels::kModelInputs.size());
  for (std::size_t c = 0; c < channels::kModelInputs.size(); ++c) {
    const auto& data = frame.channel(channels::kModelInputs[c]);
    for (std::size_t t = 0; t < n; ++t)
      seq.values[t * seq.dim + c] = (data[t] - in_mean[c]) / in_std[c];
  }
  return seq;
}

Sequence Normalization::targets(const SignalFrame& frame) const {
  const std::size_t n = frame.length();
  Sequence seq = Sequence::zeros(n, channels::kModelTargets.size());
  for (std::size_t c = 0; c < channels::kModelTargets.size(); ++c) {
    const auto& data = frame.channel(channels::kModelTargets[c]);
    for (std::size_t t = 0; t < n; ++t)
      seq.values[t * seq.dim + c] = (data[t] - out_mean[c]) / out_std[c];
  }
  return seq;
}

void TrainConfig::validate() const {
  require(window >= 2, "invalid-train-config", "window must be >= 2");
  require(washout < window, "invalid-train-config", "washout must be < window");
  require(batch_size >= 1, "invalid-train-config", "batch_size must be >= 1");
  require(max_epochs >= 1, "invalid-train-config", "max_epochs must be >= 1");
  require(lr_max > 0.0 && lr_min >= 0.0 && lr_min <= lr_max, "invalid-train-config",
          "learning rates must satisfy 0 <= lr_min <= lr_max");
}

TrainResult train(const ModelSpec& spec, const TrainConfig& cfg, const SignalFrame& train_frame,
                  const SignalFrame& val_frame, const EpochCallback& callback) {
  spec.validate();
  cfg.validate();
  train_frame.validate();
  val_frame.validate();
  if (spec.arch == Arch::kTcn)
    require(spec.receptive_field() <= cfg.window, "invalid-train-config",
            "receptive field exceeds the window");

  TrainResult result;
  result.norm = Normalization::fit(train_frame);

  const Sequence train_x = result.norm.inputs(train_frame);
  const Sequence train_y = result.norm.targets(train_frame);
  const Sequence val_x = result.norm.inputs(val_frame);
  const Sequence val_y = result.norm.targets(val_frame);

  // Window starts, 50% overlap, confined to maneuver segments.
  std::vector<std::size_t> windows;
  for (const auto& seg : train_frame.segments) {
    require(seg.size() >= cfg.window, "window-exceeds-maneuver",
            seg.maneuver_id + " has " + std::to_string(seg.size()) + " samples");
    for (std::size_t start = seg.begin; start + cfg.window <= seg.end; start += cfg.window / 2)
      windows.push_back(start);
  }
  require(!windows.empty(), "window-exceeds-maneuver", "no trainable windows");

  std::vector<double> weights = init_weights(spec);
  std::vector<double> grad(weights.size(), 0.0);
  std::vector<double> batch_grad(weights.size(), 0.0);

  RAdamConfig opt_cfg;
  opt_cfg.beta1 = cfg.beta1;
  opt_cfg.beta2 = cfg.beta2;
  opt_cfg.weight_decay = cfg.weight_decay;
  RAdam optimizer(weights.size(), opt_cfg);

  const std::size_t steps_per_epoch = (windows.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = steps_per_epoch * cfg.max_epochs;
  std::size_t global_step = 0;

  Rng shuffle_rng(mix_seed(cfg.seed, 0x7a11));

  const auto validation_loss = [&]() {
    double sq_sum = 0.0;
    std::size_t count = 0;
    Sequence y;
    for (const auto& seg : val_frame.segments) {
      if (seg.size() <= cfg.washout) continue;
      const SeqView xs(val_x, seg.begin, seg.size());
      model_forward(spec, weights, xs, y);
      for (std::size_t t = cfg.washout; t < seg.size(); ++t) {
        const double* target = val_y.row(seg.begin + t);
        const double* pred = y.row(t);
        for (std::size_t d = 0; d < y.dim; ++d) {
          const double err = pred[d] - target[d];
          sq_sum += err * err;
          ++count;
        }
      }
    }
    require(count > 0, "invalid-train-config", "validation split has no scored samples");
    return sq_sum / static_cast<double>(count);
  };

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(windows);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < windows.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, windows.size());
      const double batch_n = static_cast<double>(end - begin);
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t widx = begin; widx < end; ++widx) {
        const SeqView xs(train_x, windows[widx], cfg.window);
        const SeqView ys(train_y, windows[widx], cfg.window);
        batch_loss += model_backward(spec, weights, xs, ys, cfg.washout, batch_grad);
      }
      batch_loss /= batch_n;
      for (std::size_t i = 0; i < batch_grad.size(); ++i) batch_grad[i] /= batch_n;
      if (!std::isfinite(batch_loss)) fail("diverged", "epoch " + std::to_string(epoch));

      const double lr = cosine_lr(global_step, total_steps, cfg.lr_max, cfg.lr_min);
      optimizer.step(weights, batch_grad, lr);
      ++global_step;
      epoch_loss += batch_loss;
      ++batches;
    }
    epoch_loss /= static_cast<double>(batches);

    const double val_loss = validation_loss();
    if (!std::isfinite(val_loss)) fail("diverged", "epoch " + std::to_string(epoch));
    result.history.push_back({epoch_loss, val_loss});
    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      result.best_weights = weights;
    }
    result.epochs_run = epoch;
    if (callback && !callback(epoch, val_loss)) break;
  }

  if (result.best_weights.empty()) result.best_weights = weights;
  return result;
}

std::vector<std::vector<double>> predict_frame(const ModelSpec& spec,
                                               const std::vector<double>& weights,
                                               const Normalization& norm,
                                               const SignalFrame& frame) {
  const Sequence x = norm.inputs(frame);
  std::vector<std::vector<double>> out(spec.output_size,
                                       std::vector<double>(frame.length(), 0.0));
  Sequence y;
  for (const auto& seg : frame.segments) {
    const SeqView xs(x, seg.begin, seg.size());
    model_forward(spec, weights, xs, y);
    for (std::size_t t = 0; t < seg.size(); ++t)
      for (std::size_t d = 0; d < spec.output_size; ++d)
        out[d][seg.begin + t] = norm.denormalize_output(y.row(t)[d], d);
  }
  return out;
}

}  // namespace vws::nn
