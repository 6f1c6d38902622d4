#include <cmath>

#include "vws/nn/model.hpp"

namespace vws::nn::detail {

namespace {

struct TcnLayer {
  const double* conv_w = nullptr;  // [c_out][c_in][k]
  const double* conv_b = nullptr;
  const double* proj_w = nullptr;  // [c_out][c_in], null when identity
  std::size_t c_in = 0;
  std::size_t dilation = 1;
};

std::vector<TcnLayer> layer_views(const ModelSpec& spec, const double* w,
                                  const WeightLayout& layout) {
  std::vector<TcnLayer> layers(spec.tcn_layers);
  for (std::size_t l = 0; l < spec.tcn_layers; ++l) {
    auto& layer = layers[l];
    layer.c_in = l == 0 ? spec.input_size : spec.hidden_size;
    layer.dilation = std::size_t{1} << l;
    layer.conv_w = w + layout.block("conv" + std::to_string(l) + "_w").offset;
    layer.conv_b = w + layout.block("conv" + std::to_string(l) + "_b").offset;
    if (layer.c_in != spec.hidden_size)
      layer.proj_w = w + layout.block("proj" + std::to_string(l) + "_w").offset;
  }
  return layers;
}

// One block: causal dilated conv, ReLU, residual add (1x1 projection when
// channel counts differ). Inputs before t = 0 are zero.
void layer_forward(const ModelSpec& spec, const TcnLayer& layer, const Sequence& in, Sequence& pre,
                   Sequence& out) {
  const std::size_t c = spec.hidden_size;
  const std::size_t k = spec.kernel_size;
  for (std::size_t t = 0; t < in.steps; ++t) {
    double* pre_t = pre.row(t);
    double* out_t = out.row(t);
    const double* in_t = in.row(t);
    for (std::size_t co = 0; co < c; ++co) {
      const double* w_co = layer.conv_w + co * layer.c_in * k;
      double acc = layer.conv_b[co];
      for (std::size_t j = 0; j < k; ++j) {
        if (t < j * layer.dilation) break;
        const double* in_row = in.row(t - j * layer.dilation);
        const double* w_j = w_co + j;  // stride k over c_in
        for (std::size_t ci = 0; ci < layer.c_in; ++ci) acc += w_j[ci * k] * in_row[ci];
      }
      pre_t[co] = acc;
      double residual;
      if (layer.proj_w) {
        const double* p = layer.proj_w + co * layer.c_in;
        residual = 0.0;
        for (std::size_t ci = 0; ci < layer.c_in; ++ci) residual += p[ci] * in_t[ci];
      } else {
        residual = in_t[co];
      }
      out_t[co] = (acc > 0.0 ? acc : 0.0) + residual;
    }
  }
}

}  // namespace

void tcn_forward(const ModelSpec& spec, std::span<const double> weights, SeqView x, Sequence& y) {
  const WeightLayout layout = weight_layout(spec);
  const auto layers = layer_views(spec, weights.data(), layout);
  const double* head_w = weights.data() + layout.block("head_w").offset;
  const double* head_b = weights.data() + layout.block("head_b").offset;

  Sequence current = Sequence::zeros(x.steps, x.dim);
  std::copy(x.data, x.data + x.steps * x.dim, current.values.begin());
  Sequence pre = Sequence::zeros(x.steps, spec.hidden_size);
  for (const auto& layer : layers) {
    Sequence next = Sequence::zeros(x.steps, spec.hidden_size);
    layer_forward(spec, layer, current, pre, next);
    current = std::move(next);
  }
  for (std::size_t t = 0; t < x.steps; ++t) {
    double* yt = y.row(t);
    matvec(head_w, spec.output_size, spec.hidden_size, current.row(t), yt);
    for (std::size_t i = 0; i < spec.output_size; ++i) yt[i] += head_b[i];
  }
}

double tcn_backward(const ModelSpec& spec, std::span<const double> weights, SeqView x,
                    SeqView target, std::size_t washout, std::span<double> grad) {
  const WeightLayout layout = weight_layout(spec);
  const auto layers = layer_views(spec, weights.data(), layout);
  const double* head_w = weights.data() + layout.block("head_w").offset;
  const double* head_b = weights.data() + layout.block("head_b").offset;

  const std::size_t steps = x.steps;
  const std::size_t c = spec.hidden_size;
  const std::size_t k = spec.kernel_size;
  const std::size_t o = spec.output_size;

  // Forward pass keeping per-layer inputs and pre-activations.
  std::vector<Sequence> inputs;  // inputs[l] feeds layer l; inputs[L] is the head input
  std::vector<Sequence> pres(spec.tcn_layers);
  inputs.reserve(spec.tcn_layers + 1);
  {
    Sequence x_seq = Sequence::zeros(steps, x.dim);
    std::copy(x.data, x.data + steps * x.dim, x_seq.values.begin());
    inputs.push_back(std::move(x_seq));
  }
  for (std::size_t l = 0; l < spec.tcn_layers; ++l) {
    pres[l] = Sequence::zeros(steps, c);
    Sequence out = Sequence::zeros(steps, c);
    layer_forward(spec, layers[l], inputs[l], pres[l], out);
    inputs.push_back(std::move(out));
  }

  const double denom = static_cast<double>((steps - washout) * o);
  double loss = 0.0;

  // Head loss and gradient wrt the top layer output.
  double* g_head_w = grad.data() + layout.block("head_w").offset;
  double* g_head_b = grad.data() + layout.block("head_b").offset;
  Sequence dout = Sequence::zeros(steps, c);
  std::vector<double> dy(o), yt(o);
  for (std::size_t t = washout; t < steps; ++t) {
    const double* top = inputs.back().row(t);
    matvec(head_w, o, c, top, yt.data());
    for (std::size_t i = 0; i < o; ++i) {
      yt[i] += head_b[i];
      const double err = yt[i] - target.row(t)[i];
      loss += err * err;
      dy[i] = 2.0 * err / denom;
      g_head_b[i] += dy[i];
    }
    outer_add(g_head_w, o, c, dy.data(), top);
    matvec_transposed_add(head_w, o, c, dy.data(), dout.row(t));
  }

  for (std::size_t li = spec.tcn_layers; li-- > 0;) {
    const auto& layer = layers[li];
    double* g_conv_w = grad.data() + layout.block("conv" + std::to_string(li) + "_w").offset;
    double* g_conv_b = grad.data() + layout.block("conv" + std::to_string(li) + "_b").offset;
    double* g_proj_w =
        layer.proj_w ? grad.data() + layout.block("proj" + std::to_string(li) + "_w").offset
                     : nullptr;

    const Sequence& in = inputs[li];
    const Sequence& pre = pres[li];
    Sequence din = Sequence::zeros(steps, layer.c_in);

    for (std::size_t t = 0; t < steps; ++t) {
      const double* dout_t = dout.row(t);
      const double* in_t = in.row(t);
      for (std::size_t co = 0; co < c; ++co) {
        const double d = dout_t[co];
        if (d == 0.0) continue;
        // residual branch
        if (layer.proj_w) {
          const double* p = layer.proj_w + co * layer.c_in;
          double* gp = g_proj_w + co * layer.c_in;
          double* din_t = din.row(t);
          for (std::size_t ci = 0; ci < layer.c_in; ++ci) {
            gp[ci] += d * in_t[ci];
            din_t[ci] += p[ci] * d;
          }
        } else {
          din.row(t)[co] += d;
        }
        // conv branch through the ReLU
        if (pre.row(t)[co] <= 0.0) continue;
        g_conv_b[co] += d;
        const double* w_co = layer.conv_w + co * layer.c_in * k;
        double* g_co = g_conv_w + co * layer.c_in * k;
        for (std::size_t j = 0; j < k; ++j) {
          if (t < j * layer.dilation) break;
          const double* in_row = in.row(t - j * layer.dilation);
          double* din_row = din.row(t - j * layer.dilation);
          for (std::size_t ci = 0; ci < layer.c_in; ++ci) {
            g_co[ci * k + j] += d * in_row[ci];
            din_row[ci] += w_co[ci * k + j] * d;
          }
        }
      }
    }
    dout = std::move(din);
  }
  return loss / denom;
}

}  // namespace vws::nn::detail
