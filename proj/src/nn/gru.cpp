#include <cmath>

#include "vws/nn/model.hpp"

namespace vws::nn::detail {

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct GruWeights {
  const double *wz, *wr, *wh, *uz, *ur, *uh, *bz, *br, *bh, *head_w, *head_b;

  GruWeights(const ModelSpec& spec, const double* w) {
    const WeightLayout layout = weight_layout(spec);
    const auto at = [&](const char* name) { return w + layout.block(name).offset; };
    wz = at("w_z"); wr = at("w_r"); wh = at("w_h");
    uz = at("u_z"); ur = at("u_r"); uh = at("u_h");
    bz = at("b_z"); br = at("b_r"); bh = at("b_h");
    head_w = at("head_w"); head_b = at("head_b");
  }
};

struct GruGrads {
  double *wz, *wr, *wh, *uz, *ur, *uh, *bz, *br, *bh, *head_w, *head_b;

  GruGrads(const ModelSpec& spec, double* g) {
    const WeightLayout layout = weight_layout(spec);
    const auto at = [&](const char* name) { return g + layout.block(name).offset; };
    wz = at("w_z"); wr = at("w_r"); wh = at("w_h");
    uz = at("u_z"); ur = at("u_r"); uh = at("u_h");
    bz = at("b_z"); br = at("b_r"); bh = at("b_h");
    head_w = at("head_w"); head_b = at("head_b");
  }
};

// z_t = sig(Wz x + Uz h' + bz), r_t = sig(Wr x + Ur h' + br),
// hc_t = tanh(Wh x + Uh (r * h') + bh), h_t = (1-z) h' + z hc.
void run_forward(const ModelSpec& spec, const GruWeights& w, SeqView x, Sequence* y,
                 Sequence* cache_z, Sequence* cache_r, Sequence* cache_hc, Sequence* cache_h) {
  const std::size_t h = spec.hidden_size;
  std::vector<double> hidden(h, 0.0), z(h), r(h), hc(h), rh(h);

  for (std::size_t t = 0; t < x.steps; ++t) {
    const double* xt = x.row(t);
    matvec(w.wz, h, spec.input_size, xt, z.data());
    matvec_add(w.uz, h, h, hidden.data(), z.data());
    matvec(w.wr, h, spec.input_size, xt, r.data());
    matvec_add(w.ur, h, h, hidden.data(), r.data());
    for (std::size_t i = 0; i < h; ++i) {
      z[i] = sigmoid(z[i] + w.bz[i]);
      r[i] = sigmoid(r[i] + w.br[i]);
      rh[i] = r[i] * hidden[i];
    }
    matvec(w.wh, h, spec.input_size, xt, hc.data());
    matvec_add(w.uh, h, h, rh.data(), hc.data());
    for (std::size_t i = 0; i < h; ++i) {
      hc[i] = std::tanh(hc[i] + w.bh[i]);
      hidden[i] = (1.0 - z[i]) * hidden[i] + z[i] * hc[i];
    }
    if (y) {
      double* yt = y->row(t);
      matvec(w.head_w, spec.output_size, h, hidden.data(), yt);
      for (std::size_t i = 0; i < spec.output_size; ++i) yt[i] += w.head_b[i];
    }
    if (cache_z) {
      std::copy(z.begin(), z.end(), cache_z->row(t));
      std::copy(r.begin(), r.end(), cache_r->row(t));
      std::copy(hc.begin(), hc.end(), cache_hc->row(t));
      std::copy(hidden.begin(), hidden.end(), cache_h->row(t));
    }
  }
}

}  // namespace

void gru_forward(const ModelSpec& spec, std::span<const double> weights, SeqView x, Sequence& y) {
  const GruWeights w(spec, weights.data());
  run_forward(spec, w, x, &y, nullptr, nullptr, nullptr, nullptr);
}

double gru_backward(const ModelSpec& spec, std::span<const double> weights, SeqView x,
                    SeqView target, std::size_t washout, std::span<double> grad) {
  const std::size_t h = spec.hidden_size;
  const std::size_t o = spec.output_size;
  const std::size_t steps = x.steps;
  const GruWeights w(spec, weights.data());
  GruGrads g(spec, grad.data());

  Sequence z = Sequence::zeros(steps, h), r = Sequence::zeros(steps, h),
           hc = Sequence::zeros(steps, h), hs = Sequence::zeros(steps, h);
  run_forward(spec, w, x, nullptr, &z, &r, &hc, &hs);

  const double denom = static_cast<double>((steps - washout) * o);
  double loss = 0.0;

  std::vector<double> dh(h, 0.0), dh_prev(h), dah(h), daz(h), dar(h), tmp(h), dy(o), yt(o), rh(h);
  const std::vector<double> zero_h(h, 0.0);

  for (std::size_t ti = steps; ti-- > 0;) {
    const double* h_prev = ti == 0 ? zero_h.data() : hs.row(ti - 1);
    const double* zt = z.row(ti);
    const double* rt = r.row(ti);
    const double* hct = hc.row(ti);
    const double* ht = hs.row(ti);
    const double* xt = x.row(ti);

    if (ti >= washout) {
      matvec(w.head_w, o, h, ht, yt.data());
      for (std::size_t i = 0; i < o; ++i) {
        yt[i] += w.head_b[i];
        const double err = yt[i] - target.row(ti)[i];
        loss += err * err;
        dy[i] = 2.0 * err / denom;
        g.head_b[i] += dy[i];
      }
      outer_add(g.head_w, o, h, dy.data(), ht);
      matvec_transposed_add(w.head_w, o, h, dy.data(), dh.data());
    }

    // h = (1 - z) h' + z hc
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t i = 0; i < h; ++i) {
      const double dz = dh[i] * (hct[i] - h_prev[i]);
      daz[i] = dz * zt[i] * (1.0 - zt[i]);
      dah[i] = dh[i] * zt[i] * (1.0 - hct[i] * hct[i]);
      dh_prev[i] = dh[i] * (1.0 - zt[i]);
      rh[i] = rt[i] * h_prev[i];
    }

    // candidate path
    outer_add(g.wh, h, spec.input_size, dah.data(), xt);
    outer_add(g.uh, h, h, dah.data(), rh.data());
    for (std::size_t i = 0; i < h; ++i) g.bh[i] += dah[i];
    std::fill(tmp.begin(), tmp.end(), 0.0);
    matvec_transposed_add(w.uh, h, h, dah.data(), tmp.data());
    for (std::size_t i = 0; i < h; ++i) {
      const double dr = tmp[i] * h_prev[i];
      dar[i] = dr * rt[i] * (1.0 - rt[i]);
      dh_prev[i] += tmp[i] * rt[i];
    }

    // update gate path
    outer_add(g.wz, h, spec.input_size, daz.data(), xt);
    outer_add(g.uz, h, h, daz.data(), h_prev);
    for (std::size_t i = 0; i < h; ++i) g.bz[i] += daz[i];
    matvec_transposed_add(w.uz, h, h, daz.data(), dh_prev.data());

    // reset gate path
    outer_add(g.wr, h, spec.input_size, dar.data(), xt);
    outer_add(g.ur, h, h, dar.data(), h_prev);
    for (std::size_t i = 0; i < h; ++i) g.br[i] += dar[i];
    matvec_transposed_add(w.ur, h, h, dar.data(), dh_prev.data());

    dh = dh_prev;
  }
  return loss / denom;
}

}  // namespace vws::nn::detail
