#include <cmath>

#include "vws/nn/model.hpp"

namespace vws::nn::detail {

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct LstmWeights {
  const double *wi, *wf, *wo, *wg, *ui, *uf, *uo, *ug, *bi, *bf, *bo, *bg, *head_w, *head_b;

  LstmWeights(const ModelSpec& spec, const double* w) {
    const WeightLayout layout = weight_layout(spec);
    const auto at = [&](const char* name) { return w + layout.block(name).offset; };
    wi = at("w_i"); wf = at("w_f"); wo = at("w_o"); wg = at("w_g");
    ui = at("u_i"); uf = at("u_f"); uo = at("u_o"); ug = at("u_g");
    bi = at("b_i"); bf = at("b_f"); bo = at("b_o"); bg = at("b_g");
    head_w = at("head_w"); head_b = at("head_b");
  }
};

struct LstmGrads {
  double *wi, *wf, *wo, *wg, *ui, *uf, *uo, *ug, *bi, *bf, *bo, *bg, *head_w, *head_b;

  LstmGrads(const ModelSpec& spec, double* g) {
    const WeightLayout layout = weight_layout(spec);
    const auto at = [&](const char* name) { return g + layout.block(name).offset; };
    wi = at("w_i"); wf = at("w_f"); wo = at("w_o"); wg = at("w_g");
    ui = at("u_i"); uf = at("u_f"); uo = at("u_o"); ug = at("u_g");
    bi = at("b_i"); bf = at("b_f"); bo = at("b_o"); bg = at("b_g");
    head_w = at("head_w"); head_b = at("head_b");
  }
};

// Standard 4-gate cell, zero initial state:
// i,f,o = sig(.), g = tanh(.), c = f c' + i g, h = o tanh(c).
void run_forward(const ModelSpec& spec, const LstmWeights& w, SeqView x, Sequence* y,
                 Sequence* ci, Sequence* cf, Sequence* co, Sequence* cg, Sequence* cc,
                 Sequence* ch) {
  const std::size_t h = spec.hidden_size;
  std::vector<double> hidden(h, 0.0), cell(h, 0.0), gi(h), gf(h), go(h), gg(h);

  for (std::size_t t = 0; t < x.steps; ++t) {
    const double* xt = x.row(t);
    matvec(w.wi, h, spec.input_size, xt, gi.data());
    matvec_add(w.ui, h, h, hidden.data(), gi.data());
    matvec(w.wf, h, spec.input_size, xt, gf.data());
    matvec_add(w.uf, h, h, hidden.data(), gf.data());
    matvec(w.wo, h, spec.input_size, xt, go.data());
    matvec_add(w.uo, h, h, hidden.data(), go.data());
    matvec(w.wg, h, spec.input_size, xt, gg.data());
    matvec_add(w.ug, h, h, hidden.data(), gg.data());
    for (std::size_t i = 0; i < h; ++i) {
      gi[i] = sigmoid(gi[i] + w.bi[i]);
      gf[i] = sigmoid(gf[i] + w.bf[i]);
      go[i] = sigmoid(go[i] + w.bo[i]);
      gg[i] = std::tanh(gg[i] + w.bg[i]);
      cell[i] = gf[i] * cell[i] + gi[i] * gg[i];
      hidden[i] = go[i] * std::tanh(cell[i]);
    }
    if (y) {
      double* yt = y->row(t);
      matvec(w.head_w, spec.output_size, h, hidden.data(), yt);
      for (std::size_t i = 0; i < spec.output_size; ++i) yt[i] += w.head_b[i];
    }
    if (ci) {
      std::copy(gi.begin(), gi.end(), ci->row(t));
      std::copy(gf.begin(), gf.end(), cf->row(t));
      std::copy(go.begin(), go.end(), co->row(t));
      std::copy(gg.begin(), gg.end(), cg->row(t));
      std::copy(cell.begin(), cell.end(), cc->row(t));
      std::copy(hidden.begin(), hidden.end(), ch->row(t));
    }
  }
}

}  // namespace

void lstm_forward(const ModelSpec& spec, std::span<const double> weights, SeqView x, Sequence& y) {
  const LstmWeights w(spec, weights.data());
  run_forward(spec, w, x, &y, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr);
}

double lstm_backward(const ModelSpec& spec, std::span<const double> weights, SeqView x,
                     SeqView target, std::size_t washout, std::span<double> grad) {
  const std::size_t h = spec.hidden_size;
  const std::size_t o = spec.output_size;
  const std::size_t steps = x.steps;
  const LstmWeights w(spec, weights.data());
  LstmGrads g(spec, grad.data());

  Sequence gi = Sequence::zeros(steps, h), gf = Sequence::zeros(steps, h),
           go = Sequence::zeros(steps, h), gg = Sequence::zeros(steps, h),
           cs = Sequence::zeros(steps, h), hs = Sequence::zeros(steps, h);
  run_forward(spec, w, x, nullptr, &gi, &gf, &go, &gg, &cs, &hs);

  const double denom = static_cast<double>((steps - washout) * o);
  double loss = 0.0;

  std::vector<double> dh(h, 0.0), dc(h, 0.0), dh_prev(h), dai(h), daf(h), dao(h), dag(h), dy(o),
      yt(o);
  const std::vector<double> zero_h(h, 0.0);

  for (std::size_t ti = steps; ti-- > 0;) {
    const double* h_prev = ti == 0 ? zero_h.data() : hs.row(ti - 1);
    const double* c_prev = ti == 0 ? zero_h.data() : cs.row(ti - 1);
    const double* it = gi.row(ti);
    const double* ft = gf.row(ti);
    const double* ot = go.row(ti);
    const double* gt = gg.row(ti);
    const double* ct = cs.row(ti);
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

    for (std::size_t i = 0; i < h; ++i) {
      const double tc = std::tanh(ct[i]);
      const double d_o = dh[i] * tc;
      dc[i] += dh[i] * ot[i] * (1.0 - tc * tc);
      dai[i] = dc[i] * gt[i] * it[i] * (1.0 - it[i]);
      daf[i] = dc[i] * c_prev[i] * ft[i] * (1.0 - ft[i]);
      dag[i] = dc[i] * it[i] * (1.0 - gt[i] * gt[i]);
      dao[i] = d_o * ot[i] * (1.0 - ot[i]);
      dc[i] *= ft[i];  // carried to c_{t-1}
    }

    outer_add(g.wi, h, spec.input_size, dai.data(), xt);
    outer_add(g.wf, h, spec.input_size, daf.data(), xt);
    outer_add(g.wo, h, spec.input_size, dao.data(), xt);
    outer_add(g.wg, h, spec.input_size, dag.data(), xt);
    outer_add(g.ui, h, h, dai.data(), h_prev);
    outer_add(g.uf, h, h, daf.data(), h_prev);
    outer_add(g.uo, h, h, dao.data(), h_prev);
    outer_add(g.ug, h, h, dag.data(), h_prev);
    for (std::size_t i = 0; i < h; ++i) {
      g.bi[i] += dai[i];
      g.bf[i] += daf[i];
      g.bo[i] += dao[i];
      g.bg[i] += dag[i];
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    matvec_transposed_add(w.ui, h, h, dai.data(), dh_prev.data());
    matvec_transposed_add(w.uf, h, h, daf.data(), dh_prev.data());
    matvec_transposed_add(w.uo, h, h, dao.data(), dh_prev.data());
    matvec_transposed_add(w.ug, h, h, dag.data(), dh_prev.data());
    dh = dh_prev;
  }
  return loss / denom;
}

}  // namespace vws::nn::detail
