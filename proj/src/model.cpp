#include "lovesim/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lovesim/error.hpp"
#include "lovesim/vocab.hpp"

namespace lovesim {

void EncoderConfig::validate() const {
  if (vocab_size < 7) throw ValidationError("encoder: vocab_size must be at least 7");
  if (d_model == 0 || n_heads == 0 || d_model % n_heads != 0) {
    throw ValidationError("encoder: d_model must be a positive multiple of n_heads");
  }
  if (n_layers == 0 || d_ff == 0) throw ValidationError("encoder: n_layers and d_ff must be positive");
  if (max_len < 6) throw ValidationError("encoder: max_len must hold the five separators");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("encoder: dropout must be in [0, 1)");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("encoder: threshold must be in (0, 1)");
  }
}

void ModelParams::for_each(const Visitor& f) {
  f("token_embedding", token_embedding, true);
  f("position_embedding", position_embedding, true);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& L = layers[l];
    const std::string p = "layer" + std::to_string(l) + ".";
    f(p + "ln1_gain", L.ln1_gain, false);
    f(p + "ln1_bias", L.ln1_bias, false);
    f(p + "wq", L.wq, true);
    f(p + "bq", L.bq, false);
    f(p + "wk", L.wk, true);
    f(p + "bk", L.bk, false);
    f(p + "wv", L.wv, true);
    f(p + "bv", L.bv, false);
    f(p + "wo", L.wo, true);
    f(p + "bo", L.bo, false);
    f(p + "ln2_gain", L.ln2_gain, false);
    f(p + "ln2_bias", L.ln2_bias, false);
    f(p + "w1", L.w1, true);
    f(p + "b1", L.b1, false);
    f(p + "w2", L.w2, true);
    f(p + "b2", L.b2, false);
  }
  f("final_gain", final_gain, false);
  f("final_bias", final_bias, false);
  f("head_weight", head_weight, true);
  f("head_bias", head_bias, false);
}

void ModelParams::for_each(const ConstVisitor& f) const {
  const_cast<ModelParams*>(this)->for_each(
      [&](const std::string& name, Tensor& t, bool decay) { f(name, t, decay); });
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Tensor& t, bool) { n += t.size(); });
  return n;
}

ModelParams zeros_like(const EncoderConfig& c) {
  ModelParams p;
  p.config = c;
  const std::size_t d = c.d_model;
  p.token_embedding = Tensor(c.vocab_size, d);
  p.position_embedding = Tensor(c.max_len, d);
  p.layers.resize(c.n_layers);
  for (auto& L : p.layers) {
    L.ln1_gain = Tensor(1, d);
    L.ln1_bias = Tensor(1, d);
    L.wq = Tensor(d, d);
    L.bq = Tensor(1, d);
    L.wk = Tensor(d, d);
    L.bk = Tensor(1, d);
    L.wv = Tensor(d, d);
    L.bv = Tensor(1, d);
    L.wo = Tensor(d, d);
    L.bo = Tensor(1, d);
    L.ln2_gain = Tensor(1, d);
    L.ln2_bias = Tensor(1, d);
    L.w1 = Tensor(d, c.d_ff);
    L.b1 = Tensor(1, c.d_ff);
    L.w2 = Tensor(c.d_ff, d);
    L.b2 = Tensor(1, d);
  }
  p.final_gain = Tensor(1, d);
  p.final_bias = Tensor(1, d);
  p.head_weight = Tensor(1, d);
  p.head_bias = Tensor(1, 1);
  return p;
}

ModelParams init_params(const EncoderConfig& c) {
  c.validate();
  ModelParams p = zeros_like(c);
  Rng rng(c.seed);
  auto fill = [&](Tensor& t, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (auto& v : t.data) v = dist(rng);
  };
  const double d = static_cast<double>(c.d_model);
  fill(p.token_embedding, 1.0);
  fill(p.position_embedding, 1.0);
  for (auto& L : p.layers) {
    std::fill(L.ln1_gain.data.begin(), L.ln1_gain.data.end(), 1.0);
    std::fill(L.ln2_gain.data.begin(), L.ln2_gain.data.end(), 1.0);
    fill(L.wq, 1.0 / std::sqrt(d));
    fill(L.wk, 1.0 / std::sqrt(d));
    fill(L.wv, 1.0 / std::sqrt(d));
    fill(L.wo, 1.0 / std::sqrt(d));
    fill(L.w1, 1.0 / std::sqrt(d));
    fill(L.w2, 1.0 / std::sqrt(static_cast<double>(c.d_ff)));
  }
  std::fill(p.final_gain.data.begin(), p.final_gain.data.end(), 1.0);
  fill(p.head_weight, 1.0 / std::sqrt(d));
  return p;
}

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

double gelu(double z) { return 0.5 * z * (1.0 + std::tanh(kGeluC * (z + kGeluA * z * z * z))); }

double gelu_grad(double z) {
  const double t = std::tanh(kGeluC * (z + kGeluA * z * z * z));
  return 0.5 * (1.0 + t) + 0.5 * z * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * z * z);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// out = in * W + b for `rows` rows.
void linear(const Tensor& in, const Tensor& w, const Tensor& b, Tensor& out) {
  const std::size_t n = in.rows, k = w.rows, m = w.cols;
  out = Tensor(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* o = out.row(i);
    std::copy(b.data.begin(), b.data.end(), o);
    const double* x = in.row(i);
    for (std::size_t a = 0; a < k; ++a) {
      const double xv = x[a];
      const double* wr = w.row(a);
      for (std::size_t c = 0; c < m; ++c) o[c] += xv * wr[c];
    }
  }
}

// Accumulates dW, db; writes d_in (overwrites) when d_in is non-null.
void linear_backward(const Tensor& in, const Tensor& w, const Tensor& d_out, Tensor& dw, Tensor& db,
                     Tensor* d_in, const std::vector<char>& valid) {
  const std::size_t n = in.rows, k = w.rows, m = w.cols;
  if (d_in) *d_in = Tensor(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    const double* g = d_out.row(i);
    const double* x = in.row(i);
    for (std::size_t c = 0; c < m; ++c) db.data[c] += g[c];
    for (std::size_t a = 0; a < k; ++a) {
      const double xv = x[a];
      double* dwr = dw.row(a);
      const double* wr = w.row(a);
      double acc = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        dwr[c] += xv * g[c];
        acc += g[c] * wr[c];
      }
      if (d_in) (*d_in)(i, a) = acc;
    }
  }
}

struct NormCache {
  Tensor hat;
  std::vector<double> rstd;
};

void layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, Tensor& out, NormCache& nc) {
  const std::size_t n = x.rows, d = x.cols;
  out = Tensor(n, d);
  nc.hat = Tensor(n, d);
  nc.rstd.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = x.row(i);
    double mean = 0.0;
    for (std::size_t c = 0; c < d; ++c) mean += r[c];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t c = 0; c < d; ++c) var += (r[c] - mean) * (r[c] - mean);
    var /= static_cast<double>(d);
    const double rstd = 1.0 / std::sqrt(var + kLnEps);
    nc.rstd[i] = rstd;
    for (std::size_t c = 0; c < d; ++c) {
      const double h = (r[c] - mean) * rstd;
      nc.hat(i, c) = h;
      out(i, c) = h * gain.data[c] + bias.data[c];
    }
  }
}

// d_x is overwritten.
void layer_norm_backward(const Tensor& d_out, const Tensor& gain, const NormCache& nc, Tensor& dgain,
                         Tensor& dbias, Tensor& d_x, const std::vector<char>& valid) {
  const std::size_t n = d_out.rows, d = d_out.cols;
  d_x = Tensor(n, d);
  std::vector<double> dhat(d);
  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    double mean_dhat = 0.0, mean_dhat_hat = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double g = d_out(i, c);
      dgain.data[c] += g * nc.hat(i, c);
      dbias.data[c] += g;
      dhat[c] = g * gain.data[c];
      mean_dhat += dhat[c];
      mean_dhat_hat += dhat[c] * nc.hat(i, c);
    }
    mean_dhat /= static_cast<double>(d);
    mean_dhat_hat /= static_cast<double>(d);
    for (std::size_t c = 0; c < d; ++c) {
      d_x(i, c) = nc.rstd[i] * (dhat[c] - mean_dhat - nc.hat(i, c) * mean_dhat_hat);
    }
  }
}

struct LayerCache {
  Tensor x_in;
  NormCache n1;
  Tensor a;
  Tensor q, k, v;
  std::vector<double> probs;  // heads x len x len
  Tensor ctx;
  Tensor attn_out;
  std::vector<double> attn_drop;  // dropout scale per element, empty when inactive
  Tensor x_mid;
  NormCache n2;
  Tensor c;
  Tensor z;
  Tensor gz;
  Tensor ff_out;
  std::vector<double> ff_drop;
};

struct Cache {
  std::vector<char> valid;
  std::vector<LayerCache> layers;
  Tensor x_final;
  NormCache nf;
  ForwardResult result;
};

void apply_dropout(Tensor& t, std::vector<double>& scale, double rate, Rng* rng) {
  scale.clear();
  if (rng == nullptr || rate <= 0.0) return;
  std::bernoulli_distribution keep(1.0 - rate);
  scale.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    scale[i] = keep(*rng) ? 1.0 / (1.0 - rate) : 0.0;
    t.data[i] *= scale[i];
  }
}

void check_tokens(const ModelParams& p, std::span<const int> tokens) {
  if (tokens.empty()) throw ValidationError("forward: empty token sequence");
  if (tokens.size() > p.config.max_len) {
    throw ValidationError("forward: sequence of " + std::to_string(tokens.size()) +
                          " tokens exceeds max_len " + std::to_string(p.config.max_len));
  }
  bool any = false;
  for (int t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= p.config.vocab_size) {
      throw ValidationError("forward: token id " + std::to_string(t) + " outside vocabulary of " +
                            std::to_string(p.config.vocab_size));
    }
    any = any || t != kPadId;
  }
  if (!any) throw ValidationError("forward: sequence is all padding");
}

void run_forward(const ModelParams& p, std::span<const int> tokens, Cache& cache, Rng* rng) {
  check_tokens(p, tokens);
  const std::size_t n = tokens.size();
  const std::size_t d = p.config.d_model;
  const std::size_t heads = p.config.n_heads;
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  cache.valid.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) cache.valid[i] = tokens[i] != kPadId;

  Tensor x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double* te = p.token_embedding.row(static_cast<std::size_t>(tokens[i]));
    const double* pe = p.position_embedding.row(i);
    for (std::size_t c = 0; c < d; ++c) x(i, c) = te[c] + pe[c];
  }

  cache.layers.resize(p.layers.size());
  std::vector<double> scores(n);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& L = p.layers[l];
    auto& lc = cache.layers[l];
    lc.x_in = x;
    layer_norm(x, L.ln1_gain, L.ln1_bias, lc.a, lc.n1);
    linear(lc.a, L.wq, L.bq, lc.q);
    linear(lc.a, L.wk, L.bk, lc.k);
    linear(lc.a, L.wv, L.bv, lc.v);
    lc.probs.assign(heads * n * n, 0.0);
    lc.ctx = Tensor(n, d);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t i = 0; i < n; ++i) {
        double mx = -INFINITY;
        const double* qi = lc.q.row(i) + off;
        for (std::size_t j = 0; j < n; ++j) {
          if (!cache.valid[j]) continue;
          const double* kj = lc.k.row(j) + off;
          double s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
          scores[j] = s * scale;
          mx = std::max(mx, scores[j]);
        }
        double* pr = lc.probs.data() + (h * n + i) * n;
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (!cache.valid[j]) continue;
          pr[j] = std::exp(scores[j] - mx);
          sum += pr[j];
        }
        double* ci = lc.ctx.row(i) + off;
        for (std::size_t j = 0; j < n; ++j) {
          if (!cache.valid[j]) continue;
          pr[j] /= sum;
          const double* vj = lc.v.row(j) + off;
          for (std::size_t c = 0; c < dh; ++c) ci[c] += pr[j] * vj[c];
        }
      }
    }
    linear(lc.ctx, L.wo, L.bo, lc.attn_out);
    Tensor attn = lc.attn_out;
    apply_dropout(attn, lc.attn_drop, p.config.dropout, rng);
    for (std::size_t i = 0; i < x.size(); ++i) x.data[i] += attn.data[i];
    lc.x_mid = x;

    layer_norm(x, L.ln2_gain, L.ln2_bias, lc.c, lc.n2);
    linear(lc.c, L.w1, L.b1, lc.z);
    lc.gz = lc.z;
    for (auto& v : lc.gz.data) v = gelu(v);
    linear(lc.gz, L.w2, L.b2, lc.ff_out);
    Tensor ff = lc.ff_out;
    apply_dropout(ff, lc.ff_drop, p.config.dropout, rng);
    for (std::size_t i = 0; i < x.size(); ++i) x.data[i] += ff.data[i];
  }
  cache.x_final = x;

  auto& res = cache.result;
  layer_norm(x, p.final_gain, p.final_bias, res.hidden, cache.nf);
  res.pooled.assign(d, -INFINITY);
  res.argmax.assign(d, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!cache.valid[i]) continue;
    for (std::size_t c = 0; c < d; ++c) {
      if (res.hidden(i, c) > res.pooled[c]) {
        res.pooled[c] = res.hidden(i, c);
        res.argmax[c] = i;
      }
    }
  }
  res.logit = p.head_bias.data[0];
  for (std::size_t c = 0; c < d; ++c) res.logit += p.head_weight.data[c] * res.pooled[c];
  res.probability = sigmoid(res.logit);
}

// Accumulates into grad the gradient of (d_logit * logit).
void run_backward(const ModelParams& p, std::span<const int> tokens, const Cache& cache,
                  double d_logit, ModelParams& grad) {
  const std::size_t n = tokens.size();
  const std::size_t d = p.config.d_model;
  const std::size_t heads = p.config.n_heads;
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto& res = cache.result;
  const auto& valid = cache.valid;

  grad.head_bias.data[0] += d_logit;
  Tensor d_hidden(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    grad.head_weight.data[c] += d_logit * res.pooled[c];
    d_hidden(res.argmax[c], c) += d_logit * p.head_weight.data[c];
  }
  Tensor dx;
  layer_norm_backward(d_hidden, p.final_gain, cache.nf, grad.final_gain, grad.final_bias, dx, valid);

  Tensor tmp, d_norm;
  std::vector<double> dp(n);
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    const auto& L = p.layers[l];
    auto& G = grad.layers[l];
    const auto& lc = cache.layers[l];

    // Feed-forward residual branch.
    Tensor d_ff = dx;
    if (!lc.ff_drop.empty()) {
      for (std::size_t i = 0; i < d_ff.size(); ++i) d_ff.data[i] *= lc.ff_drop[i];
    }
    Tensor d_gz;
    linear_backward(lc.gz, L.w2, d_ff, G.w2, G.b2, &d_gz, valid);
    for (std::size_t i = 0; i < d_gz.size(); ++i) d_gz.data[i] *= gelu_grad(lc.z.data[i]);
    Tensor d_c;
    linear_backward(lc.c, L.w1, d_gz, G.w1, G.b1, &d_c, valid);
    layer_norm_backward(d_c, L.ln2_gain, lc.n2, G.ln2_gain, G.ln2_bias, d_norm, valid);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += d_norm.data[i];

    // Attention residual branch.
    Tensor d_attn = dx;
    if (!lc.attn_drop.empty()) {
      for (std::size_t i = 0; i < d_attn.size(); ++i) d_attn.data[i] *= lc.attn_drop[i];
    }
    Tensor d_ctx;
    linear_backward(lc.ctx, L.wo, d_attn, G.wo, G.bo, &d_ctx, valid);
    Tensor dq(n, d), dk(n, d), dv(n, d);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        const double* pr = lc.probs.data() + (h * n + i) * n;
        const double* gc = d_ctx.row(i) + off;
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (!valid[j]) continue;
          const double* vj = lc.v.row(j) + off;
          double s = 0.0;
          double* dvj = dv.row(j) + off;
          for (std::size_t c = 0; c < dh; ++c) {
            s += gc[c] * vj[c];
            dvj[c] += pr[j] * gc[c];
          }
          dp[j] = s;
          dot += pr[j] * s;
        }
        const double* qi = lc.q.row(i) + off;
        double* dqi = dq.row(i) + off;
        for (std::size_t j = 0; j < n; ++j) {
          if (!valid[j]) continue;
          const double ds = pr[j] * (dp[j] - dot) * scale;
          const double* kj = lc.k.row(j) + off;
          double* dkj = dk.row(j) + off;
          for (std::size_t c = 0; c < dh; ++c) {
            dqi[c] += ds * kj[c];
            dkj[c] += ds * qi[c];
          }
        }
      }
    }
    Tensor d_a(n, d);
    linear_backward(lc.a, L.wq, dq, G.wq, G.bq, &tmp, valid);
    for (std::size_t i = 0; i < d_a.size(); ++i) d_a.data[i] += tmp.data[i];
    linear_backward(lc.a, L.wk, dk, G.wk, G.bk, &tmp, valid);
    for (std::size_t i = 0; i < d_a.size(); ++i) d_a.data[i] += tmp.data[i];
    linear_backward(lc.a, L.wv, dv, G.wv, G.bv, &tmp, valid);
    for (std::size_t i = 0; i < d_a.size(); ++i) d_a.data[i] += tmp.data[i];
    layer_norm_backward(d_a, L.ln1_gain, lc.n1, G.ln1_gain, G.ln1_bias, d_norm, valid);
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] += d_norm.data[i];
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    double* te = grad.token_embedding.row(static_cast<std::size_t>(tokens[i]));
    double* pe = grad.position_embedding.row(i);
    for (std::size_t c = 0; c < d; ++c) {
      te[c] += dx(i, c);
      pe[c] += dx(i, c);
    }
  }
}

}  // namespace

ForwardResult forward(const ModelParams& params, std::span<const int> tokens) {
  Cache cache;
  run_forward(params, tokens, cache, nullptr);
  return std::move(cache.result);
}

double head_probability(const ModelParams& params, std::span<const double> pooled) {
  double logit = params.head_bias.data[0];
  for (std::size_t c = 0; c < pooled.size(); ++c) logit += params.head_weight.data[c] * pooled[c];
  return sigmoid(logit);
}

double bce(double probability, double label) {
  const double lp = std::log(std::max(probability, kLogClamp));
  const double lq = std::log(std::max(1.0 - probability, kLogClamp));
  return -(label * lp + (1.0 - label) * lq);
}

LossAndGrad loss_and_grad(const ModelParams& params, std::span<const EncodedExample> batch,
                          Rng* dropout_rng) {
  if (batch.empty()) throw ValidationError("loss_and_grad: empty batch");
  LossAndGrad out;
  out.grad = zeros_like(params.config);
  const double inv = 1.0 / static_cast<double>(batch.size());
  Cache cache;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = batch[b];
    run_forward(params, ex.tokens, cache, dropout_rng);
    const double z = cache.result.logit;
    // log p = -softplus(-z), log(1-p) = -softplus(z); both clamped at log(1e-12).
    const double log_clamp = std::log(kLogClamp);
    const double lp = -softplus(-z);
    const double lq = -softplus(z);
    const double y = ex.label;
    const double loss = -(y * std::max(lp, log_clamp) + (1.0 - y) * std::max(lq, log_clamp));
    if (!std::isfinite(loss)) {
      throw std::runtime_error("loss_and_grad: non-finite loss at batch example " +
                               std::to_string(b));
    }
    out.loss += loss * inv;
    const double p = cache.result.probability;
    double d_logit = 0.0;
    if (lp > log_clamp) d_logit += -y * (1.0 - p);
    if (lq > log_clamp) d_logit += (1.0 - y) * p;
    run_backward(params, ex.tokens, cache, d_logit * inv, out.grad);
  }
  return out;
}

}  // namespace lovesim
