#include "lovesim/adamw.hpp"

#include <cmath>
#include <vector>

#include "lovesim/error.hpp"

namespace lovesim {

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("train: learning rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ValidationError("train: betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0) || !(weight_decay >= 0.0)) {
    throw ValidationError("train: epsilon must be > 0 and weight decay >= 0");
  }
}

AdamState make_adam_state(const EncoderConfig& config) {
  return {zeros_like(config), zeros_like(config)};
}

void adamw_step(ModelParams& params, const ModelParams& grads, AdamState& state, std::size_t t,
                const TrainConfig& cfg) {
  if (t < 1) throw ValidationError("adamw_step: step index starts at 1");
  const double c1 = cfg.bias_correction ? 1.0 - std::pow(cfg.beta1, static_cast<double>(t)) : 1.0;
  const double c2 = cfg.bias_correction ? 1.0 - std::pow(cfg.beta2, static_cast<double>(t)) : 1.0;

  std::vector<const Tensor*> g;
  std::vector<Tensor*> m;
  std::vector<Tensor*> v;
  grads.for_each([&](const std::string&, const Tensor& x, bool) { g.push_back(&x); });
  state.m.for_each([&](const std::string&, Tensor& x, bool) { m.push_back(&x); });
  state.v.for_each([&](const std::string&, Tensor& x, bool) { v.push_back(&x); });

  std::size_t k = 0;
  params.for_each([&](const std::string& name, Tensor& p, bool decay) {
    const Tensor& gk = *g[k];
    Tensor& mk = *m[k];
    Tensor& vk = *v[k];
    ++k;
    if (gk.size() != p.size() || mk.size() != p.size() || vk.size() != p.size()) {
      throw ValidationError("adamw_step: shape mismatch in " + name);
    }
    const double shrink = decay ? 1.0 - cfg.learning_rate * cfg.weight_decay : 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = gk.data[i];
      mk.data[i] = cfg.beta1 * mk.data[i] + (1.0 - cfg.beta1) * gi;
      vk.data[i] = cfg.beta2 * vk.data[i] + (1.0 - cfg.beta2) * gi * gi;
      const double m_hat = mk.data[i] / c1;
      const double v_hat = vk.data[i] / c2;
      p.data[i] = p.data[i] * shrink - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  });
}

}  // namespace lovesim
