#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lovesim/rng.hpp"

namespace lovesim {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 24;
  std::size_t n_layers = 1;
  std::size_t n_heads = 2;
  std::size_t d_ff = 48;
  std::size_t max_len = 64;
  double dropout = 0.0;
  std::uint64_t seed = 1;
  double threshold = 0.5;

  bool operator==(const EncoderConfig&) const = default;
  void validate() const;
};

// Dense row-major matrix; vectors are 1 x n.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Tensor&) const = default;
};

struct LayerParams {
  Tensor ln1_gain, ln1_bias;
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ln2_gain, ln2_bias;
  Tensor w1, b1, w2, b2;

  bool operator==(const LayerParams&) const = default;
};

// Pre-norm transformer encoder with learned positions, a final layer norm,
// max pooling over non-pad positions, and a logistic head.
struct ModelParams {
  EncoderConfig config;
  Tensor token_embedding;     // vocab_size x d_model
  Tensor position_embedding;  // max_len x d_model
  std::vector<LayerParams> layers;
  Tensor final_gain, final_bias;
  Tensor head_weight;  // 1 x d_model
  Tensor head_bias;    // 1 x 1

  bool operator==(const ModelParams&) const = default;

  using Visitor = std::function<void(const std::string& name, Tensor& t, bool decay)>;
  using ConstVisitor = std::function<void(const std::string& name, const Tensor& t, bool decay)>;

  // Visits every tensor in storage order. `decay` is true for weight
  // matrices and false for biases and layer-norm parameters.
  void for_each(const Visitor& f);
  void for_each(const ConstVisitor& f) const;

  std::size_t parameter_count() const;
};

// Shapes from config, all entries zero.
ModelParams zeros_like(const EncoderConfig& config);
ModelParams init_params(const EncoderConfig& config);

struct ForwardResult {
  Tensor hidden;                // len x d_model, final layer-normed states
  std::vector<double> pooled;   // d_model
  std::vector<std::size_t> argmax;  // position chosen by the max for each dim
  double logit = 0.0;
  double probability = 0.0;
};

// Pad tokens are excluded from attention keys and from pooling. Throws
// ValidationError on empty input, all-pad input, out-of-range ids or
// sequences longer than max_len.
ForwardResult forward(const ModelParams& params, std::span<const int> tokens);

// The head applied to an already pooled vector.
double head_probability(const ModelParams& params, std::span<const double> pooled);

struct EncodedExample {
  std::vector<int> tokens;
  double label = 0.0;
};

struct LossAndGrad {
  double loss = 0.0;
  ModelParams grad;
};

inline constexpr double kLogClamp = 1e-12;

// Clamped binary cross entropy for one probability/label pair.
double bce(double probability, double label);

// Mean clamped BCE over the batch and its exact gradient. With a non-null
// rng and config.dropout > 0 dropout is active. Throws std::runtime_error on
// a non-finite loss, naming the example.
LossAndGrad loss_and_grad(const ModelParams& params, std::span<const EncodedExample> batch,
                          Rng* dropout_rng = nullptr);

}  // namespace lovesim
