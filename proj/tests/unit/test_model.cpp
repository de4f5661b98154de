#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gradcheck.hpp"
#include "lovesim/error.hpp"
#include "lovesim/model.hpp"

using namespace lovesim;

namespace {

EncoderConfig tiny(std::uint64_t seed = 3) {
  EncoderConfig c;
  c.vocab_size = 20;
  c.d_model = 8;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_len = 32;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("pooled vector is the column max of the hidden states") {
  const auto params = init_params(tiny());
  const std::vector<int> tokens = {kClsId, 7, 8, 9, kSepId};
  const auto r = forward(params, tokens);
  REQUIRE(r.hidden.rows == tokens.size());
  for (std::size_t j = 0; j < params.config.d_model; ++j) {
    double m = -INFINITY;
    for (std::size_t i = 0; i < r.hidden.rows; ++i) m = std::max(m, r.hidden(i, j));
    CHECK(r.pooled[j] == m);
    CHECK(r.hidden(r.argmax[j], j) == m);
  }
  CHECK(r.probability == head_probability(params, r.pooled));
}

TEST_CASE("head on a hand-built pooled vector") {
  EncoderConfig c = tiny();
  c.d_model = 2;
  c.n_heads = 1;
  auto params = zeros_like(c);
  params.head_weight.data = {1.0, 0.0};
  params.head_bias.data = {0.0};
  // Column max of H = [[1, -2], [3, 0.5]].
  const std::vector<double> pooled = {std::max(1.0, 3.0), std::max(-2.0, 0.5)};
  CHECK(pooled == std::vector<double>{3.0, 0.5});
  CHECK(head_probability(params, pooled) == doctest::Approx(0.95257).epsilon(1e-5));
  CHECK(head_probability(params, pooled) == doctest::Approx(1.0 / (1.0 + std::exp(-3.0))));
}

TEST_CASE("CLS followed by padding gives a finite probability") {
  const auto params = init_params(tiny());
  std::vector<int> tokens(32, kPadId);
  tokens[0] = kClsId;
  const auto r = forward(params, tokens);
  CHECK(std::isfinite(r.probability));
  CHECK(r.probability > 0.0);
  CHECK(r.probability < 1.0);
}

TEST_CASE("invalid inputs") {
  const auto params = init_params(tiny());
  CHECK_THROWS_AS(forward(params, std::vector<int>{}), ValidationError);
  CHECK_THROWS_AS(forward(params, std::vector<int>{kPadId, kPadId}), ValidationError);
  CHECK_THROWS_AS(forward(params, std::vector<int>{kClsId, 20}), ValidationError);
  CHECK_THROWS_AS(forward(params, std::vector<int>{kClsId, -1}), ValidationError);
  CHECK_THROWS_AS(forward(params, std::vector<int>(33, kClsId)), ValidationError);
  auto bad = tiny();
  bad.n_heads = 3;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(loss_and_grad(params, std::span<const EncodedExample>{}), ValidationError);
}

TEST_CASE("binary cross entropy") {
  CHECK(bce(0.5, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(bce(0.5, 0.0) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(bce(1.0, 1.0) <= 1e-11 * std::abs(std::log(1e-12)));
  CHECK(bce(0.0, 0.0) <= 1e-11 * std::abs(std::log(1e-12)));
  CHECK(bce(0.0, 1.0) == doctest::Approx(-std::log(1e-12)));
  CHECK(std::isfinite(bce(1.0, 0.0)));
}

TEST_CASE("padding never changes the probability") {
  const auto params = init_params(tiny(11));
  const std::vector<int> base = {kClsId, 9, 12, 7, 7, 15, kSepId};
  const double p = forward(params, base).probability;
  for (std::size_t extra = 1; base.size() + extra <= 32; extra += 5) {
    auto padded = base;
    padded.resize(base.size() + extra, kPadId);
    CHECK(forward(params, padded).probability == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("permuting hidden rows leaves the pooled vector and probability unchanged") {
  const auto params = init_params(tiny(5));
  const auto r = forward(params, std::vector<int>{kClsId, 6, 10, 14, 18, kSepId});
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> order(r.hidden.rows);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> pooled(r.hidden.cols, -INFINITY);
    for (std::size_t i : order) {
      for (std::size_t j = 0; j < r.hidden.cols; ++j) pooled[j] = std::max(pooled[j], r.hidden(i, j));
    }
    CHECK(pooled == r.pooled);
    CHECK(head_probability(params, pooled) == r.probability);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  auto c = tiny(7);
  c.n_layers = 1;
  const auto report = gradcheck::check(c, 2);
  INFO("worst at " << report.worst_name << "[" << report.worst_index << "] analytic "
                   << report.worst_analytic << " numeric " << report.worst_numeric);
  CHECK(report.coordinates == init_params(c).parameter_count());
  CHECK(report.worst_relative < 1e-3);
}

TEST_CASE("weight decay flags cover matrices only") {
  const auto params = init_params(tiny());
  std::size_t decayed = 0;
  params.for_each([&](const std::string& name, const Tensor& t, bool decay) {
    const auto dot = name.rfind('.');
    const std::string last = dot == std::string::npos ? name : name.substr(dot + 1);
    const bool vector_param = name.find("gain") != std::string::npos ||
                              name.find("bias") != std::string::npos || last[0] == 'b';
    CHECK(decay == !vector_param);
    decayed += decay;
    (void)t;
  });
  CHECK(decayed > 0);
}

TEST_CASE("initialization is seeded") {
  CHECK(init_params(tiny(1)) == init_params(tiny(1)));
  CHECK_FALSE(init_params(tiny(1)) == init_params(tiny(2)));
}

}
