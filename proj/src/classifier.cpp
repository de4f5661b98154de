#include "lovesim/classifier.hpp"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "lovesim/config.hpp"
#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/serialize.hpp"

namespace lovesim {

using nlohmann::json;

Prediction predict(const ModelParams& params, const TrainingExample& example,
                   AblationCondition condition, const Vocab& vocab, double threshold) {
  const auto tokens = serialize_input(example, condition, vocab, params.config.max_len);
  const double p = forward(params, tokens).probability;
  return {p, p >= threshold};
}

namespace {

EncoderConfig config_from_json(const json& j) {
  EncoderConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.d_model = j.at("d_model").get<std::size_t>();
  c.n_layers = j.at("n_layers").get<std::size_t>();
  c.n_heads = j.at("n_heads").get<std::size_t>();
  c.d_ff = j.at("d_ff").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threshold = j.at("threshold").get<double>();
  return c;
}

void append_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffU));
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string encode_classifier(const Classifier& c) {
  json tensors = json::array();
  c.params.for_each([&](const std::string& name, const Tensor& t, bool) {
    tensors.push_back({{"name", name}, {"shape", {t.rows, t.cols}}});
  });
  std::vector<std::string> vocab_tokens(c.vocab.tokens().begin() + kReservedTokenCount,
                                        c.vocab.tokens().end());
  json header = {{"format", "lovesim-model"},
                 {"version", kModelFormatVersion},
                 {"config", encoder_config_json(c.params.config)},
                 {"condition", to_string(c.condition)},
                 {"vocab", vocab_tokens},
                 {"tensors", tensors}};
  std::string out = header.dump();
  out.push_back('\n');
  c.params.for_each([&](const std::string&, const Tensor& t, bool) {
    for (double v : t.data) append_le(out, v);
  });
  return out;
}

Classifier decode_classifier(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ValidationError("model file: missing header line");
  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model file: bad header: ") + e.what());
  }
  if (header.value("format", "") != "lovesim-model" ||
      header.value("version", 0) != kModelFormatVersion) {
    throw ValidationError("model file: unsupported format or version");
  }
  Classifier c;
  const EncoderConfig cfg = config_from_json(header.at("config"));
  cfg.validate();
  c.params = zeros_like(cfg);
  c.condition = parse_condition(header.at("condition").get<std::string>());
  c.vocab = Vocab::from_tokens(header.at("vocab").get<std::vector<std::string>>());
  if (c.vocab.size() != cfg.vocab_size) throw ValidationError("model file: vocab size mismatch");

  const auto& shapes = header.at("tensors");
  std::size_t k = 0;
  std::size_t offset = nl + 1;
  c.params.for_each([&](const std::string& name, Tensor& t, bool) {
    if (k >= shapes.size() || shapes[k].at("name") != name ||
        shapes[k].at("shape")[0].get<std::size_t>() != t.rows ||
        shapes[k].at("shape")[1].get<std::size_t>() != t.cols) {
      throw ValidationError("model file: tensor layout mismatch at " + name);
    }
    ++k;
    if (offset + 8 * t.size() > bytes.size()) throw ValidationError("model file: truncated data");
    for (auto& v : t.data) {
      v = read_le(bytes.data() + offset);
      offset += 8;
    }
  });
  if (k != shapes.size() || offset != bytes.size()) {
    throw ValidationError("model file: trailing or missing tensors");
  }
  return c;
}

void save_classifier(const std::filesystem::path& path, const Classifier& classifier) {
  write_text_file(path, encode_classifier(classifier));
}

Classifier load_classifier(const std::filesystem::path& path) {
  return decode_classifier(read_text_file(path));
}

}  // namespace lovesim
