#include "lovesim/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "lovesim/error.hpp"

namespace lovesim {

namespace {

constexpr const char* kReserved[kReservedTokenCount] = {"[PAD]",   "[CLS]",   "[SEP]",
                                                        "[P-SEP]", "[D-SEP]", "[UNK]"};

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
    } else if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (c == '.' && !cur.empty() && std::isdigit(static_cast<unsigned char>(cur.back())) &&
               i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      cur.push_back('.');
    } else {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    }
  }
  flush();
  return out;
}

Vocab::Vocab() {
  for (int i = 0; i < kReservedTokenCount; ++i) {
    id_to_token_.emplace_back(kReserved[i]);
    token_to_id_.emplace(kReserved[i], i);
  }
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  Vocab v;
  for (const auto& t : tokens) {
    if (t.empty()) throw ValidationError("vocab: empty token");
    if (!v.token_to_id_.emplace(t, static_cast<int>(v.id_to_token_.size())).second) {
      throw ValidationError("vocab: duplicate token '" + t + "'");
    }
    v.id_to_token_.push_back(t);
  }
  return v;
}

int Vocab::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw ValidationError("vocab: id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& t : tokenize(text)) ids.push_back(id(t));
  return ids;
}

Vocab fit_vocab(std::span<const std::string> texts, std::size_t max_size) {
  if (max_size < kReservedTokenCount + 1) {
    throw ValidationError("fit_vocab: max_size must be at least 7, got " + std::to_string(max_size));
  }
  if (texts.empty()) throw ValidationError("fit_vocab: empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& t : texts) {
    for (auto& tok : tokenize(t)) ++counts[std::move(tok)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t keep = std::min(ranked.size(), max_size - kReservedTokenCount);
  std::vector<std::string> tokens;
  tokens.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) tokens.push_back(ranked[i].first);
  return Vocab::from_tokens(tokens);
}

}  // namespace lovesim
