#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lovesim {

enum SpecialToken : int {
  kPadId = 0,
  kClsId = 1,
  kSepId = 2,
  kPSepId = 3,
  kDSepId = 4,
  kUnkId = 5,
};
inline constexpr int kReservedTokenCount = 6;

// Lower-cases ASCII and splits on whitespace. Every ASCII punctuation char is
// its own token, except '.' between digits so decimals like 0.9 stay whole.
// Non-ASCII bytes are treated as word characters.
std::vector<std::string> tokenize(std::string_view text);

class Vocab {
 public:
  Vocab();  // reserved tokens only

  // `tokens` are the ordinary tokens in id order, starting at id 6.
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  int id(std::string_view token) const;  // kUnkId when absent
  const std::string& token(int id) const;
  std::size_t size() const { return id_to_token_.size(); }
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  std::vector<int> encode(std::string_view text) const;

  bool operator==(const Vocab& other) const { return id_to_token_ == other.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Token inventory by descending frequency, ties broken lexicographically,
// capped so that the vocabulary (reserved tokens included) has max_size ids.
Vocab fit_vocab(std::span<const std::string> texts, std::size_t max_size);

}  // namespace lovesim
