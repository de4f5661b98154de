#pragma once

#include <span>
#include <string>
#include <vector>

#include "lovesim/condition.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/vocab.hpp"

namespace lovesim {

// Token ids of
//   [CLS] partner [P-SEP] speaker [SEP] target [D-SEP] history [SEP]
// where masked segments are left empty but every separator stays. Inputs
// longer than max_len lose their oldest history tokens first, then tokens
// from the tail of whichever personality segment is longer.
std::vector<int> serialize_input(const TrainingExample& example, AblationCondition condition,
                                 const Vocab& vocab, std::size_t max_len);

// History rendered oldest first as "tag: text" lines.
std::string render_history(std::span<const HistoryTurn> history);

// Every text fragment serialize_input can tokenize for these examples; used
// to fit a vocabulary.
std::vector<std::string> vocab_texts(std::span<const TrainingExample> examples);

// [CLS] text [SEP], truncated to max_len.
std::vector<int> encode_plain(const std::string& text, const Vocab& vocab, std::size_t max_len);

}  // namespace lovesim
