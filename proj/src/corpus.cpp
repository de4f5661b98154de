#include "lovesim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"

namespace lovesim {

double average_love_items(std::span<const int> items) {
  if (items.size() != kLoveItemCount) {
    throw ValidationError("love scale response needs 13 items, got " +
                          std::to_string(items.size()));
  }
  long sum = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] < kLikertMin || items[i] > kLikertMax) {
      throw ValidationError("love scale item " + std::to_string(i + 1) + " = " +
                            std::to_string(items[i]) + " is outside [1, 9]");
    }
    sum += items[i];
  }
  return static_cast<double>(sum) / static_cast<double>(kLoveItemCount);
}

LoveScaleEvent make_love_event(double t, std::span<const int> items) {
  LoveScaleEvent ev;
  ev.t = t;
  ev.mean = average_love_items(items);
  std::copy(items.begin(), items.end(), ev.items.begin());
  return ev;
}

Delta label_delta(double prev_mean, double new_mean) {
  if (!std::isfinite(prev_mean) || !std::isfinite(new_mean)) {
    throw ValidationError("label_delta: non-finite score");
  }
  if (new_mean > prev_mean) return Delta::Increase;
  if (new_mean < prev_mean) return Delta::Decrease;
  return Delta::Unchanged;
}

std::string to_string(Delta d) {
  switch (d) {
    case Delta::Increase: return "Increase";
    case Delta::Decrease: return "Decrease";
    case Delta::Unchanged: return "Unchanged";
  }
  return "Unchanged";
}

Delta parse_delta(const std::string& s) {
  if (s == "Increase") return Delta::Increase;
  if (s == "Decrease") return Delta::Decrease;
  if (s == "Unchanged") return Delta::Unchanged;
  throw ValidationError("unknown delta '" + s + "'");
}

namespace {

void validate_stream(const std::string& pair_id, const char* which,
                     const std::vector<LoveScaleEvent>& events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    if (!std::isfinite(ev.t)) {
      throw ValidationError(pair_id + ": " + which + "[" + std::to_string(i) + "] has non-finite t");
    }
    const double mean = average_love_items(ev.items);
    if (std::abs(mean - ev.mean) > 1e-12) {
      throw ValidationError(pair_id + ": " + which + "[" + std::to_string(i) +
                            "] mean does not match its items");
    }
    if (i > 0) {
      if (ev.t < events[i - 1].t) {
        throw ValidationError(pair_id + ": " + which + " not sorted by t");
      }
      if (ev.mean == events[i - 1].mean) {
        throw ValidationError(pair_id + ": " + which + "[" + std::to_string(i) +
                              "] repeats the previous score; events are recorded only on change");
      }
    }
  }
}

}  // namespace

void DialogueRecord::validate() const {
  profile_x.validate();
  profile_y.validate();
  if (profile_x.speaker_id == profile_y.speaker_id) {
    throw ValidationError(pair_id + ": both speakers share id " + profile_x.speaker_id);
  }
  double last_start = 0.0;
  double end_x = 0.0;
  double end_y = 0.0;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    const std::string where = pair_id + ": utterance " + std::to_string(i);
    if (u.text.empty()) throw ValidationError(where + " has empty text");
    if (!(u.t_start >= 0.0) || !(u.t_end >= u.t_start) || !std::isfinite(u.t_end)) {
      throw ValidationError(where + " has invalid times");
    }
    if (u.t_start < last_start) throw ValidationError(where + " is out of order");
    last_start = u.t_start;
    double* end = nullptr;
    if (u.speaker_id == profile_x.speaker_id) {
      end = &end_x;
    } else if (u.speaker_id == profile_y.speaker_id) {
      end = &end_y;
    } else {
      throw ValidationError(where + " has unknown speaker " + u.speaker_id);
    }
    if (u.t_start < *end) throw ValidationError(where + " overlaps the same speaker's previous turn");
    *end = u.t_end;
  }
  validate_stream(pair_id, "events_x", events_x);
  validate_stream(pair_id, "events_y", events_y);
}

const PersonalityProfile& DialogueRecord::profile_of(const std::string& speaker_id) const {
  if (speaker_id == profile_x.speaker_id) return profile_x;
  if (speaker_id == profile_y.speaker_id) return profile_y;
  throw ValidationError(pair_id + ": unknown speaker " + speaker_id);
}

const PersonalityProfile& DialogueRecord::partner_of(const std::string& speaker_id) const {
  if (speaker_id == profile_x.speaker_id) return profile_y;
  if (speaker_id == profile_y.speaker_id) return profile_x;
  throw ValidationError(pair_id + ": unknown speaker " + speaker_id);
}

namespace {

// Utterance active at t, preferring the rated speaker's turn and then the
// latest onset; otherwise the most recently ended one; events before the
// first utterance go to the first utterance.
std::size_t locate_utterance(const std::vector<Utterance>& utts, double t,
                             const std::string& rated_id) {
  std::optional<std::size_t> active;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const auto& u = utts[i];
    if (u.t_start <= t && t <= u.t_end) {
      if (!active || u.speaker_id == rated_id ||
          utts[*active].speaker_id != rated_id) {
        active = i;
      }
    }
  }
  if (active) return *active;
  if (t < utts.front().t_start) return 0;
  std::size_t best = 0;
  double best_end = -1.0;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (utts[i].t_end <= t && utts[i].t_end >= best_end) {
      best = i;
      best_end = utts[i].t_end;
    }
  }
  return best;
}

RaterLabels label_stream(const DialogueRecord& d, const std::string& rater,
                         const std::string& rated, const std::vector<LoveScaleEvent>& events,
                         double initial_score) {
  RaterLabels out;
  out.rater_id = rater;
  out.rated_id = rated;
  out.labels.reserve(d.utterances.size());
  for (std::size_t i = 0; i < d.utterances.size(); ++i) {
    out.labels.push_back({i, d.utterances[i], rater, Delta::Unchanged, std::nullopt, 0});
  }
  // Score before the first attached event of each utterance.
  std::vector<double> before(d.utterances.size(), 0.0);
  double prev = initial_score;
  for (const auto& ev : events) {
    const std::size_t idx = locate_utterance(d.utterances, ev.t, rated);
    auto& lab = out.labels[idx];
    if (lab.attached_events == 0) before[idx] = prev;
    ++lab.attached_events;
    lab.score_after = ev.mean;
    prev = ev.mean;
  }
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    auto& lab = out.labels[i];
    if (lab.attached_events > 0) lab.delta = label_delta(before[i], *lab.score_after);
  }
  return out;
}

}  // namespace

std::vector<RaterLabels> attach_love_events(const DialogueRecord& dialogue, double initial_score) {
  if (dialogue.utterances.empty()) {
    throw ValidationError(dialogue.pair_id + ": dialogue has no utterances");
  }
  const auto& x = dialogue.profile_x.speaker_id;
  const auto& y = dialogue.profile_y.speaker_id;
  return {label_stream(dialogue, x, y, dialogue.events_x, initial_score),
          label_stream(dialogue, y, x, dialogue.events_y, initial_score)};
}

std::vector<TrainingExample> build_examples(std::span<const DialogueRecord> corpus,
                                            std::size_t history_len, double initial_score) {
  std::vector<TrainingExample> out;
  for (const auto& d : corpus) {
    for (const auto& stream : attach_love_events(d, initial_score)) {
      const auto& rater_profile = d.profile_of(stream.rater_id);
      const auto& rated_profile = d.profile_of(stream.rated_id);
      for (const auto& lab : stream.labels) {
        if (lab.utterance.speaker_id != stream.rated_id) continue;
        TrainingExample ex;
        ex.pair_id = d.pair_id;
        ex.utterance_index = lab.index;
        ex.partner_profile = rater_profile;
        ex.speaker_profile = rated_profile;
        ex.target_text = lab.utterance.text;
        const std::size_t first = lab.index > history_len ? lab.index - history_len : 0;
        for (std::size_t i = first; i < lab.index; ++i) {
          const auto& u = d.utterances[i];
          ex.history.push_back(
              {u.speaker_id == stream.rated_id ? kSpeakerTag : kPartnerTag, u.text});
        }
        ex.delta = lab.delta;
        ex.label = lab.delta == Delta::Increase;
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

std::vector<TrainingExample> balance_dataset(std::span<const TrainingExample> examples,
                                             std::size_t target_pos, std::size_t target_neg,
                                             std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    (examples[i].label ? pos : neg).push_back(i);
  }
  if (pos.size() < target_pos) {
    throw ValidationError("balance_dataset: need " + std::to_string(target_pos) +
                          " positive (Increase) examples, only " + std::to_string(pos.size()) +
                          " available");
  }
  if (neg.size() < target_neg) {
    throw ValidationError("balance_dataset: need " + std::to_string(target_neg) +
                          " negative (Decrease/Unchanged) examples, only " +
                          std::to_string(neg.size()) + " available");
  }
  Rng rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> chosen(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(target_pos));
  chosen.insert(chosen.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(target_neg));
  std::shuffle(chosen.begin(), chosen.end(), rng);
  std::vector<TrainingExample> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(examples[i]);
  return out;
}

std::vector<Fold> make_folds(std::span<const std::string> pair_ids, std::uint64_t seed) {
  const std::size_t n = pair_ids.size();
  if (n < 4 || n % 2 != 0) {
    throw ValidationError("make_folds: need an even number of pairs >= 4, got " +
                          std::to_string(n));
  }
  std::set<std::string> unique(pair_ids.begin(), pair_ids.end());
  if (unique.size() != n) throw ValidationError("make_folds: duplicate pair ids");

  std::vector<std::string> order(pair_ids.begin(), pair_ids.end());
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Fold> folds;
  folds.reserve(n / 2);
  for (std::size_t f = 0; f < n / 2; ++f) {
    const auto& a = order[2 * f];
    const auto& b = order[2 * f + 1];
    Fold fold;
    for (const auto& p : pair_ids) {
      if (p != a && p != b) fold.train_pairs.push_back(p);
    }
    fold.val_pairs = {a, b};
    fold.test_pairs = {a, b};
    folds.push_back(std::move(fold));
  }
  return folds;
}

HeldOutSplit split_held_out(std::span<const TrainingExample> examples, const Fold& fold,
                            std::uint64_t seed) {
  HeldOutSplit out;
  for (std::size_t k = 0; k < fold.test_pairs.size(); ++k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].pair_id == fold.test_pairs[k]) idx.push_back(i);
    }
    Rng rng(derive_seed(seed, {k}));
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t half = idx.size() / 2;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      (j < half ? out.val : out.test).push_back(examples[idx[j]]);
    }
  }
  return out;
}

std::vector<std::string> pair_ids_of(std::span<const DialogueRecord> corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const auto& d : corpus) ids.push_back(d.pair_id);
  return ids;
}

}  // namespace lovesim
