#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "endtag/corpus.hpp"
#include "endtag/error.hpp"
#include "endtag/lexicon.hpp"
#include "endtag/transition.hpp"

namespace endtag {

struct RunConfig {
  std::size_t ending_length = 3;
  std::size_t top_n = 0;
  EtlStrategy etl = EtlStrategy::unit;
  SmoothingPolicy smoothing = SmoothingPolicy::mle;
  std::set<std::string> closed_class_tags;
  bool doubled = false;
  std::string boundary_tag = "__BOUNDARY__";
  std::uint64_t seed = 0;
};

struct TaggerModel {
  LexicalModel lexical;
  BigramCounts bigrams;
  FreqOfFreqs fof;
  RunConfig config;
  TransitionTable transitions;

  void rebuild_transition_table() {
    transitions = build_transition_table(bigrams, fof, config.smoothing);
  }
};

inline TaggerModel train_tagger(const TaggedCorpus& corpus, const RunConfig& config) {
  if (config.ending_length < 1) throw ArgumentError("ending length must be >= 1");
  TaggerModel model;
  model.config = config;

  const auto vocab = vocabulary(corpus);
  const auto frequent = select_frequent_words(vocab, config.top_n);
  auto transformed =
      transform_corpus(corpus, frequent, config.ending_length, config.closed_class_tags);
  if (config.doubled) {
    FrequentWordSet none;
    auto truncated_only =
        transform_corpus(corpus, none, config.ending_length, config.closed_class_tags);
    transformed = double_up(truncated_only, transformed);
  }
  model.lexical =
      train_lexical(transformed, config.etl, corpus, frequent, config.closed_class_tags);
  model.bigrams = count_bigrams(corpus, config.boundary_tag);
  model.fof = freq_of_freqs(model.bigrams);
  model.rebuild_transition_table();
  return model;
}

// Tags the decoder is allowed to consider for a word, sorted.
inline std::vector<std::string> candidate_tags(const TaggerModel& model,
                                               const std::string& word) {
  const LexicalModel& lex = model.lexical;
  std::set<std::string> tags;
  if (lex.strategy == EtlStrategy::unit) {
    auto it = lex.word_tagsets.find(word);
    if (it != lex.word_tagsets.end() && it->second.size() == 1) {
      tags = it->second;
    } else {
      tags = lex.unit_etl(lex.unit_for(word));
    }
  } else {
    tags = lex.unit_etl(lex.unit_for(word));
  }
  if (tags.empty()) tags = lex.open_class_tags;
  return {tags.begin(), tags.end()};
}

struct DecodedSentence {
  std::vector<std::string> words;
  std::vector<std::string> tags;
  double log_score = 0.0;
  bool used_fallback = false;
};

// Decoding lattice: per position, the allowed tags (sorted) and their
// log-emissions.
struct Lattice {
  struct Position {
    std::vector<std::string> tags;
    std::vector<double> log_emissions;
  };
  std::vector<Position> positions;
};

namespace detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_or_neg_inf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace detail

inline Lattice build_lattice(const TaggerModel& model, const std::vector<std::string>& words) {
  Lattice lattice;
  lattice.positions.reserve(words.size());
  for (const auto& word : words) {
    Lattice::Position pos;
    pos.tags = candidate_tags(model, word);
    pos.log_emissions.reserve(pos.tags.size());
    for (const auto& tag : pos.tags)
      pos.log_emissions.push_back(detail::log_or_neg_inf(emission_prob(model.lexical, word, tag)));
    lattice.positions.push_back(std::move(pos));
  }
  return lattice;
}

// Canonical path score; viterbi and the brute-force oracle accumulate in this
// exact order so equal paths give bitwise-equal scores.
inline double score_path(const Lattice& lattice, const TransitionTable& transitions,
                         const std::vector<std::size_t>& choice) {
  double s = 0.0;
  const std::string* prev = &transitions.boundary_tag;
  for (std::size_t i = 0; i < lattice.positions.size(); ++i) {
    const auto& pos = lattice.positions[i];
    const std::string& tag = pos.tags[choice[i]];
    s += detail::log_or_neg_inf(transitions.prob(*prev, tag));
    s += pos.log_emissions[choice[i]];
    prev = &tag;
  }
  s += detail::log_or_neg_inf(transitions.prob(*prev, transitions.boundary_tag));
  return s;
}

namespace detail {

// Per-token emission argmax; used when no path has positive probability.
inline std::vector<std::size_t> fallback_choice(const Lattice& lattice) {
  std::vector<std::size_t> choice;
  choice.reserve(lattice.positions.size());
  for (const auto& pos : lattice.positions) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pos.tags.size(); ++j)
      if (pos.log_emissions[j] > pos.log_emissions[best]) best = j;
    choice.push_back(best);
  }
  return choice;
}

inline std::vector<std::size_t> backtrack(const std::vector<std::vector<std::size_t>>& back,
                                          std::size_t last_pos, std::size_t last_state) {
  std::vector<std::size_t> path(last_pos + 1);
  std::size_t state = last_state;
  for (std::size_t i = last_pos + 1; i-- > 0;) {
    path[i] = state;
    if (i > 0) state = back[i][state];
  }
  return path;
}

// Lexicographic comparison of two prefixes ending at position i in states a
// and b; used only to resolve exact score ties.
inline bool prefix_less(const Lattice& lattice, const std::vector<std::vector<std::size_t>>& back,
                        std::size_t i, std::size_t a, std::size_t b) {
  auto pa = backtrack(back, i, a);
  auto pb = backtrack(back, i, b);
  for (std::size_t k = 0; k <= i; ++k) {
    const auto& tags = lattice.positions[k].tags;
    if (tags[pa[k]] != tags[pb[k]]) return tags[pa[k]] < tags[pb[k]];
  }
  return false;
}

}  // namespace detail

// Viterbi over the lattice with both boundary transitions. Ties broken by the
// lexicographically smallest tag sequence.
inline std::pair<std::vector<std::size_t>, double> viterbi_lattice(
    const Lattice& lattice, const TransitionTable& transitions) {
  if (lattice.positions.empty()) throw ArgumentError("cannot decode an empty sentence");
  const std::size_t n = lattice.positions.size();
  std::vector<std::vector<double>> best(n);
  std::vector<std::vector<std::size_t>> back(n);

  {
    const auto& pos = lattice.positions[0];
    best[0].resize(pos.tags.size());
    back[0].resize(pos.tags.size(), 0);
    for (std::size_t j = 0; j < pos.tags.size(); ++j) {
      double s = detail::log_or_neg_inf(transitions.prob(transitions.boundary_tag, pos.tags[j]));
      s += pos.log_emissions[j];
      best[0][j] = s;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const auto& pos = lattice.positions[i];
    const auto& prev_pos = lattice.positions[i - 1];
    best[i].assign(pos.tags.size(), detail::kNegInf);
    back[i].assign(pos.tags.size(), 0);
    for (std::size_t j = 0; j < pos.tags.size(); ++j) {
      double best_score = detail::kNegInf;
      std::size_t best_prev = 0;
      for (std::size_t k = 0; k < prev_pos.tags.size(); ++k) {
        double s = best[i - 1][k];
        s += detail::log_or_neg_inf(transitions.prob(prev_pos.tags[k], pos.tags[j]));
        s += pos.log_emissions[j];
        if (s > best_score) {
          best_score = s;
          best_prev = k;
        } else if (s == best_score && s != detail::kNegInf &&
                   detail::prefix_less(lattice, back, i - 1, k, best_prev)) {
          best_prev = k;
        }
      }
      best[i][j] = best_score;
      back[i][j] = best_prev;
    }
  }

  double final_best = detail::kNegInf;
  std::size_t final_state = 0;
  const auto& last = lattice.positions[n - 1];
  for (std::size_t j = 0; j < last.tags.size(); ++j) {
    double s = best[n - 1][j];
    s += detail::log_or_neg_inf(transitions.prob(last.tags[j], transitions.boundary_tag));
    if (s > final_best) {
      final_best = s;
      final_state = j;
    } else if (s == final_best && s != detail::kNegInf &&
               detail::prefix_less(lattice, back, n - 1, j, final_state)) {
      final_state = j;
    }
  }
  if (final_best == detail::kNegInf) return {detail::fallback_choice(lattice), detail::kNegInf};
  return {detail::backtrack(back, n - 1, final_state), final_best};
}

// Exhaustive oracle: scores every tag sequence with the identical scoring
// function; sequences enumerated in lexicographic order, strict improvement.
inline std::pair<std::vector<std::size_t>, double> brute_force_lattice(
    const Lattice& lattice, const TransitionTable& transitions) {
  if (lattice.positions.empty()) throw ArgumentError("cannot decode an empty sentence");
  double paths = 1.0;
  for (const auto& pos : lattice.positions) paths *= static_cast<double>(pos.tags.size());
  if (paths > 1e6) throw ArgumentError("lattice too large for brute-force decoding");

  const std::size_t n = lattice.positions.size();
  std::vector<std::size_t> choice(n, 0);
  std::vector<std::size_t> best_choice = choice;
  double best_score = score_path(lattice, transitions, choice);
  while (true) {
    // advance odometer; tag lists are sorted, so this is lexicographic order
    std::size_t i = n;
    while (i-- > 0) {
      if (++choice[i] < lattice.positions[i].tags.size()) break;
      choice[i] = 0;
      if (i == 0) {
        if (best_score == detail::kNegInf)
          return {detail::fallback_choice(lattice), detail::kNegInf};
        return {best_choice, best_score};
      }
    }
    const double s = score_path(lattice, transitions, choice);
    if (s > best_score) {
      best_score = s;
      best_choice = choice;
    }
  }
}

namespace detail {

inline DecodedSentence to_decoded(const Lattice& lattice, const std::vector<std::string>& words,
                                  const std::pair<std::vector<std::size_t>, double>& result) {
  DecodedSentence out;
  out.words = words;
  out.tags.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    out.tags.push_back(lattice.positions[i].tags[result.first[i]]);
  out.log_score = result.second;
  out.used_fallback = result.second == kNegInf;
  return out;
}

}  // namespace detail

inline DecodedSentence viterbi(const TaggerModel& model, const std::vector<std::string>& words) {
  if (words.empty()) throw ArgumentError("cannot decode an empty sentence");
  const Lattice lattice = build_lattice(model, words);
  return detail::to_decoded(lattice, words, viterbi_lattice(lattice, model.transitions));
}

inline DecodedSentence brute_force_decode(const TaggerModel& model,
                                          const std::vector<std::string>& words) {
  if (words.empty()) throw ArgumentError("cannot decode an empty sentence");
  const Lattice lattice = build_lattice(model, words);
  return detail::to_decoded(lattice, words, brute_force_lattice(lattice, model.transitions));
}

struct Span {
  std::size_t begin = 0;  // inclusive
  std::size_t end = 0;    // inclusive

  bool operator==(const Span&) const = default;
};

// Split at tokens whose candidate set is a singleton; adjacent spans share the
// unambiguous token.
inline std::vector<Span> segment_spans(const TaggerModel& model,
                                       const std::vector<std::string>& words) {
  std::vector<Span> spans;
  if (words.empty()) return spans;
  const std::size_t n = words.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (candidate_tags(model, words[i]).size() == 1) {
      spans.push_back({start, i});
      start = i;
    }
  }
  if (spans.empty() || spans.back().end != n - 1) spans.push_back({start, n - 1});
  return spans;
}

// Span-wise decode: each span is decoded independently with its unambiguous
// endpoints pinned; equivalent to whole-sentence viterbi.
inline DecodedSentence decode_spans(const TaggerModel& model,
                                    const std::vector<std::string>& words) {
  if (words.empty()) throw ArgumentError("cannot decode an empty sentence");
  const Lattice lattice = build_lattice(model, words);
  const auto spans = segment_spans(model, words);
  const std::size_t n = words.size();

  std::vector<std::size_t> choice(n, 0);
  bool dead = false;
  for (const auto& span : spans) {
    // the shared left endpoint of a non-initial span was decoded by the
    // previous span; decode the remaining positions given its tag
    const bool initial = span.begin == 0 && span == spans.front();
    const std::size_t from = initial ? span.begin : span.begin + 1;
    if (from > span.end) continue;

    Lattice sub;
    sub.positions.assign(lattice.positions.begin() + static_cast<std::ptrdiff_t>(from),
                         lattice.positions.begin() + static_cast<std::ptrdiff_t>(span.end) + 1);
    TransitionTable local = model.transitions;
    if (!initial) {
      // fold the pinned left context into a synthetic start row
      const std::string& pinned = lattice.positions[span.begin].tags[choice[span.begin]];
      local.rows[local.boundary_tag] = model.transitions.rows.at(pinned);
    }
    const bool last_span = span.end == n - 1;
    if (!last_span) {
      // interior span: no end-boundary transition; the next span's pinned
      // token carries the outgoing transition. End the sub-lattice at the
      // unambiguous right endpoint with a free exit.
      for (auto& [prev, row] : local.rows) row[local.boundary_tag] = 1.0;
    }
    auto [sub_choice, sub_score] = viterbi_lattice(sub, local);
    if (sub_score == detail::kNegInf) dead = true;
    for (std::size_t i = 0; i < sub_choice.size(); ++i) choice[from + i] = sub_choice[i];
  }

  if (dead) {
    return detail::to_decoded(lattice, words,
                              std::make_pair(detail::fallback_choice(lattice), detail::kNegInf));
  }
  DecodedSentence out = detail::to_decoded(lattice, words, std::make_pair(choice, 0.0));
  out.log_score = score_path(lattice, model.transitions, choice);
  out.used_fallback = false;
  return out;
}

}  // namespace endtag
