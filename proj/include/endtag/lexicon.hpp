#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "endtag/corpus.hpp"
#include "endtag/error.hpp"

namespace endtag {

// Final L characters of a word, counted in Unicode scalar values.
// Words shorter than L are their own ending.
inline std::string extract_ending(std::string_view word, std::size_t ending_length) {
  if (ending_length < 1) throw ArgumentError("ending length must be >= 1");
  if (word.empty()) throw ArgumentError("cannot take the ending of an empty word");
  std::size_t taken = 0;
  std::size_t pos = word.size();
  while (pos > 0 && taken < ending_length) {
    --pos;
    // count code points, not bytes: skip UTF-8 continuation bytes
    if ((static_cast<unsigned char>(word[pos]) & 0xC0) != 0x80) ++taken;
  }
  return std::string(word.substr(pos));
}

struct FrequentWordSet {
  std::set<std::string> words;
  std::size_t n_requested = 0;

  bool contains(const std::string& w) const { return words.count(w) != 0; }
};

// The N highest-token-frequency words; ties at the cutoff broken by
// code-point order, smaller first.
inline FrequentWordSet select_frequent_words(const std::map<std::string, std::size_t>& vocab,
                                             std::size_t n) {
  std::vector<std::pair<std::string, std::size_t>> ranked(vocab.begin(), vocab.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  FrequentWordSet out;
  out.n_requested = n;
  const std::size_t take = std::min(n, ranked.size());
  for (std::size_t i = 0; i < take; ++i) out.words.insert(ranked[i].first);
  return out;
}

enum class UnitKind { word, ending };

struct LexicalUnit {
  UnitKind kind;
  std::string text;

  auto operator<=>(const LexicalUnit&) const = default;
};

enum class EtlStrategy { unit, relexed };

inline std::string to_string(EtlStrategy s) {
  return s == EtlStrategy::unit ? "unit" : "relexed";
}

inline EtlStrategy etl_strategy_from_string(std::string_view s) {
  if (s == "unit") return EtlStrategy::unit;
  if (s == "relexed") return EtlStrategy::relexed;
  throw ArgumentError("unknown ETL strategy: '" + std::string(s) + "'");
}

struct TransformedToken {
  LexicalUnit unit;
  std::string tag;
};

struct TransformedCorpus {
  std::size_t ending_length = 0;
  std::vector<std::vector<TransformedToken>> sentences;
};

// Keep a token whole when its word is frequent or its tag is closed-class;
// truncate everything else to its ending.
inline TransformedCorpus transform_corpus(const TaggedCorpus& corpus,
                                          const FrequentWordSet& frequent,
                                          std::size_t ending_length,
                                          const std::set<std::string>& closed_class_tags) {
  TransformedCorpus out;
  out.ending_length = ending_length;
  out.sentences.reserve(corpus.sentences.size());
  for (const auto& sentence : corpus.sentences) {
    std::vector<TransformedToken> row;
    row.reserve(sentence.size());
    for (const auto& tok : sentence) {
      if (frequent.contains(tok.word) || closed_class_tags.count(tok.tag) != 0) {
        row.push_back({LexicalUnit{UnitKind::word, tok.word}, tok.tag});
      } else {
        row.push_back(
            {LexicalUnit{UnitKind::ending, extract_ending(tok.word, ending_length)}, tok.tag});
      }
    }
    out.sentences.push_back(std::move(row));
  }
  return out;
}

// Concatenate a fully-truncated copy with a mixed copy so ending statistics
// survive as N grows.
inline TransformedCorpus double_up(const TransformedCorpus& truncated_only,
                                   const TransformedCorpus& mixed) {
  if (truncated_only.ending_length != mixed.ending_length)
    throw ArgumentError("cannot double up corpora with different ending lengths");
  TransformedCorpus out;
  out.ending_length = mixed.ending_length;
  out.sentences = truncated_only.sentences;
  out.sentences.insert(out.sentences.end(), mixed.sentences.begin(), mixed.sentences.end());
  return out;
}

struct LexicalModel {
  std::size_t ending_length = 0;
  EtlStrategy strategy = EtlStrategy::unit;
  std::size_t n_requested = 0;

  // (unit, tag) counts from the transformed corpus and per-tag totals over
  // all units counted with that tag (word and ending units share one
  // normalizer; Σ_u P(u|t) = 1 over the transformed vocabulary).
  std::map<LexicalUnit, std::map<std::string, long>> emission_counts;
  std::map<std::string, long> tag_totals;

  // Words kept whole at training time; decode-time arm selection.
  std::set<std::string> whole_words;

  // Word-based tag sets from the original corpus. Under the unit strategy a
  // truncated token inherits its word's tag set; the key set also records the
  // training vocabulary.
  std::map<std::string, std::set<std::string>> word_tagsets;

  std::set<std::string> tagset;
  std::set<std::string> closed_class_tags;
  std::set<std::string> open_class_tags;

  LexicalUnit unit_for(const std::string& word) const {
    if (whole_words.count(word) != 0) return {UnitKind::word, word};
    return {UnitKind::ending, extract_ending(word, ending_length)};
  }

  // Tags a unit was observed with.
  std::set<std::string> unit_etl(const LexicalUnit& unit) const {
    std::set<std::string> tags;
    auto it = emission_counts.find(unit);
    if (it != emission_counts.end())
      for (const auto& [tag, count] : it->second)
        if (count > 0) tags.insert(tag);
    return tags;
  }
};

inline LexicalModel train_lexical(const TransformedCorpus& transformed,
                                  EtlStrategy strategy,
                                  const TaggedCorpus& original,
                                  const FrequentWordSet& frequent,
                                  const std::set<std::string>& closed_class_tags) {
  if (transformed.sentences.empty()) throw DataError("cannot train on an empty corpus");
  LexicalModel model;
  model.ending_length = transformed.ending_length;
  model.strategy = strategy;
  model.n_requested = frequent.n_requested;
  model.closed_class_tags = closed_class_tags;
  model.tagset = original.tagset();
  for (const auto& tag : model.tagset)
    if (closed_class_tags.count(tag) == 0) model.open_class_tags.insert(tag);

  for (const auto& sentence : transformed.sentences) {
    for (const auto& tok : sentence) {
      ++model.emission_counts[tok.unit][tok.tag];
      ++model.tag_totals[tok.tag];
      if (tok.unit.kind == UnitKind::word) model.whole_words.insert(tok.unit.text);
    }
  }
  for (const auto& sentence : original.sentences)
    for (const auto& tok : sentence) model.word_tagsets[tok.word].insert(tok.tag);
  return model;
}

// Eq-style mixed emission: whole-word statistics for kept words, ending
// statistics otherwise, uniform over open-class tags for wholly unseen units.
inline double emission_prob(const LexicalModel& model, const std::string& word,
                            const std::string& tag) {
  if (model.tagset.count(tag) == 0) throw ArgumentError("unknown tag: '" + tag + "'");
  const LexicalUnit unit = model.unit_for(word);
  auto it = model.emission_counts.find(unit);
  if (it == model.emission_counts.end()) {
    if (model.open_class_tags.count(tag) != 0)
      return 1.0 / static_cast<double>(model.open_class_tags.size());
    return 0.0;
  }
  auto ct = it->second.find(tag);
  const long c = ct == it->second.end() ? 0 : ct->second;
  auto tt = model.tag_totals.find(tag);
  const long total = tt == model.tag_totals.end() ? 0 : tt->second;
  return total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total);
}

}  // namespace endtag
