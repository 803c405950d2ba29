#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "endtag/error.hpp"

namespace endtag {

struct Token {
  std::string word;  // non-empty, no whitespace
  std::string tag;   // non-empty, no whitespace

  bool operator==(const Token&) const = default;
};

using Sentence = std::vector<Token>;

struct TaggedCorpus {
  std::vector<Sentence> sentences;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  std::set<std::string> tagset() const {
    std::set<std::string> tags;
    for (const auto& s : sentences)
      for (const auto& tok : s) tags.insert(tok.tag);
    return tags;
  }

  bool operator==(const TaggedCorpus&) const = default;
};

namespace detail {

inline bool has_whitespace(std::string_view s) {
  return s.find_first_of(" \t\r\n\v\f") != std::string_view::npos;
}

}  // namespace detail

// Canonical format: one `word<TAB>tag` per line, blank line ends a sentence.
inline TaggedCorpus parse_corpus(std::istream& in) {
  TaggedCorpus corpus;
  Sentence current;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) {
        corpus.sentences.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("line " + std::to_string(lineno) + ": missing tab separator");
    std::string word = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (word.empty())
      throw DataError("line " + std::to_string(lineno) + ": empty word");
    if (tag.empty())
      throw DataError("line " + std::to_string(lineno) + ": empty tag");
    if (detail::has_whitespace(word) || detail::has_whitespace(tag))
      throw DataError("line " + std::to_string(lineno) + ": whitespace inside field");
    current.push_back(Token{std::move(word), std::move(tag)});
  }
  if (!current.empty()) corpus.sentences.push_back(std::move(current));
  if (corpus.sentences.empty()) throw DataError("empty corpus");
  return corpus;
}

inline TaggedCorpus parse_corpus(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_corpus(in);
}

inline std::string serialize_corpus(const TaggedCorpus& corpus) {
  std::string out;
  bool first = true;
  for (const auto& sentence : corpus.sentences) {
    if (!first) out += '\n';
    first = false;
    for (const auto& tok : sentence) {
      out += tok.word;
      out += '\t';
      out += tok.tag;
      out += '\n';
    }
  }
  return out;
}

// Inline annotation (`word_TAG` tokens, one sentence per line) to canonical.
// The last underscore splits word from tag.
inline std::string convert_inline(std::istream& in) {
  std::string out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::string token;
    bool any = false;
    std::string sentence_out;
    while (words >> token) {
      auto us = token.rfind('_');
      if (us == std::string::npos || us == 0 || us + 1 == token.size())
        throw DataError("token without word_TAG separator: '" + token + "'");
      sentence_out += token.substr(0, us);
      sentence_out += '\t';
      sentence_out += token.substr(us + 1);
      sentence_out += '\n';
      any = true;
    }
    if (!any) continue;
    if (!first) out += '\n';
    first = false;
    out += sentence_out;
  }
  return out;
}

inline std::string convert_inline(std::string_view text) {
  std::istringstream in{std::string(text)};
  return convert_inline(in);
}

// Sentence-granularity split; train gets ceil(fraction * sentences).
// Sentence order within each part follows the original corpus.
inline std::pair<TaggedCorpus, TaggedCorpus> split_corpus(const TaggedCorpus& corpus,
                                                          double train_fraction,
                                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0,1)");
  const std::size_t n = corpus.sentences.size();
  if (n < 2) throw ArgumentError("need at least 2 sentences to split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto train_n =
      static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + train_n);
  std::vector<std::size_t> test_idx(order.begin() + train_n, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  TaggedCorpus train, test;
  for (auto i : train_idx) train.sentences.push_back(corpus.sentences[i]);
  for (auto i : test_idx) test.sentences.push_back(corpus.sentences[i]);
  return {std::move(train), std::move(test)};
}

inline std::map<std::string, std::size_t> vocabulary(const TaggedCorpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus.sentences)
    for (const auto& tok : sentence) ++counts[tok.word];
  return counts;
}

}  // namespace endtag
