#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "endtag/corpus.hpp"
#include "endtag/error.hpp"

namespace endtag {

enum class SmoothingPolicy { mle, add_one, good_turing };

inline std::string to_string(SmoothingPolicy p) {
  switch (p) {
    case SmoothingPolicy::mle: return "mle";
    case SmoothingPolicy::add_one: return "addone";
    case SmoothingPolicy::good_turing: return "gt";
  }
  return "mle";
}

inline SmoothingPolicy smoothing_from_string(std::string_view s) {
  if (s == "mle") return SmoothingPolicy::mle;
  if (s == "addone") return SmoothingPolicy::add_one;
  if (s == "gt") return SmoothingPolicy::good_turing;
  throw ArgumentError("unknown smoothing policy: '" + std::string(s) + "'");
}

struct BigramCounts {
  std::map<std::pair<std::string, std::string>, long> counts;
  std::map<std::string, long> row_totals;  // per previous tag, boundary included
  std::set<std::string> tagset;            // interior tags only
  std::string boundary_tag;

  long count(const std::string& prev, const std::string& tag) const {
    auto it = counts.find({prev, tag});
    return it == counts.end() ? 0 : it->second;
  }

  long total_tokens() const {
    long n = 0;
    for (const auto& [bigram, c] : counts) n += c;
    return n;
  }
};

// Each sentence contributes boundary->t1, t1->t2, ..., tn->boundary.
inline BigramCounts count_bigrams(const TaggedCorpus& corpus, const std::string& boundary_tag) {
  BigramCounts out;
  out.boundary_tag = boundary_tag;
  out.tagset = corpus.tagset();
  if (out.tagset.count(boundary_tag) != 0)
    throw ArgumentError("boundary tag '" + boundary_tag + "' occurs in the corpus");
  for (const auto& sentence : corpus.sentences) {
    const std::string* prev = &boundary_tag;
    for (const auto& tok : sentence) {
      ++out.counts[{*prev, tok.tag}];
      ++out.row_totals[*prev];
      prev = &tok.tag;
    }
    ++out.counts[{*prev, boundary_tag}];
    ++out.row_totals[*prev];
  }
  return out;
}

struct FreqOfFreqs {
  std::map<long, long> table;  // r >= 1 -> number of bigram types seen r times
  long total_types = 0;
  long seen_types = 0;

  long n(long r) const {
    auto it = table.find(r);
    return it == table.end() ? 0 : it->second;
  }
  long unseen_types() const { return total_types - seen_types; }
};

inline FreqOfFreqs freq_of_freqs(const BigramCounts& counts) {
  FreqOfFreqs out;
  const long t = static_cast<long>(counts.tagset.size());
  // every (prev, next) over tags plus boundary, minus boundary->boundary
  out.total_types = (t + 1) * (t + 1) - 1;
  for (const auto& [bigram, c] : counts.counts) {
    if (c <= 0) continue;
    ++out.table[c];
    ++out.seen_types;
  }
  return out;
}

// Adjusted count r* under the chosen estimator.
inline double adjust_count(long r, const FreqOfFreqs& fof, SmoothingPolicy policy) {
  if (r < 0) throw ArgumentError("negative count");
  switch (policy) {
    case SmoothingPolicy::mle:
      return static_cast<double>(r);
    case SmoothingPolicy::add_one:
      return static_cast<double>(r + 1);
    case SmoothingPolicy::good_turing: {
      if (r == 0) {
        const long unseen = fof.unseen_types();
        if (unseen <= 0) return 0.0;
        return static_cast<double>(fof.n(1)) / static_cast<double>(unseen);
      }
      const long nr = fof.n(r);
      if (nr == 0) throw ArgumentError("no bigram type with frequency " + std::to_string(r));
      const long nr1 = fof.n(r + 1);
      if (nr1 == 0) return static_cast<double>(r);  // gap in the table, keep raw count
      return static_cast<double>(r + 1) * static_cast<double>(nr1) / static_cast<double>(nr);
    }
  }
  return static_cast<double>(r);
}

namespace detail {

// Row columns: every interior tag, plus the end boundary for non-boundary
// rows. boundary->boundary is structurally impossible.
template <typename Fn>
void for_each_column(const BigramCounts& counts, const std::string& prev, Fn&& fn) {
  for (const auto& tag : counts.tagset) fn(tag);
  if (prev != counts.boundary_tag) fn(counts.boundary_tag);
}

}  // namespace detail

// Adjusted count of (t_prev, t) renormalized over the full row.
inline double transition_prob(const BigramCounts& counts, const FreqOfFreqs& fof,
                              SmoothingPolicy policy, const std::string& t_prev,
                              const std::string& t) {
  if (counts.tagset.count(t_prev) == 0 && t_prev != counts.boundary_tag)
    throw ArgumentError("unknown previous tag: '" + t_prev + "'");
  if (counts.tagset.count(t) == 0 && !(t == counts.boundary_tag && t_prev != counts.boundary_tag))
    return 0.0;
  double denom = 0.0;
  detail::for_each_column(counts, t_prev, [&](const std::string& col) {
    denom += adjust_count(counts.count(t_prev, col), fof, policy);
  });
  if (denom == 0.0) return 0.0;
  return adjust_count(counts.count(t_prev, t), fof, policy) / denom;
}

// Dense probability table for decoding; rows keyed by previous tag.
struct TransitionTable {
  std::map<std::string, std::map<std::string, double>> rows;
  std::string boundary_tag;

  double prob(const std::string& prev, const std::string& tag) const {
    auto it = rows.find(prev);
    if (it == rows.end()) return 0.0;
    auto jt = it->second.find(tag);
    return jt == it->second.end() ? 0.0 : jt->second;
  }
};

inline TransitionTable build_transition_table(const BigramCounts& counts, const FreqOfFreqs& fof,
                                              SmoothingPolicy policy) {
  TransitionTable table;
  table.boundary_tag = counts.boundary_tag;
  std::set<std::string> rows = counts.tagset;
  rows.insert(counts.boundary_tag);
  for (const auto& prev : rows) {
    double denom = 0.0;
    detail::for_each_column(counts, prev, [&](const std::string& col) {
      denom += adjust_count(counts.count(prev, col), fof, policy);
    });
    auto& row = table.rows[prev];
    detail::for_each_column(counts, prev, [&](const std::string& col) {
      row[col] = denom == 0.0
                     ? 0.0
                     : adjust_count(counts.count(prev, col), fof, policy) / denom;
    });
  }
  return table;
}

}  // namespace endtag
