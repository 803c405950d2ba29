#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "endtag/corpus.hpp"
#include "endtag/error.hpp"
#include "endtag/tagger.hpp"

namespace endtag {

struct AccuracyReport {
  std::size_t total_tokens = 0;
  std::size_t correct = 0;
  std::size_t seen_tokens = 0;
  std::size_t seen_correct = 0;
  std::size_t unseen_tokens = 0;
  std::size_t unseen_correct = 0;
  std::size_t fallback_tokens = 0;

  double accuracy() const {
    return total_tokens == 0 ? 0.0
                             : static_cast<double>(correct) / static_cast<double>(total_tokens);
  }
  double seen_accuracy() const {
    return seen_tokens == 0
               ? 0.0
               : static_cast<double>(seen_correct) / static_cast<double>(seen_tokens);
  }
  double unseen_accuracy() const {
    return unseen_tokens == 0
               ? 0.0
               : static_cast<double>(unseen_correct) / static_cast<double>(unseen_tokens);
  }
};

// Per-token tag match; a token is unseen iff its word is absent from the
// training vocabulary (pre-truncation).
inline AccuracyReport score(const TaggedCorpus& gold,
                            const std::vector<DecodedSentence>& predicted,
                            const std::set<std::string>& training_vocab) {
  if (gold.sentences.size() != predicted.size())
    throw ArgumentError("sentence count mismatch between gold and predictions");
  AccuracyReport report;
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    const auto& gold_sentence = gold.sentences[s];
    const auto& pred = predicted[s];
    if (gold_sentence.size() != pred.tags.size())
      throw ArgumentError("token count mismatch in sentence " + std::to_string(s + 1));
    for (std::size_t i = 0; i < gold_sentence.size(); ++i) {
      const bool ok = gold_sentence[i].tag == pred.tags[i];
      const bool seen = training_vocab.count(gold_sentence[i].word) != 0;
      ++report.total_tokens;
      if (ok) ++report.correct;
      if (seen) {
        ++report.seen_tokens;
        if (ok) ++report.seen_correct;
      } else {
        ++report.unseen_tokens;
        if (ok) ++report.unseen_correct;
      }
      if (pred.used_fallback) ++report.fallback_tokens;
    }
  }
  return report;
}

struct ProportionTest {
  double z = 0.0;
  double p_value = 1.0;
};

// Pooled two-proportion z-test with equal sample sizes; two-sided p from the
// standard normal.
inline ProportionTest two_proportion_test(std::size_t correct1, std::size_t correct2,
                                          std::size_t n) {
  if (n == 0) throw ArgumentError("sample size must be positive");
  if (correct1 > n || correct2 > n) throw ArgumentError("correct count exceeds sample size");
  const double p1 = static_cast<double>(correct1) / static_cast<double>(n);
  const double p2 = static_cast<double>(correct2) / static_cast<double>(n);
  const double pooled = (p1 + p2) / 2.0;
  const double var = pooled * (1.0 - pooled) * (2.0 / static_cast<double>(n));
  ProportionTest out;
  if (var <= 0.0) {
    out.z = 0.0;
    out.p_value = 1.0;
    return out;
  }
  out.z = (p1 - p2) / std::sqrt(var);
  out.p_value = std::erfc(std::abs(out.z) / std::sqrt(2.0));
  return out;
}

struct StrategySpec {
  std::string label;  // "etl+smoothing", e.g. "unit+gt"
  EtlStrategy etl = EtlStrategy::unit;
  SmoothingPolicy smoothing = SmoothingPolicy::mle;
};

inline StrategySpec parse_strategy_label(const std::string& label) {
  auto plus = label.find('+');
  if (plus == std::string::npos || plus == 0 || plus + 1 == label.size())
    throw ArgumentError("strategy label must be of the form etl+smoothing: '" + label + "'");
  StrategySpec spec;
  spec.label = label;
  spec.etl = etl_strategy_from_string(label.substr(0, plus));
  spec.smoothing = smoothing_from_string(label.substr(plus + 1));
  return spec;
}

struct GridConfig {
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> l_values;
  std::vector<StrategySpec> strategies;
};

// Line-oriented `key = value list` file with keys n_values, l_values,
// strategies. `#` starts a comment.
inline GridConfig parse_grid_config(std::istream& in) {
  GridConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string key;
    if (!(row >> key)) continue;
    std::string eq;
    if (!(row >> eq) || eq != "=")
      throw DataError("grid config line " + std::to_string(lineno) + ": expected 'key = values'");
    if (key == "n_values" || key == "l_values") {
      auto& target = key == "n_values" ? config.n_values : config.l_values;
      long v = 0;
      while (row >> v) {
        if (v < 0 || (key == "l_values" && v < 1))
          throw DataError("grid config line " + std::to_string(lineno) + ": bad value");
        target.push_back(static_cast<std::size_t>(v));
      }
      if (!row.eof())
        throw DataError("grid config line " + std::to_string(lineno) + ": bad value");
    } else if (key == "strategies") {
      std::string label;
      while (row >> label) config.strategies.push_back(parse_strategy_label(label));
    } else {
      throw DataError("grid config line " + std::to_string(lineno) + ": unknown key '" + key +
                      "'");
    }
  }
  return config;
}

inline GridConfig parse_grid_config(const std::string& text) {
  std::istringstream in(text);
  return parse_grid_config(in);
}

struct SweepCell {
  std::optional<AccuracyReport> report;
  std::string error;  // empty on success
};

struct SweepGrid {
  GridConfig config;
  // keyed (L, strategy label, N); iteration order is the sweep order
  std::map<std::tuple<std::size_t, std::string, std::size_t>, SweepCell> cells;

  bool has_errors() const {
    for (const auto& [key, cell] : cells)
      if (!cell.error.empty()) return true;
    return false;
  }
};

// Train and score one model per (L, strategy, N) cell. A failing cell is
// recorded and the sweep continues.
inline SweepGrid sweep(const TaggedCorpus& train, const TaggedCorpus& test,
                       const GridConfig& grid_config, const RunConfig& base) {
  if (grid_config.n_values.empty() || grid_config.l_values.empty() ||
      grid_config.strategies.empty())
    throw ArgumentError("every sweep axis needs at least one value");

  SweepGrid grid;
  grid.config = grid_config;

  std::vector<std::vector<std::string>> test_words;
  test_words.reserve(test.sentences.size());
  for (const auto& sentence : test.sentences) {
    std::vector<std::string> words;
    words.reserve(sentence.size());
    for (const auto& tok : sentence) words.push_back(tok.word);
    test_words.push_back(std::move(words));
  }

  for (std::size_t l : grid_config.l_values) {
    for (const auto& strategy : grid_config.strategies) {
      for (std::size_t n : grid_config.n_values) {
        SweepCell cell;
        try {
          RunConfig config = base;
          config.ending_length = l;
          config.top_n = n;
          config.etl = strategy.etl;
          config.smoothing = strategy.smoothing;
          const TaggerModel model = train_tagger(train, config);
          std::set<std::string> train_vocab;
          for (const auto& [word, tags] : model.lexical.word_tagsets) train_vocab.insert(word);
          std::vector<DecodedSentence> predictions;
          predictions.reserve(test_words.size());
          for (const auto& words : test_words) predictions.push_back(viterbi(model, words));
          cell.report = score(test, predictions, train_vocab);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        grid.cells[{l, strategy.label, n}] = std::move(cell);
      }
    }
  }
  return grid;
}

namespace detail {

inline std::string format_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string format_ratio6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

// Strategy rows grouped by L, N columns.
inline std::string render_grid_table(const SweepGrid& grid) {
  std::string out;
  bool first_block = true;
  for (std::size_t l : grid.config.l_values) {
    if (!first_block) out += '\n';
    first_block = false;
    out += "L=" + std::to_string(l) + '\n';
    out += "strategy";
    for (std::size_t n : grid.config.n_values) out += "\tN=" + std::to_string(n);
    out += '\n';
    for (const auto& strategy : grid.config.strategies) {
      out += strategy.label;
      for (std::size_t n : grid.config.n_values) {
        const auto& cell = grid.cells.at({l, strategy.label, n});
        out += '\t';
        out += cell.report ? detail::format_ratio(cell.report->accuracy()) : "ERROR";
      }
      out += '\n';
    }
  }
  return out;
}

// One machine-readable line per cell in sweep order.
inline std::string render_cell_records(const SweepGrid& grid) {
  std::string out;
  for (std::size_t l : grid.config.l_values) {
    for (const auto& strategy : grid.config.strategies) {
      for (std::size_t n : grid.config.n_values) {
        const auto& cell = grid.cells.at({l, strategy.label, n});
        out += std::to_string(l) + '\t' + strategy.label + '\t' + std::to_string(n) + '\t';
        if (cell.report) {
          out += detail::format_ratio6(cell.report->accuracy()) + '\t' +
                 detail::format_ratio6(cell.report->seen_accuracy()) + '\t' +
                 detail::format_ratio6(cell.report->unseen_accuracy());
        } else {
          out += "ERROR\tERROR\tERROR";
        }
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace endtag
