#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "endtag/error.hpp"
#include "endtag/tagger.hpp"

namespace endtag {

// Line-oriented text model file. Counts are stored as integers; probabilities
// are derived on load, never stored.
//
//   [HEADER]       key = value lines (config, tagset)
//   [TRANSITIONS]  prev<TAB>tag<TAB>count
//   [FOF]          r<TAB>N_r, plus a types line
//   [EMISSIONS]    kind(w|e)<TAB>surface<TAB>tag<TAB>count
//   [ETL]          word<TAB>tag1 tag2 ...

namespace detail {

inline std::string join_tags(const std::set<std::string>& tags) {
  std::string out;
  for (const auto& t : tags) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace detail

inline void save_model(const TaggerModel& model, std::ostream& out) {
  const auto& cfg = model.config;
  out << "[HEADER]\n";
  out << "format = 1\n";
  out << "ending_length = " << cfg.ending_length << '\n';
  out << "top_n = " << cfg.top_n << '\n';
  out << "etl = " << to_string(cfg.etl) << '\n';
  out << "smoothing = " << to_string(cfg.smoothing) << '\n';
  out << "doubled = " << (cfg.doubled ? 1 : 0) << '\n';
  out << "boundary = " << cfg.boundary_tag << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "closed_class = " << detail::join_tags(cfg.closed_class_tags) << '\n';
  out << "tagset = " << detail::join_tags(model.lexical.tagset) << '\n';

  out << "[TRANSITIONS]\n";
  for (const auto& [bigram, count] : model.bigrams.counts)
    out << bigram.first << '\t' << bigram.second << '\t' << count << '\n';

  out << "[FOF]\n";
  out << "types\t" << model.fof.total_types << '\t' << model.fof.seen_types << '\n';
  for (const auto& [r, nr] : model.fof.table) out << r << '\t' << nr << '\n';

  out << "[EMISSIONS]\n";
  for (const auto& [unit, tags] : model.lexical.emission_counts)
    for (const auto& [tag, count] : tags)
      out << (unit.kind == UnitKind::word ? 'w' : 'e') << '\t' << unit.text << '\t' << tag << '\t'
          << count << '\n';

  out << "[ETL]\n";
  for (const auto& [word, tags] : model.lexical.word_tagsets)
    out << word << '\t' << detail::join_tags(tags) << '\n';
}

inline std::string save_model(const TaggerModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

namespace detail {

inline std::set<std::string> split_tags(const std::string& s) {
  std::set<std::string> tags;
  std::istringstream in(s);
  std::string t;
  while (in >> t) tags.insert(t);
  return tags;
}

inline std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline long parse_count(const std::string& s, std::size_t lineno) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size() || v < 0) throw DataError("");
    return v;
  } catch (...) {
    throw DataError("model line " + std::to_string(lineno) + ": bad count '" + s + "'");
  }
}

}  // namespace detail

inline TaggerModel load_model(std::istream& in) {
  TaggerModel model;
  std::map<std::string, std::string> header;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  bool any = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    any = true;
    if (line.front() == '[') {
      section = line;
      continue;
    }
    if (section == "[HEADER]") {
      auto eq = line.find(" = ");
      if (eq == std::string::npos)
        throw DataError("model line " + std::to_string(lineno) + ": bad header line");
      header[line.substr(0, eq)] = line.substr(eq + 3);
    } else if (section == "[TRANSITIONS]") {
      auto f = detail::split_fields(line, '\t');
      if (f.size() != 3)
        throw DataError("model line " + std::to_string(lineno) + ": bad transition line");
      const long c = detail::parse_count(f[2], lineno);
      model.bigrams.counts[{f[0], f[1]}] = c;
      model.bigrams.row_totals[f[0]] += c;
    } else if (section == "[FOF]") {
      auto f = detail::split_fields(line, '\t');
      if (f.size() == 3 && f[0] == "types") {
        model.fof.total_types = detail::parse_count(f[1], lineno);
        model.fof.seen_types = detail::parse_count(f[2], lineno);
      } else if (f.size() == 2) {
        model.fof.table[detail::parse_count(f[0], lineno)] = detail::parse_count(f[1], lineno);
      } else {
        throw DataError("model line " + std::to_string(lineno) + ": bad frequency line");
      }
    } else if (section == "[EMISSIONS]") {
      auto f = detail::split_fields(line, '\t');
      if (f.size() != 4 || (f[0] != "w" && f[0] != "e") || f[1].empty() || f[2].empty())
        throw DataError("model line " + std::to_string(lineno) + ": bad emission line");
      const UnitKind kind = f[0] == "w" ? UnitKind::word : UnitKind::ending;
      const long c = detail::parse_count(f[3], lineno);
      model.lexical.emission_counts[{kind, f[1]}][f[2]] = c;
      model.lexical.tag_totals[f[2]] += c;
      if (kind == UnitKind::word) model.lexical.whole_words.insert(f[1]);
    } else if (section == "[ETL]") {
      auto f = detail::split_fields(line, '\t');
      if (f.size() != 2 || f[0].empty())
        throw DataError("model line " + std::to_string(lineno) + ": bad tag-list line");
      model.lexical.word_tagsets[f[0]] = detail::split_tags(f[1]);
    } else {
      throw DataError("model line " + std::to_string(lineno) + ": content outside a section");
    }
  }
  if (!any) throw DataError("empty model file");

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw DataError("model header missing '" + key + "'");
    return it->second;
  };
  if (require("format") != "1") throw DataError("unsupported model format");

  RunConfig& cfg = model.config;
  cfg.ending_length = static_cast<std::size_t>(detail::parse_count(require("ending_length"), 0));
  cfg.top_n = static_cast<std::size_t>(detail::parse_count(require("top_n"), 0));
  cfg.etl = etl_strategy_from_string(require("etl"));
  cfg.smoothing = smoothing_from_string(require("smoothing"));
  cfg.doubled = require("doubled") == "1";
  cfg.boundary_tag = require("boundary");
  cfg.seed = static_cast<std::uint64_t>(detail::parse_count(require("seed"), 0));
  cfg.closed_class_tags = detail::split_tags(require("closed_class"));

  LexicalModel& lex = model.lexical;
  lex.ending_length = cfg.ending_length;
  lex.strategy = cfg.etl;
  lex.n_requested = cfg.top_n;
  lex.tagset = detail::split_tags(require("tagset"));
  lex.closed_class_tags = cfg.closed_class_tags;
  for (const auto& tag : lex.tagset)
    if (cfg.closed_class_tags.count(tag) == 0) lex.open_class_tags.insert(tag);

  model.bigrams.boundary_tag = cfg.boundary_tag;
  model.bigrams.tagset = lex.tagset;
  model.rebuild_transition_table();
  return model;
}

inline TaggerModel load_model(const std::string& text) {
  std::istringstream in(text);
  return load_model(in);
}

}  // namespace endtag
