#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "endtag/corpus.hpp"
#include "endtag/evaluation.hpp"
#include "endtag/model_io.hpp"
#include "endtag/tagger.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartialSweep = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw endtag::DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw endtag::DataError("cannot write file: " + path);
  out << content;
}

endtag::TaggedCorpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw endtag::DataError("cannot open corpus: " + path);
  try {
    return endtag::parse_corpus(in);
  } catch (const endtag::DataError& e) {
    throw endtag::DataError(path + ": " + e.what());
  }
}

std::set<std::string> load_closed_class(const std::string& path) {
  std::set<std::string> tags;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw endtag::DataError("cannot open closed-class file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tags.insert(line);
  }
  return tags;
}

endtag::TaggerModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw endtag::DataError("cannot open model: " + path);
  try {
    return endtag::load_model(in);
  } catch (const endtag::DataError& e) {
    throw endtag::DataError(path + ": " + e.what());
  }
}

// One word per line, blank line between sentences.
std::vector<std::vector<std::string>> read_word_sentences(std::istream& in) {
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> current;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) sentences.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(line);
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

struct CommonOptions {
  std::size_t ending_length = 3;
  std::size_t top_n = 0;
  std::string etl = "unit";
  std::string smoothing = "mle";
  std::string closed_class_path;
  bool doubled = false;
  std::string boundary = "__BOUNDARY__";
  std::uint64_t seed = 0;
};

void add_common_options(CLI::App& cmd, CommonOptions& opts) {
  cmd.add_option("--ending-length", opts.ending_length, "Ending length L")->check(CLI::PositiveNumber);
  cmd.add_option("--top-n", opts.top_n, "Number of most frequent words kept whole");
  cmd.add_option("--etl", opts.etl, "ETL strategy")->check(CLI::IsMember({"unit", "relexed"}));
  cmd.add_option("--smoothing", opts.smoothing, "Transition smoothing")
      ->check(CLI::IsMember({"mle", "addone", "gt"}));
  cmd.add_option("--closed-class", opts.closed_class_path, "Closed-class tag file");
  cmd.add_flag("--double-up", opts.doubled, "Concatenate truncated-only and mixed corpora");
  cmd.add_option("--boundary", opts.boundary, "Boundary tag symbol");
  cmd.add_option("--seed", opts.seed, "Random seed");
}

endtag::RunConfig to_run_config(const CommonOptions& opts) {
  endtag::RunConfig config;
  config.ending_length = opts.ending_length;
  config.top_n = opts.top_n;
  config.etl = endtag::etl_strategy_from_string(opts.etl);
  config.smoothing = endtag::smoothing_from_string(opts.smoothing);
  if (!opts.closed_class_path.empty())
    config.closed_class_tags = load_closed_class(opts.closed_class_path);
  config.doubled = opts.doubled;
  config.boundary_tag = opts.boundary;
  config.seed = opts.seed;
  return config;
}

int cmd_train(const std::string& corpus_path, const std::string& model_path,
              const CommonOptions& opts) {
  const auto corpus = load_corpus(corpus_path);
  const auto config = to_run_config(opts);
  const auto model = endtag::train_tagger(corpus, config);

  std::ofstream out(model_path, std::ios::binary);
  if (!out) throw endtag::DataError("cannot write model: " + model_path);
  endtag::save_model(model, out);

  std::size_t word_units = 0, ending_units = 0;
  for (const auto& [unit, tags] : model.lexical.emission_counts)
    (unit.kind == endtag::UnitKind::word ? word_units : ending_units) += 1;
  std::cout << "tokens: " << corpus.token_count() << '\n'
            << "sentences: " << corpus.sentences.size() << '\n'
            << "tagset: " << model.lexical.tagset.size() << '\n'
            << "whole_words: " << model.lexical.whole_words.size() << '\n'
            << "word_units: " << word_units << '\n'
            << "ending_units: " << ending_units << '\n';
  return kExitOk;
}

int cmd_tag(const std::string& model_path, const std::string& input_path) {
  const auto model = load_model_file(model_path);
  std::vector<std::vector<std::string>> sentences;
  if (input_path.empty()) {
    sentences = read_word_sentences(std::cin);
  } else {
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw endtag::DataError("cannot open input: " + input_path);
    sentences = read_word_sentences(in);
  }
  bool first = true;
  std::size_t index = 0;
  for (const auto& words : sentences) {
    ++index;
    const auto decoded = endtag::viterbi(model, words);
    if (decoded.used_fallback)
      std::cerr << "sentence " << index << ": no positive-probability path, used fallback\n";
    if (!first) std::cout << '\n';
    first = false;
    for (std::size_t i = 0; i < words.size(); ++i)
      std::cout << words[i] << '\t' << decoded.tags[i] << '\n';
  }
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& gold_path) {
  const auto model = load_model_file(model_path);
  const auto gold = load_corpus(gold_path);
  std::set<std::string> train_vocab;
  for (const auto& [word, tags] : model.lexical.word_tagsets) train_vocab.insert(word);

  std::vector<endtag::DecodedSentence> predictions;
  predictions.reserve(gold.sentences.size());
  for (const auto& sentence : gold.sentences) {
    std::vector<std::string> words;
    words.reserve(sentence.size());
    for (const auto& tok : sentence) words.push_back(tok.word);
    predictions.push_back(endtag::viterbi(model, words));
  }
  const auto report = endtag::score(gold, predictions, train_vocab);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "overall: %.4f (%zu/%zu)\nseen: %.4f (%zu/%zu)\nunseen: %.4f (%zu/%zu)\n"
                "fallback_tokens: %zu\n",
                report.accuracy(), report.correct, report.total_tokens, report.seen_accuracy(),
                report.seen_correct, report.seen_tokens, report.unseen_accuracy(),
                report.unseen_correct, report.unseen_tokens, report.fallback_tokens);
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "%zu\t%s+%s\t%zu\t%.6f\t%.6f\t%.6f\n",
                model.config.ending_length, endtag::to_string(model.config.etl).c_str(),
                endtag::to_string(model.config.smoothing).c_str(), model.config.top_n,
                report.accuracy(), report.seen_accuracy(), report.unseen_accuracy());
  std::cout << buf;
  return kExitOk;
}

int cmd_sweep(const std::string& train_path, const std::string& test_path,
              const std::string& grid_path, const std::string& out_path,
              const CommonOptions& opts) {
  const auto train = load_corpus(train_path);
  const auto test = load_corpus(test_path);
  const auto grid_config = endtag::parse_grid_config(read_file(grid_path));
  const auto base = to_run_config(opts);
  const auto grid = endtag::sweep(train, test, grid_config, base);
  const std::string table =
      endtag::render_grid_table(grid) + "\n" + endtag::render_cell_records(grid);
  if (out_path.empty()) {
    std::cout << table;
  } else {
    write_file(out_path, table);
  }
  return grid.has_errors() ? kExitPartialSweep : kExitOk;
}

int cmd_convert(const std::string& input_path) {
  std::string canonical;
  if (input_path.empty()) {
    canonical = endtag::convert_inline(std::cin);
  } else {
    std::ifstream in(input_path, std::ios::binary);
    if (!in) throw endtag::DataError("cannot open input: " + input_path);
    canonical = endtag::convert_inline(in);
  }
  std::cout << canonical;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ending-based HMM part-of-speech tagger"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string corpus_path, model_path, input_path, gold_path;
  std::string train_path, test_path, grid_path, out_path;

  auto* train = app.add_subcommand("train", "Train a tagger model");
  train->add_option("--corpus", corpus_path, "Training corpus")->required();
  train->add_option("--model", model_path, "Output model file")->required();
  add_common_options(*train, opts);

  auto* tag = app.add_subcommand("tag", "Tag words (one per line, blank line between sentences)");
  tag->add_option("--model", model_path, "Model file")->required();
  tag->add_option("--input", input_path, "Input file (default: stdin)");

  auto* eval = app.add_subcommand("eval", "Score a model against a gold corpus");
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--gold", gold_path, "Gold corpus")->required();

  auto* sweepc = app.add_subcommand("sweep", "Run an (L, strategy, N) experiment grid");
  sweepc->add_option("--train", train_path, "Training corpus")->required();
  sweepc->add_option("--test", test_path, "Test corpus")->required();
  sweepc->add_option("--grid", grid_path, "Grid config file")->required();
  sweepc->add_option("--out", out_path, "Output table file (default: stdout)");
  add_common_options(*sweepc, opts);

  auto* convert = app.add_subcommand("convert", "Convert inline word_TAG text to canonical form");
  convert->add_option("--input", input_path, "Input file (default: stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(corpus_path, model_path, opts);
    if (tag->parsed()) return cmd_tag(model_path, input_path);
    if (eval->parsed()) return cmd_eval(model_path, gold_path);
    if (sweepc->parsed()) return cmd_sweep(train_path, test_path, grid_path, out_path, opts);
    if (convert->parsed()) return cmd_convert(input_path);
  } catch (const endtag::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const endtag::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
