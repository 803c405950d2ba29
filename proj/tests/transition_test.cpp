#include <catch_amalgamated.hpp>

#include <random>

#include "endtag/corpus.hpp"
#include "endtag/transition.hpp"
#include "test_util.hpp"

using namespace endtag;

namespace {
const std::string kBoundary = "__BOUNDARY__";
}

TEST_CASE("count_bigrams tallies boundary transitions") {
  const auto corpus = parse_corpus("a\tAT\nb\tNN\n");
  const auto counts = count_bigrams(corpus, kBoundary);
  CHECK(counts.count(kBoundary, "AT") == 1);
  CHECK(counts.count("AT", "NN") == 1);
  CHECK(counts.count("NN", kBoundary) == 1);
  CHECK(counts.counts.size() == 3);
}

TEST_CASE("count_bigrams of an empty corpus is all zero") {
  const auto counts = count_bigrams(TaggedCorpus{}, kBoundary);
  CHECK(counts.counts.empty());
  CHECK(counts.total_tokens() == 0);
}

TEST_CASE("count_bigrams rejects boundary collisions") {
  const auto corpus = parse_corpus("a\tX\n");
  CHECK_THROWS_AS(count_bigrams(corpus, "X"), ArgumentError);
}

TEST_CASE("each sentence contributes length + 1 transitions") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 10; ++i) {
    const auto corpus = testutil::random_corpus(rng, 1 + rng() % 30, {"A", "B", "C"});
    const auto counts = count_bigrams(corpus, kBoundary);
    CHECK(counts.total_tokens() ==
          static_cast<long>(corpus.token_count() + corpus.sentences.size()));
  }
}

TEST_CASE("row totals match row sums") {
  std::mt19937_64 rng(54);
  const auto corpus = testutil::random_corpus(rng, 25, {"A", "B", "C"});
  const auto counts = count_bigrams(corpus, kBoundary);
  std::map<std::string, long> sums;
  for (const auto& [bigram, c] : counts.counts) sums[bigram.first] += c;
  CHECK(sums == counts.row_totals);
}

TEST_CASE("freq_of_freqs histograms the counts") {
  BigramCounts counts;
  counts.boundary_tag = kBoundary;
  counts.tagset = {"A", "B"};
  counts.counts[{"A", "B"}] = 1;
  counts.counts[{"B", "A"}] = 1;
  counts.counts[{"A", "A"}] = 2;
  const auto fof = freq_of_freqs(counts);
  CHECK(fof.table == std::map<long, long>{{1, 2}, {2, 1}});
  CHECK(fof.seen_types == 3);
  CHECK(fof.total_types == 8);  // (2+1)^2 - 1
}

TEST_CASE("distinct count values give unit histogram entries") {
  BigramCounts counts;
  counts.boundary_tag = kBoundary;
  counts.tagset = {"A", "B", "C"};
  long v = 1;
  for (const auto& prev : counts.tagset)
    for (const auto& next : counts.tagset) counts.counts[{prev, next}] = v++;
  const auto fof = freq_of_freqs(counts);
  for (long r = 1; r < v; ++r) CHECK(fof.n(r) == 1);
}

TEST_CASE("frequency table mass equals total bigram tokens") {
  std::mt19937_64 rng(59);
  const auto corpus = testutil::random_corpus(rng, 100, {"A", "B", "C", "D"});
  const auto counts = count_bigrams(corpus, kBoundary);
  const auto fof = freq_of_freqs(counts);
  long mass = 0;
  for (const auto& [r, nr] : fof.table) mass += r * nr;
  CHECK(mass == counts.total_tokens());
}

TEST_CASE("adjust_count per policy") {
  FreqOfFreqs fof;
  fof.table = {{1, 4}, {2, 2}};
  fof.total_types = 20;
  fof.seen_types = 6;

  CHECK(adjust_count(3, fof, SmoothingPolicy::mle) == 3.0);
  CHECK(adjust_count(0, fof, SmoothingPolicy::add_one) == 1.0);
  CHECK(adjust_count(3, fof, SmoothingPolicy::add_one) == 4.0);
  // (1+1) * N_2 / N_1 = 2 * 2 / 4
  CHECK(adjust_count(1, fof, SmoothingPolicy::good_turing) == Catch::Approx(1.0));
  // N_3 = 0: keep the raw count
  CHECK(adjust_count(2, fof, SmoothingPolicy::good_turing) == 2.0);
  // r = 0: N_1 / unseen types = 4 / 14
  CHECK(adjust_count(0, fof, SmoothingPolicy::good_turing) == Catch::Approx(4.0 / 14.0));
  CHECK_THROWS_AS(adjust_count(5, fof, SmoothingPolicy::good_turing), ArgumentError);
}

TEST_CASE("adjust_count is monotone for mle and add-one") {
  FreqOfFreqs fof;
  for (long r = 0; r < 50; ++r) {
    CHECK(adjust_count(r + 1, fof, SmoothingPolicy::mle) >=
          adjust_count(r, fof, SmoothingPolicy::mle));
    CHECK(adjust_count(r + 1, fof, SmoothingPolicy::add_one) >=
          adjust_count(r, fof, SmoothingPolicy::add_one));
  }
}

TEST_CASE("mle transition probability is the count ratio") {
  const auto corpus = parse_corpus("x\tP\ny\tA\n\nx\tP\ny\tA\n\nx\tP\ny\tA\n\nx\tP\ny\tB\n");
  const auto counts = count_bigrams(corpus, kBoundary);
  const auto fof = freq_of_freqs(counts);
  CHECK(transition_prob(counts, fof, SmoothingPolicy::mle, "P", "A") == Catch::Approx(0.75));
  CHECK(transition_prob(counts, fof, SmoothingPolicy::mle, "P", "B") == Catch::Approx(0.25));
}

TEST_CASE("add-one renormalizes over the full row") {
  // row P: A seen 3 times, B once; columns are {A, B, boundary}
  const auto corpus = parse_corpus("x\tP\ny\tA\n\nx\tP\ny\tA\n\nx\tP\ny\tA\n\nx\tP\ny\tB\n");
  const auto counts = count_bigrams(corpus, kBoundary);
  const auto fof = freq_of_freqs(counts);
  // (3+1) / (4+1+1 + 3 extra columns: P itself counts too)
  // columns for row P: A, B, P, boundary -> (3+1)/((3+1)+(1+1)+(0+1)+(0+1))
  CHECK(transition_prob(counts, fof, SmoothingPolicy::add_one, "P", "A") ==
        Catch::Approx(4.0 / 8.0));
  CHECK(transition_prob(counts, fof, SmoothingPolicy::add_one, "P", "B") ==
        Catch::Approx(2.0 / 8.0));
}

TEST_CASE("two-tag row with boundary matches hand arithmetic") {
  // build counts directly: tags {A, B}, row X has A:3, B:1
  BigramCounts counts;
  counts.boundary_tag = kBoundary;
  counts.tagset = {"A", "B"};
  counts.counts[{"A", "A"}] = 3;
  counts.counts[{"A", "B"}] = 1;
  counts.row_totals["A"] = 4;
  const auto fof = freq_of_freqs(counts);
  // columns for row A: A, B, boundary -> (3+1)/((3+1)+(1+1)+(0+1)) = 4/7
  CHECK(transition_prob(counts, fof, SmoothingPolicy::add_one, "A", "A") ==
        Catch::Approx(4.0 / 7.0));
}

TEST_CASE("transition_prob rejects unknown previous tags") {
  const auto corpus = parse_corpus("a\tA\n");
  const auto counts = count_bigrams(corpus, kBoundary);
  const auto fof = freq_of_freqs(counts);
  CHECK_THROWS_AS(transition_prob(counts, fof, SmoothingPolicy::mle, "NOPE", "A"), ArgumentError);
}

TEST_CASE("rows are stochastic under every policy") {
  std::mt19937_64 rng(61);
  const auto corpus = testutil::random_corpus(rng, 200, {"A", "B", "C", "D", "E"});
  const auto counts = count_bigrams(corpus, kBoundary);
  const auto fof = freq_of_freqs(counts);
  for (auto policy :
       {SmoothingPolicy::mle, SmoothingPolicy::add_one, SmoothingPolicy::good_turing}) {
    const auto table = build_transition_table(counts, fof, policy);
    for (const auto& [prev, row] : table.rows) {
      double sum = 0.0;
      for (const auto& [tag, p] : row) sum += p;
      INFO(to_string(policy) << " row " << prev);
      CHECK(sum == Catch::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("mle leaves unseen bigrams at zero, smoothing makes them positive") {
  std::mt19937_64 rng(67);
  const auto corpus = testutil::random_corpus(rng, 8, {"A", "B", "C", "D", "E"});
  const auto counts = count_bigrams(corpus, kBoundary);
  const auto fof = freq_of_freqs(counts);
  bool found_unseen = false;
  for (const auto& prev : counts.tagset) {
    for (const auto& next : counts.tagset) {
      if (counts.count(prev, next) != 0) continue;
      found_unseen = true;
      CHECK(transition_prob(counts, fof, SmoothingPolicy::mle, prev, next) == 0.0);
      CHECK(transition_prob(counts, fof, SmoothingPolicy::add_one, prev, next) > 0.0);
      CHECK(transition_prob(counts, fof, SmoothingPolicy::good_turing, prev, next) > 0.0);
    }
  }
  CHECK(found_unseen);
}

TEST_CASE("good-turing adjusted mass telescopes exactly") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const auto corpus = testutil::random_corpus(rng, 50 + rng() % 100, {"A", "B", "C"});
    const auto fof = freq_of_freqs(count_bigrams(corpus, kBoundary));
    // N_r * r*(r) = (r+1) N_{r+1} on rows without gaps; both sides integers
    long lhs = 0, rhs = 0;
    for (const auto& [r, nr] : fof.table) {
      if (fof.n(r + 1) == 0) continue;
      lhs += (r + 1) * fof.n(r + 1);
      const double adjusted = adjust_count(r, fof, SmoothingPolicy::good_turing);
      CHECK(static_cast<double>(nr) * adjusted ==
            Catch::Approx(static_cast<double>((r + 1) * fof.n(r + 1))).margin(1e-12));
    }
    for (const auto& [r, nr] : fof.table)
      if (r >= 2 && fof.n(r - 1) > 0) rhs += r * nr;
    CHECK(lhs == rhs);
  }
}
