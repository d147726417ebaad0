#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "cslid/metrics.hpp"
#include "cslid/rng.hpp"
#include "cslid/tags.hpp"

using namespace cslid;

namespace {

// Independent oracle: plain recursion over match/substitute/delete/insert,
// no DP table shared with the implementation.
int oracle_distance(const std::vector<int>& ref, const std::vector<int>& hyp,
                    std::size_t i = 0, std::size_t j = 0) {
  if (i == ref.size()) return static_cast<int>(hyp.size() - j);
  if (j == hyp.size()) return static_cast<int>(ref.size() - i);
  int best = oracle_distance(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
  best = std::min(best, oracle_distance(ref, hyp, i + 1, j) + 1);
  best = std::min(best, oracle_distance(ref, hyp, i, j + 1) + 1);
  return best;
}

}  // namespace

TEST_CASE("published error rates reproduce from published counts", "[metrics]") {
  auto rate = [](long long s, long long i, long long d, long long n) {
    AlignmentCounts c;
    c.substitutions = s;
    c.insertions = i;
    c.deletions = d;
    c.reference_length = n;
    return format_rate(lid_error_rate(c));
  };
  CHECK(rate(20957, 3384, 73502, 198855) == "49.20");
  CHECK(rate(12789, 13587, 20299, 198855) == "23.47");
  CHECK(rate(5136, 3655, 3576, 41025) == "30.14");
  CHECK(rate(2484, 1616, 2713, 41025) == "16.60");
}

TEST_CASE("align identity and directed cases", "[metrics]") {
  std::vector<int> x = {1, 2, 3, 2, 1};
  auto c = align(x, x);
  CHECK(c.substitutions == 0);
  CHECK(c.insertions == 0);
  CHECK(c.deletions == 0);
  CHECK(c.reference_length == 5);

  // ref = [H,E,H], hyp = [H,H]: one deletion under the fixed tie policy.
  auto d = align<int>({0, 1, 0}, {0, 0});
  CHECK(d.deletions == 1);
  CHECK(d.substitutions == 0);
  CHECK(d.insertions == 0);

  auto e = align<int>({0}, {});
  CHECK(e.deletions == 1);
  CHECK(e.edit_distance() == 1);

  REQUIRE_THROWS_AS(align<int>({}, {0}), DataError);
}

TEST_CASE("edit distance matches exhaustive enumeration", "[metrics]") {
  Rng rng(20240812);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<int> ref, hyp;
    for (int i = 0, n = static_cast<int>(rng.range(1, 6)); i < n; ++i)
      ref.push_back(static_cast<int>(rng.below(3)));
    for (int i = 0, n = static_cast<int>(rng.range(0, 6)); i < n; ++i)
      hyp.push_back(static_cast<int>(rng.below(3)));
    auto counts = align(ref, hyp);
    CHECK(counts.edit_distance() == oracle_distance(ref, hyp));
    CHECK(counts.deletions <= counts.reference_length);
    CHECK(counts.substitutions <= counts.reference_length);
  }
}

TEST_CASE("corpus report aggregates counts before dividing", "[metrics]") {
  auto ref1 = tags_from_string("sil Hb He | Eb Ee sil");
  auto hyp1 = tags_from_string("Hb He | Eb Ee");
  auto ref2 = tags_from_string("sil Eb E Ee sil");
  auto hyp2 = tags_from_string("Hb H He");

  auto single = corpus_report({ref1}, {hyp1});
  CHECK(single.character.edit_distance() == 0);
  CHECK(single.word.edit_distance() == 0);

  auto combined = corpus_report({ref1, ref2}, {hyp1, hyp2});
  // Utterance 2 contributes 3 character substitutions out of 3 and one word
  // substitution out of 1; aggregation is over summed counts.
  CHECK(combined.character.reference_length == 8);
  CHECK(combined.character.edit_distance() == 3);
  CHECK(combined.word.reference_length == 3);
  CHECK(combined.word.edit_distance() == 1);
  CHECK(format_rate(combined.character_rate()) == "37.50");

  REQUIRE_THROWS_AS(corpus_report({ref1}, {hyp1, hyp2}), DataError);
}

TEST_CASE("word-level rate for the published decoded rows", "[metrics]") {
  auto reference = tags_from_string(
      "Hb He | Eb E Ee | Hb H He | Eb E Ee | Hb He | Eb E E E E Ee | Hb H H H He");
  auto ctc_hyp = tags_from_string(
      "Hb E Ee | Eb E Ee | Eb He | Hb He | Eb Ee | Eb Ee | Hb He");
  auto attention_hyp = tags_from_string(
      "Hb He | Eb E E E Ee | Hb H He | Eb E E Ee | Hb He | Eb E E E E Ee | Hb H H H He");

  auto att = corpus_report({reference}, {attention_hyp});
  CHECK(att.word.edit_distance() == 0);
  CHECK(format_rate(att.word_rate()) == "0.00");

  auto ctc = corpus_report({reference}, {ctc_hyp});
  CHECK(ctc.word.reference_length == 7);
  CHECK(ctc.word.edit_distance() == 3);
  CHECK(ctc.word_rate() == Catch::Approx(300.0 / 7.0).epsilon(1e-12));
  // Truncated display of the exact 42.857...%.
  CHECK(format_rate(ctc.word_rate()) == "42.85");
}

TEST_CASE("report table carries the four count columns", "[metrics]") {
  CorpusReport r;
  r.character = {1, 2, 3, 100};
  r.word = {0, 0, 0, 10};
  auto table = report_table(r);
  CHECK(table.find("N_D") != std::string::npos);
  CHECK(table.find("6.00") != std::string::npos);
  auto records = report_records(r);
  CHECK(records.find("level=character ND=3 NI=2 NS=1 N=100 rate=6.00") != std::string::npos);
  CHECK(records.find("level=word") != std::string::npos);
}
