#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "cslid/rng.hpp"
#include "cslid/tags.hpp"

using namespace cslid;

namespace {

std::vector<Lang> langs_of(const std::vector<TaggedWord>& words) {
  std::vector<Lang> out;
  for (const auto& w : words) out.push_back(w.lang);
  return out;
}

std::vector<TaggedWord> random_words(Rng& rng, int n_words) {
  std::vector<TaggedWord> words;
  for (int i = 0; i < n_words; ++i) {
    TaggedWord w;
    w.lang = rng.coin(0.5) ? Lang::Hindi : Lang::English;
    w.char_count = static_cast<int>(rng.range(1, 12));
    w.text = std::string(static_cast<std::size_t>(w.char_count), 'x');
    words.push_back(w);
  }
  return words;
}

}  // namespace

TEST_CASE("tag names round-trip and the alphabet has 8 symbols", "[tags]") {
  for (int i = 0; i < kNumTags; ++i) {
    LidTag t = static_cast<LidTag>(i);
    REQUIRE(tag_from_name(tag_name(t)) == t);
  }
  REQUIRE(tag_name(LidTag::Boundary) == std::string("|"));
  REQUIRE(tag_name(LidTag::Sil) == std::string("sil"));
  REQUIRE_FALSE(tag_from_name("Q").has_value());

  REQUIRE(family(LidTag::Hb) == TagFamily::Hindi);
  REQUIRE(family(LidTag::H) == TagFamily::Hindi);
  REQUIRE(family(LidTag::He) == TagFamily::Hindi);
  REQUIRE(family(LidTag::Eb) == TagFamily::English);
  REQUIRE(family(LidTag::E) == TagFamily::English);
  REQUIRE(family(LidTag::Ee) == TagFamily::English);
  REQUIRE(family(LidTag::Boundary) == TagFamily::None);
  REQUIRE(family(LidTag::Sil) == TagFamily::None);
}

TEST_CASE("detect_language follows the script", "[tags]") {
  REQUIRE(detect_language("नमस्ते") == Lang::Hindi);
  REQUIRE(detect_language("blog") == Lang::English);
  REQUIRE_THROWS_AS(detect_language("abक"), DataError);
  REQUIRE_THROWS_AS(detect_language("1234"), DataError);
  REQUIRE_THROWS_AS(detect_language(""), DataError);
}

TEST_CASE("grapheme clusters ignore combining marks", "[tags]") {
  // namaste: 6 code points, 4 clusters (virama and matra attach).
  REQUIRE(grapheme_count("नमस्ते") == 4);
  REQUIRE(grapheme_count("blog") == 4);
  REQUIRE(grapheme_count("क") == 1);
}

TEST_CASE("word_tags shapes", "[tags]") {
  REQUIRE(word_tags(Lang::Hindi, 2) == TagSequence{LidTag::Hb, LidTag::He});
  REQUIRE(word_tags(Lang::English, 6) ==
          TagSequence{LidTag::Eb, LidTag::E, LidTag::E, LidTag::E, LidTag::E, LidTag::Ee});
  REQUIRE(word_tags(Lang::English, 1) == TagSequence{LidTag::Eb});
  REQUIRE_THROWS_AS(word_tags(Lang::Hindi, 0), DataError);
}

TEST_CASE("labelize concatenates words with boundaries", "[tags]") {
  // Language/length pattern (H:2, E:3, H:3, E:3, H:2, E:6, H:5).
  std::vector<std::pair<Lang, int>> pattern = {
      {Lang::Hindi, 2}, {Lang::English, 3}, {Lang::Hindi, 3}, {Lang::English, 3},
      {Lang::Hindi, 2}, {Lang::English, 6}, {Lang::Hindi, 5}};
  std::vector<TaggedWord> words;
  for (auto [lang, n] : pattern) {
    TaggedWord w;
    w.lang = lang;
    w.char_count = n;
    words.push_back(w);
  }
  REQUIRE(tags_to_string(labelize(words)) ==
          "Hb He | Eb E Ee | Hb H He | Eb E Ee | Hb He | Eb E E E E Ee | Hb H H H He");

  std::vector<TaggedWord> one = {TaggedWord{"", Lang::Hindi, 3}};
  REQUIRE(labelize(one) == TagSequence{LidTag::Hb, LidTag::H, LidTag::He});
  REQUIRE(labelize(one, true) ==
          TagSequence{LidTag::Sil, LidTag::Hb, LidTag::H, LidTag::He, LidTag::Sil});
  REQUIRE_THROWS_AS(labelize({}), DataError);
}

TEST_CASE("majority vote maps published character rows to word rows", "[tags]") {
  auto attention = tags_from_string(
      "Hb He | Eb E E E Ee | Hb H He | Eb E E Ee | Hb He | Eb E E E E Ee | Hb H H H He");
  REQUIRE(langs_to_string(majority_vote(attention)) == "H | E | H | E | H | E | H");

  // Segment 3 "Eb He" is a 1-1 tie resolved by the first tag's family.
  auto ctc = tags_from_string("Hb E Ee | Eb E Ee | Eb He | Hb He | Eb Ee | Eb Ee | Hb He");
  REQUIRE(langs_to_string(majority_vote(ctc)) == "E | E | E | H | E | E | H");

  REQUIRE(majority_vote({}).empty());
}

TEST_CASE("majority vote is robust to ill-formed streams", "[tags]") {
  // Leading/trailing/double boundaries and stray sil produce no empty words.
  auto messy = tags_from_string("| sil Hb | | E E sil | He |");
  REQUIRE(langs_to_string(majority_vote(messy)) == "H | E | H");
}

TEST_CASE("labelize/majority_vote round trip over random word lists", "[tags]") {
  Rng rng(20240811);
  for (int trial = 0; trial < 1000; ++trial) {
    auto words = random_words(rng, static_cast<int>(rng.range(1, 10)));
    bool add_sil = rng.coin(0.5);
    TagSequence tags = labelize(words, add_sil);
    REQUIRE(majority_vote(tags) == langs_of(words));

    // Tag-count formula (without sil): sum of char counts + boundaries.
    std::size_t expected = words.size() - 1;
    for (const auto& w : words) expected += static_cast<std::size_t>(w.char_count);
    REQUIRE(labelize(words, false).size() == expected);
  }
}

TEST_CASE("word sub-sequences are b ... e of one family", "[tags]") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto words = random_words(rng, static_cast<int>(rng.range(1, 8)));
    TagSequence tags = labelize(words, false);
    // Split on boundary and compare against word_tags structure.
    std::size_t w = 0;
    TagSequence segment;
    auto check = [&]() {
      REQUIRE(w < words.size());
      REQUIRE(segment == word_tags(words[w].lang, words[w].char_count));
      if (segment.size() >= 2) {
        REQUIRE((segment.front() == LidTag::Hb || segment.front() == LidTag::Eb));
        REQUIRE((segment.back() == LidTag::He || segment.back() == LidTag::Ee));
        REQUIRE(family(segment.front()) == family(segment.back()));
      }
      ++w;
      segment.clear();
    };
    for (LidTag t : tags) {
      if (t == LidTag::Boundary) check();
      else segment.push_back(t);
    }
    check();
    REQUIRE(w == words.size());
  }
}

TEST_CASE("tag serialization round trip", "[tags]") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    TagSequence tags;
    for (int i = 0, n = static_cast<int>(rng.range(0, 30)); i < n; ++i)
      tags.push_back(static_cast<LidTag>(rng.below(kNumTags)));
    REQUIRE(tags_from_string(tags_to_string(tags)) == tags);
  }
  REQUIRE_THROWS_AS(tags_from_string("Hb bogus"), DataError);
}
