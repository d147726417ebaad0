// cslid/tags.hpp -- character-level LID tag scheme and word-level voting.
//
// Targets are drawn from an 8-symbol alphabet: six language tags (Hb, H, He,
// Eb, E, Ee), a word-boundary marker "|" and a silence marker "sil". The
// b/e variants mark the begin/end characters of each word.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cslid/util.hpp"

namespace cslid {

enum class LidTag : std::uint8_t {
  Hb = 0,
  H = 1,
  He = 2,
  Eb = 3,
  E = 4,
  Ee = 5,
  Boundary = 6,
  Sil = 7,
};

constexpr int kNumTags = 8;

enum class Lang : std::uint8_t { Hindi, English };

enum class TagFamily : std::uint8_t { Hindi, English, None };

inline TagFamily family(LidTag t) {
  switch (t) {
    case LidTag::Hb:
    case LidTag::H:
    case LidTag::He:
      return TagFamily::Hindi;
    case LidTag::Eb:
    case LidTag::E:
    case LidTag::Ee:
      return TagFamily::English;
    default:
      return TagFamily::None;
  }
}

inline const char* tag_name(LidTag t) {
  switch (t) {
    case LidTag::Hb: return "Hb";
    case LidTag::H: return "H";
    case LidTag::He: return "He";
    case LidTag::Eb: return "Eb";
    case LidTag::E: return "E";
    case LidTag::Ee: return "Ee";
    case LidTag::Boundary: return "|";
    case LidTag::Sil: return "sil";
  }
  return "?";
}

inline std::optional<LidTag> tag_from_name(const std::string& s) {
  for (int i = 0; i < kNumTags; ++i) {
    LidTag t = static_cast<LidTag>(i);
    if (s == tag_name(t)) return t;
  }
  return std::nullopt;
}

using TagSequence = std::vector<LidTag>;

inline std::string tags_to_string(const TagSequence& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += ' ';
    out += tag_name(tags[i]);
  }
  return out;
}

inline TagSequence tags_from_string(const std::string& text) {
  TagSequence out;
  for (const std::string& tok : split_ws(text)) {
    auto t = tag_from_name(tok);
    if (!t) throw DataError("unknown LID tag token: '" + tok + "'");
    out.push_back(*t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// UTF-8 and grapheme handling. Full Unicode segmentation is out of scope; the
// rule used here is: a combining mark extends the current cluster, anything
// else starts a new one. That covers the two scripts the tag scheme knows
// about (Devanagari matras/virama/nasalization marks and Latin combining
// diacritics).

inline std::vector<char32_t> decode_utf8(const std::string& s) {
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1f;
      extra = 1;
    } else if ((c >> 4) == 0xe) {
      cp = c & 0x0f;
      extra = 2;
    } else if ((c >> 3) == 0x1e) {
      cp = c & 0x07;
      extra = 3;
    } else {
      throw DataError("invalid UTF-8 byte in '" + s + "'");
    }
    if (extra > 0 && i + static_cast<std::size_t>(extra) >= s.size())
      throw DataError("truncated UTF-8 sequence in '" + s + "'");
    for (int k = 0; k < extra; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + 1 + static_cast<std::size_t>(k)]);
      if ((cc >> 6) != 0x2) throw DataError("invalid UTF-8 continuation in '" + s + "'");
      cp = (cp << 6) | (cc & 0x3f);
    }
    out.push_back(cp);
    i += 1 + static_cast<std::size_t>(extra);
  }
  return out;
}

inline bool is_combining_mark(char32_t cp) {
  if (cp >= 0x0300 && cp <= 0x036F) return true;  // Latin combining diacritics
  if (cp >= 0x0900 && cp <= 0x0903) return true;  // Devanagari candrabindu/anusvara/visarga
  if (cp == 0x093C) return true;                  // nukta
  if (cp >= 0x093A && cp <= 0x094F && cp != 0x093D) return true;  // matras + virama
  if (cp >= 0x0951 && cp <= 0x0957) return true;  // vedic/stress marks
  if (cp >= 0x0962 && cp <= 0x0963) return true;  // vocalic marks
  return false;
}

// Number of grapheme clusters; combining marks do not count as characters.
inline int grapheme_count(const std::string& word) {
  int n = 0;
  for (char32_t cp : decode_utf8(word))
    if (!is_combining_mark(cp)) ++n;
  return n;
}

inline bool is_devanagari(char32_t cp) { return cp >= 0x0900 && cp <= 0x097F; }
inline bool is_basic_latin_letter(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
}

// Script-based language detection. Characters that carry no script evidence
// (digits, punctuation) are neutral; a word needs evidence from exactly one
// script.
inline Lang detect_language(const std::string& word) {
  if (word.empty()) throw DataError("detect_language: empty word");
  bool hindi = false, english = false;
  for (char32_t cp : decode_utf8(word)) {
    if (is_devanagari(cp)) hindi = true;
    else if (is_basic_latin_letter(cp)) english = true;
  }
  if (hindi == english)
    throw DataError("ambiguous script: '" + word + "'");
  return hindi ? Lang::Hindi : Lang::English;
}

// ---------------------------------------------------------------------------
// Tagging.

struct TaggedWord {
  std::string text;
  Lang lang = Lang::Hindi;
  int char_count = 0;

  static TaggedWord make(std::string text, std::optional<Lang> lang = std::nullopt) {
    TaggedWord w;
    w.text = std::move(text);
    w.lang = lang ? *lang : detect_language(w.text);
    w.char_count = grapheme_count(w.text);
    if (w.char_count < 1) throw DataError("word with no characters: '" + w.text + "'");
    return w;
  }
};

// Tags for one word of n characters: begin tag, n-2 bare tags, end tag.
// A single-character word emits only the begin tag.
inline TagSequence word_tags(Lang lang, int char_count) {
  if (char_count < 1) throw DataError("word_tags: char_count must be >= 1");
  LidTag b = lang == Lang::Hindi ? LidTag::Hb : LidTag::Eb;
  LidTag m = lang == Lang::Hindi ? LidTag::H : LidTag::E;
  LidTag e = lang == Lang::Hindi ? LidTag::He : LidTag::Ee;
  TagSequence out;
  out.reserve(static_cast<std::size_t>(char_count));
  out.push_back(b);
  if (char_count >= 2) {
    for (int i = 0; i < char_count - 2; ++i) out.push_back(m);
    out.push_back(e);
  }
  return out;
}

// Character-level target for a word sequence: per-word tags joined by the
// boundary marker, optionally wrapped in sil.
inline TagSequence labelize(const std::vector<TaggedWord>& words, bool add_sil = false) {
  if (words.empty()) throw DataError("labelize: empty word sequence");
  TagSequence out;
  if (add_sil) out.push_back(LidTag::Sil);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(LidTag::Boundary);
    TagSequence wt = word_tags(words[i].lang, words[i].char_count);
    out.insert(out.end(), wt.begin(), wt.end());
  }
  if (add_sil) out.push_back(LidTag::Sil);
  return out;
}

inline TagSequence strip_sil(const TagSequence& tags) {
  TagSequence out;
  out.reserve(tags.size());
  for (LidTag t : tags)
    if (t != LidTag::Sil) out.push_back(t);
  return out;
}

// Word-level languages by majority vote over boundary-delimited segments.
// Accepts arbitrary tag streams (decoder hypotheses need not be well formed):
// sil is ignored, empty segments are dropped, and a tie inside a segment is
// resolved to the family of the segment's first tag.
inline std::vector<Lang> majority_vote(const TagSequence& tags) {
  std::vector<Lang> out;
  int hindi = 0, english = 0;
  std::optional<Lang> first;
  auto flush = [&]() {
    if (hindi + english > 0) {
      if (hindi > english) out.push_back(Lang::Hindi);
      else if (english > hindi) out.push_back(Lang::English);
      else out.push_back(*first);
    }
    hindi = english = 0;
    first.reset();
  };
  for (LidTag t : tags) {
    if (t == LidTag::Sil) continue;
    if (t == LidTag::Boundary) {
      flush();
      continue;
    }
    TagFamily f = family(t);
    if (f == TagFamily::Hindi) ++hindi;
    else ++english;
    if (!first) first = f == TagFamily::Hindi ? Lang::Hindi : Lang::English;
  }
  flush();
  return out;
}

inline const char* lang_name(Lang l) { return l == Lang::Hindi ? "H" : "E"; }

inline std::optional<Lang> lang_from_name(const std::string& s) {
  if (s == "H") return Lang::Hindi;
  if (s == "E") return Lang::English;
  return std::nullopt;
}

inline std::string langs_to_string(const std::vector<Lang>& langs) {
  std::string out;
  for (std::size_t i = 0; i < langs.size(); ++i) {
    if (i) out += " | ";
    out += lang_name(langs[i]);
  }
  return out;
}

}  // namespace cslid
