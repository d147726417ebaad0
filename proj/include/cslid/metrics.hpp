// cslid/metrics.hpp -- LID error rate from Levenshtein alignment counts.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "cslid/tags.hpp"
#include "cslid/util.hpp"

namespace cslid {

struct AlignmentCounts {
  std::int64_t substitutions = 0;
  std::int64_t insertions = 0;
  std::int64_t deletions = 0;
  std::int64_t reference_length = 0;

  std::int64_t edit_distance() const { return substitutions + insertions + deletions; }

  AlignmentCounts& operator+=(const AlignmentCounts& o) {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    reference_length += o.reference_length;
    return *this;
  }
};

// Minimal edit-distance alignment with unit costs. The backtrace resolves
// cost ties with a fixed preference: substitution > deletion > insertion,
// so the (S, I, D) split is reproducible. The total distance itself is
// tie-invariant.
template <typename Symbol>
AlignmentCounts align(const std::vector<Symbol>& ref, const std::vector<Symbol>& hyp) {
  if (ref.empty()) throw DataError("align: empty reference");
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::int32_t> dist((n + 1) * (m + 1));
  auto d = [&](std::size_t i, std::size_t j) -> std::int32_t& {
    return dist[i * (m + 1) + j];
  };
  for (std::size_t i = 0; i <= n; ++i) d(i, 0) = static_cast<std::int32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) d(0, j) = static_cast<std::int32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      std::int32_t sub = d(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      std::int32_t del = d(i - 1, j) + 1;
      std::int32_t ins = d(i, j - 1) + 1;
      d(i, j) = std::min({sub, del, ins});
    }
  }
  AlignmentCounts counts;
  counts.reference_length = static_cast<std::int64_t>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d(i, j) == d(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++counts.substitutions;
      --i;
      --j;
    } else if (i > 0 && d(i, j) == d(i - 1, j) + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

// (S + I + D) / N * 100.
inline double lid_error_rate(const AlignmentCounts& counts) {
  if (counts.reference_length <= 0) throw DataError("lid_error_rate: empty reference");
  return 100.0 * static_cast<double>(counts.edit_distance()) /
         static_cast<double>(counts.reference_length);
}

// Reporting convention: percentages are truncated (not rounded) to two
// decimals. The epsilon guards entries that are exact two-decimal values
// against downward float drift.
inline double truncate_rate(double percent) {
  return std::floor(percent * 100.0 + 1e-9) / 100.0;
}

inline std::string format_rate(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", truncate_rate(percent));
  return buf;
}

struct CorpusReport {
  AlignmentCounts character;
  AlignmentCounts word;
  double character_rate() const { return lid_error_rate(character); }
  double word_rate() const { return lid_error_rate(word); }
};

// Aggregates alignment counts over a corpus: counts are summed across
// utterances before the division, matching a single-N construction rather
// than a mean of per-utterance rates. Character-level scoring strips sil and
// keeps the boundary marker; word-level scoring compares majority-voted
// language sequences.
inline CorpusReport corpus_report(const std::vector<TagSequence>& refs,
                                  const std::vector<TagSequence>& hyps) {
  if (refs.size() != hyps.size())
    throw DataError("corpus_report: reference/hypothesis count mismatch");
  CorpusReport report;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    TagSequence ref_tags = strip_sil(refs[i]);
    TagSequence hyp_tags = strip_sil(hyps[i]);
    report.character += align(ref_tags, hyp_tags);
    report.word += align(majority_vote(refs[i]), majority_vote(hyps[i]));
  }
  return report;
}

// Text table mirroring the {N_D, N_I, N_S, rate} column layout.
inline std::string report_table(const CorpusReport& report) {
  char buf[256];
  std::string out;
  out += "level      |      N_D |      N_I |      N_S |        N | rate (%)\n";
  out += "-----------+----------+----------+----------+----------+---------\n";
  auto row = [&](const char* level, const AlignmentCounts& c) {
    std::snprintf(buf, sizeof(buf), "%-10s | %8lld | %8lld | %8lld | %8lld | %8s\n",
                  level, static_cast<long long>(c.deletions),
                  static_cast<long long>(c.insertions),
                  static_cast<long long>(c.substitutions),
                  static_cast<long long>(c.reference_length),
                  format_rate(lid_error_rate(c)).c_str());
    out += buf;
  };
  row("character", report.character);
  row("word", report.word);
  return out;
}

// One machine-readable line per level: "level=<l> ND=<..> NI=<..> NS=<..> N=<..> rate=<..>".
inline std::string report_records(const CorpusReport& report) {
  auto rec = [&](const char* level, const AlignmentCounts& c) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "level=%s ND=%lld NI=%lld NS=%lld N=%lld rate=%s\n",
                  level, static_cast<long long>(c.deletions),
                  static_cast<long long>(c.insertions),
                  static_cast<long long>(c.substitutions),
                  static_cast<long long>(c.reference_length),
                  format_rate(lid_error_rate(c)).c_str());
    return std::string(buf);
  };
  return rec("character", report.character) + rec("word", report.word);
}

}  // namespace cslid
