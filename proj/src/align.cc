// combkit/align.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "combkit/align.h"

#include <algorithm>
#include <stdexcept>

#include "combkit/error.h"
#include "combkit/parallel.h"
#include "combkit/text_io.h"

namespace combkit {

std::string JoinWords(const WordSequence &words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

int CompareWords(const WordSequence &a, const WordSequence &b) {
  // Equivalent to byte comparison of the space-joined renderings.
  std::size_t i = 0, j = 0;      // token index
  std::size_t ci = 0, cj = 0;    // char index within token
  while (true) {
    bool a_end = i >= a.size();
    bool b_end = j >= b.size();
    if (a_end && b_end) return 0;
    // Current byte: the token byte, or the joining space at a token end.
    int ca, cb;
    if (a_end) {
      return -1;
    } else if (ci < a[i].size()) {
      ca = static_cast<unsigned char>(a[i][ci]);
    } else {
      ca = (i + 1 < a.size()) ? ' ' : -1;  // -1: sequence exhausted
    }
    if (b_end) {
      return 1;
    } else if (cj < b[j].size()) {
      cb = static_cast<unsigned char>(b[j][cj]);
    } else {
      cb = (j + 1 < b.size()) ? ' ' : -1;
    }
    if (ca != cb) return ca < cb ? -1 : 1;
    if (ca == -1) return 0;
    // advance
    if (ci < a[i].size()) {
      ++ci;
    } else {
      ++i;
      ci = 0;
    }
    if (cj < b[j].size()) {
      ++cj;
    } else {
      ++j;
      cj = 0;
    }
  }
}

AlignmentResult Levenshtein(const WordSequence &a, const WordSequence &b) {
  const std::size_t n = a.size(), m = b.size();
  // cost[i][j]: distance between a[0..i) and b[0..j)
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      int diag = cost[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      int del = cost[i - 1][j] + 1;
      int ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min(diag, std::min(del, ins));
    }
  }
  // Deterministic backtrace: prefer match/substitution, then deletion, then
  // insertion, so the operation counts are reproducible across minimal
  // alignments.
  AlignmentResult r;
  r.distance = cost[n][m];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      int diag = cost[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      if (cost[i][j] == diag) {
        if (a[i - 1] != b[j - 1]) ++r.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++r.deletions;
      --i;
      continue;
    }
    ++r.insertions;
    --j;
  }
  return r;
}

std::string WerReport::MachineLine() const {
  return StringPrintf("WER=%.1f SUB=%lld INS=%lld DEL=%lld WORDS=%lld", Wer(),
                      substitutions, insertions, deletions, ref_words);
}

std::string WerReport::DetailedReport() const {
  std::string out;
  for (const UtteranceScore &u : utterances) {
    out += StringPrintf("%s\tERR=%d\tSUB=%d\tINS=%d\tDEL=%d\tWORDS=%lld\n",
                        u.utterance_id.c_str(), u.counts.distance,
                        u.counts.substitutions, u.counts.insertions,
                        u.counts.deletions, u.ref_words);
  }
  out += StringPrintf("TOTAL\tERR=%lld\tSUB=%lld\tINS=%lld\tDEL=%lld\tWORDS=%lld\n",
                      errors, substitutions, insertions, deletions, ref_words);
  out += MachineLine();
  out += '\n';
  out += "WER_FULL=" + FormatFull(Wer()) + "\n";
  return out;
}

WerReport ScoreWer(const Transcripts &hyps, const Transcripts &refs,
                   const WerOptions &opts) {
  std::string missing;
  for (const auto &[utt, words] : refs) {
    if (!opts.missing_hyp_as_empty && hyps.find(utt) == hyps.end()) {
      missing += missing.empty() ? utt : ", " + utt;
    }
  }
  if (!missing.empty()) {
    throw DataError("missing hypothesis for utterance(s): " + missing);
  }
  std::string unknown;
  for (const auto &[utt, words] : hyps) {
    if (refs.find(utt) == refs.end()) {
      unknown += unknown.empty() ? utt : ", " + utt;
    }
  }
  if (!unknown.empty()) {
    throw DataError("hypothesis for unknown utterance(s): " + unknown);
  }

  WerReport report;
  report.utterances.resize(refs.size());
  std::vector<const std::pair<const std::string, WordSequence> *> ref_items;
  ref_items.reserve(refs.size());
  for (const auto &item : refs) ref_items.push_back(&item);

  static const WordSequence kEmpty;
  ParallelFor(ref_items.size(), opts.threads, [&](std::size_t idx) {
    const auto &[utt, ref_words] = *ref_items[idx];
    auto it = hyps.find(utt);
    const WordSequence &hyp_words = (it == hyps.end()) ? kEmpty : it->second;
    UtteranceScore &slot = report.utterances[idx];
    slot.utterance_id = utt;
    slot.counts = Levenshtein(ref_words, hyp_words);
    slot.ref_words = static_cast<long long>(ref_words.size());
  });

  for (const UtteranceScore &u : report.utterances) {
    report.substitutions += u.counts.substitutions;
    report.insertions += u.counts.insertions;
    report.deletions += u.counts.deletions;
    report.errors += u.counts.distance;
    report.ref_words += u.ref_words;
  }
  if (report.ref_words <= 0) {
    throw DataError("total reference word count is zero");
  }
  return report;
}

double RelativeChange(double baseline_wer, double other_wer) {
  if (!(baseline_wer > 0.0)) {
    throw std::invalid_argument("relative change requires a positive baseline");
  }
  return 100.0 * (other_wer - baseline_wer) / baseline_wer;
}

Transcripts ParseTranscripts(const std::string &text,
                             const std::string &filename) {
  Transcripts transcripts;
  std::vector<std::string> lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::vector<std::string> fields = SplitFields(lines[i], '\t');
    if (fields.size() != 2) {
      throw DataError(filename, line_no,
                      StringPrintf("expected \"utt-id<TAB>words\", got %zu "
                                   "tab-separated field(s)",
                                   fields.size()));
    }
    if (fields[0].empty()) {
      throw DataError(filename, line_no, "empty utterance id");
    }
    WordSequence words;
    if (!fields[1].empty()) {
      for (const std::string &token : SplitFields(fields[1], ' ')) {
        if (token.empty()) {
          throw DataError(filename, line_no, "empty word token");
        }
        if (token.find_first_of("\r\n\t ") != std::string::npos) {
          throw DataError(filename, line_no,
                          "word token contains whitespace");
        }
        words.push_back(token);
      }
    }
    if (!transcripts.emplace(fields[0], std::move(words)).second) {
      throw DataError(filename, line_no,
                      "duplicate utterance id '" + fields[0] + "'");
    }
  }
  return transcripts;
}

std::string RenderTranscripts(const Transcripts &transcripts) {
  std::string out;
  for (const auto &[utt, words] : transcripts) {
    out += utt;
    out += '\t';
    out += JoinWords(words);
    out += '\n';
  }
  return out;
}

}  // namespace combkit
