// combkit/align.h
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

#ifndef COMBKIT_ALIGN_H_
#define COMBKIT_ALIGN_H_

#include <map>
#include <string>
#include <vector>

namespace combkit {

// A tokenized utterance. Tokens are non-empty and contain no whitespace.
// The empty sequence is a valid utterance.
using WordSequence = std::vector<std::string>;

std::string JoinWords(const WordSequence &words);

// Total order on word sequences: byte order of the space-joined rendering.
// Returns <0, 0, >0. Used everywhere a deterministic tie-break is needed.
int CompareWords(const WordSequence &a, const WordSequence &b);

// Edit operation counts for transforming `a` into `b`:
// deletions remove tokens of `a`, insertions add tokens of `b`.
struct AlignmentResult {
  int distance = 0;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
};

// Minimal word-level edit distance with unit costs. The distance is unique;
// the operation counts come from one minimal backtrace chosen
// deterministically (at equal cost prefer match/substitution, then deletion,
// then insertion).
AlignmentResult Levenshtein(const WordSequence &a, const WordSequence &b);

// Utterance transcripts keyed by utterance id (sorted by id).
using Transcripts = std::map<std::string, WordSequence>;

struct UtteranceScore {
  std::string utterance_id;
  AlignmentResult counts;  // Levenshtein(ref, hyp)
  long long ref_words = 0;
};

struct WerReport {
  std::vector<UtteranceScore> utterances;  // utterance-id sorted
  long long substitutions = 0;
  long long insertions = 0;
  long long deletions = 0;
  long long errors = 0;
  long long ref_words = 0;

  // WER percentage at full precision; Wer() may exceed 100 (insertions).
  double Wer() const { return 100.0 * static_cast<double>(errors) / static_cast<double>(ref_words); }

  // "WER=<one decimal> SUB=<int> INS=<int> DEL=<int> WORDS=<int>"
  std::string MachineLine() const;

  // Per-utterance counts plus totals and the full-precision WER.
  std::string DetailedReport() const;
};

struct WerOptions {
  // Treat a reference utterance with no hypothesis as an empty hypothesis
  // instead of failing.
  bool missing_hyp_as_empty = false;
  int threads = 1;
};

// Scores hypotheses against references. Throws DataError when hypothesis and
// reference utterance sets mismatch (listing the offending ids) or when the
// total reference word count is zero.
WerReport ScoreWer(const Transcripts &hyps, const Transcripts &refs,
                   const WerOptions &opts = {});

// 100 * (other - baseline) / baseline. Throws std::invalid_argument unless
// baseline > 0.
double RelativeChange(double baseline_wer, double other_wer);

// Reference / 1-best hypothesis file: UTF-8 lines "utt-id<TAB>word word ...";
// an empty word sequence is written as "utt-id<TAB>". Parsing is strict:
// duplicate ids, missing tabs and empty or whitespace-bearing tokens are
// errors with file:line context.
Transcripts ParseTranscripts(const std::string &text, const std::string &filename);
std::string RenderTranscripts(const Transcripts &transcripts);

}  // namespace combkit

#endif  // COMBKIT_ALIGN_H_
