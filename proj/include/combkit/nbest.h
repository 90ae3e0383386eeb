// combkit/nbest.h
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

#ifndef COMBKIT_NBEST_H_
#define COMBKIT_NBEST_H_

#include <map>
#include <string>
#include <vector>

#include "combkit/align.h"

namespace combkit {

struct Hypothesis {
  WordSequence words;
  double acoustic_score = 0.0;  // log domain
  double lm_score = 0.0;        // log domain
};

struct NBestList {
  std::string utterance_id;
  std::vector<Hypothesis> hypotheses;  // non-empty, file order preserved
};

struct SystemOutput {
  std::string system_id;
  std::map<std::string, NBestList> lists;  // keyed by utterance id
};

// N-best file: UTF-8 lines "utt-id<TAB>rank<TAB>acoustic<TAB>lm<TAB>word
// word ...". Ranks are positive and unique per utterance; the word field may
// be empty. Malformed lines, non-numeric or non-finite scores, and duplicate
// (utterance, rank) pairs raise DataError with file:line context; an empty
// file is "no utterances".
SystemOutput ParseNbest(const std::string &text, const std::string &filename);
std::string RenderNbest(const SystemOutput &system);

struct PosteriorEntry {
  WordSequence words;
  double probability = 0.0;
};

// Normalized hypothesis probabilities for one utterance, sorted by
// descending probability with ties in word-sequence byte order. Entries'
// word sequences are pairwise distinct; probabilities sum to 1.
struct PosteriorDistribution {
  std::vector<PosteriorEntry> entries;
};

struct PosteriorScales {
  double lm_scale = 1.0;        // gamma >= 0
  double posterior_scale = 1.0; // beta > 0
};

// Softmax over combined log scores s_i = beta * (acoustic_i + gamma * lm_i).
// Duplicate word sequences are merged by log-sum-exp of their combined
// scores before normalization; the softmax shifts by the max score for
// stability. Throws std::invalid_argument for an empty list or scales
// outside their domain.
PosteriorDistribution ComputePosteriors(const NBestList &list,
                                        const PosteriorScales &scales);

// Highest-posterior word sequence per utterance (ties resolved by the
// posterior's canonical order).
Transcripts OneBest(const SystemOutput &system, const PosteriorScales &scales);

}  // namespace combkit

#endif  // COMBKIT_NBEST_H_
