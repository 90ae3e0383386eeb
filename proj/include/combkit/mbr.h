// combkit/mbr.h
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

#ifndef COMBKIT_MBR_H_
#define COMBKIT_MBR_H_

#include <map>
#include <string>
#include <vector>

#include "combkit/nbest.h"

namespace combkit {

// Per-system combination weights, normalized to sum to 1.
struct CombinationWeights {
  std::vector<double> lambdas;

  static CombinationWeights Uniform(std::size_t num_systems);
  // Normalizes raw weights by their sum. Throws std::invalid_argument on an
  // empty list, a negative entry, or an all-zero list.
  static CombinationWeights Normalized(std::vector<double> raw);
};

struct CandidateRisk {
  WordSequence words;
  double risk = 0.0;
};

struct MbrResult {
  std::string utterance_id;
  WordSequence chosen;
  double risk = 0.0;
  // All evaluated candidates in enumeration order (systems in given order,
  // each system's hypotheses in posterior canonical order, first occurrence
  // kept).
  std::vector<CandidateRisk> candidate_risks;
};

// Single-system MBR decode: the candidate minimizing expected Levenshtein
// distance under the posterior. The candidate set defaults to the
// posterior's support; ties go to the candidate with higher posterior, then
// byte order. Risk sums follow the posterior's canonical order.
MbrResult MbrDecode(const PosteriorDistribution &posterior,
                    const std::vector<WordSequence> *candidates = nullptr,
                    const std::string &utterance_id = "");

// Multi-system MBR combination over the union of the systems' supports:
//   risk(W) = sum_m lambda_m * sum_{W' in H_m} P_m(W') * L(W, W')
// with deterministic summation order (systems in given order, hypotheses in
// canonical order). Ties go to the candidate with higher lambda-weighted
// posterior mass, then byte order.
MbrResult MbrCombine(const std::vector<PosteriorDistribution> &systems,
                     const CombinationWeights &weights,
                     const std::string &utterance_id = "");

struct CombineOptions {
  PosteriorScales scales;
  // Combine over the intersection of the systems' utterance sets instead of
  // requiring identical coverage.
  bool intersect = false;
  int threads = 1;
};

// Corpus-level combination: shared scales, per-utterance posteriors, then
// MbrCombine. In strict mode (intersect off) a coverage mismatch raises
// DataError listing the symmetric difference.
std::map<std::string, MbrResult> CombineCorpus(
    const std::vector<SystemOutput> &systems, const CombinationWeights &weights,
    const CombineOptions &opts = {});

// The chosen word sequences of a corpus combination, ready for scoring.
Transcripts CombinedTranscripts(const std::map<std::string, MbrResult> &results);

// Per-candidate risk dump: lines "utt<TAB>risk<TAB>word word ..." in
// utterance order, candidates in enumeration order.
std::string RenderRisks(const std::map<std::string, MbrResult> &results);

}  // namespace combkit

#endif  // COMBKIT_MBR_H_
