// combkit/diversity.h
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

#ifndef COMBKIT_DIVERSITY_H_
#define COMBKIT_DIVERSITY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "combkit/align.h"
#include "combkit/nbest.h"

namespace combkit {

// Cross word error rate over the systems' 1-best outputs, in percent:
// the average over all M(M-1) ordered system pairs (m, n) of
//   sum_r L(W_r^m, W_r^n) / sum_r |W_r^n|.
// The denominator is indexed by the second system of the pair, so ordered
// pairs are asymmetric when output lengths differ. Throws DataError for
// fewer than 2 systems, mismatched utterance sets, or a zero-length
// denominator.
double CrossWer(const std::vector<Transcripts> &systems);

struct EnsembleStatsOptions {
  bool sample_stddev = false;  // default population standard deviation
  int threads = 1;
};

struct EnsembleStats {
  std::vector<double> wers;  // per-system WER%, system order preserved
  double mean = 0.0;
  double stddev = 0.0;
  double cwer = 0.0;
};

// Per-system WER against the references plus mean, standard deviation and
// cross WER of the ensemble.
EnsembleStats ComputeEnsembleStats(const std::vector<Transcripts> &systems,
                                   const Transcripts &refs,
                                   const EnsembleStatsOptions &opts = {});

struct SynthOptions {
  int num_systems = 1;
  double target_wer = 0.0;  // percent, in [0, 50]
  std::uint64_t seed = 0;
};

// Synthetic random ensemble: each system independently corrupts each
// reference word with probability target_wer/100 (substitute 60%, delete
// 20%, insert-after 20%; replacement words drawn from the reference
// vocabulary). The corruption stream is derived from (seed, system index,
// utterance id), so outputs are reproducible word by word. Each corrupted
// sequence becomes a 1-hypothesis N-best list. Throws DataError for an empty
// reference set, std::invalid_argument for out-of-range options.
std::vector<SystemOutput> SynthEnsemble(const Transcripts &refs,
                                        const SynthOptions &opts);

// Temporal context contributed by one model layer.
struct LayerContext {
  enum class Kind { kSpliced, kRecurrent };
  Kind kind = Kind::kSpliced;
  std::vector<int> offsets;   // spliced: sorted distinct frame offsets, 0 required
  int past_horizon = 0;       // recurrent horizons, >= 0
  int future_horizon = 0;
};

struct ReceptiveField {
  int left = 0;   // frames into the past
  int right = 0;  // frames into the future
};

// Total receptive field of a layer stack: a spliced layer contributes
// (-min offset, +max offset), a recurrent layer its configured horizons;
// contributions add across layers. Throws std::invalid_argument for an empty
// stack, a spliced layer without offset 0, or negative horizons.
ReceptiveField ComputeReceptiveField(const std::vector<LayerContext> &layers);

// Layers file: one line per layer, "splice o1,o2,..." or "recur past,future".
std::vector<LayerContext> ParseLayersFile(const std::string &text,
                                          const std::string &filename);

}  // namespace combkit

#endif  // COMBKIT_DIVERSITY_H_
