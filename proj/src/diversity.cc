// combkit/diversity.cc
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

#include "combkit/diversity.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "combkit/error.h"
#include "combkit/parallel.h"
#include "combkit/rng.h"
#include "combkit/text_io.h"

namespace combkit {

double CrossWer(const std::vector<Transcripts> &systems) {
  const std::size_t num = systems.size();
  if (num < 2) {
    throw DataError("cross WER requires at least 2 systems");
  }
  for (std::size_t n = 1; n < num; ++n) {
    if (systems[n].size() != systems[0].size() ||
        !std::equal(systems[n].begin(), systems[n].end(), systems[0].begin(),
                    [](const auto &a, const auto &b) {
                      return a.first == b.first;
                    })) {
      throw DataError(StringPrintf(
          "utterance sets differ between system 1 and system %zu", n + 1));
    }
  }

  // Total output length of each system; the pair denominator is indexed by
  // the second system of the ordered pair.
  std::vector<long long> lengths(num, 0);
  for (std::size_t n = 0; n < num; ++n) {
    for (const auto &[utt, words] : systems[n]) {
      lengths[n] += static_cast<long long>(words.size());
    }
    if (lengths[n] <= 0) {
      throw DataError(
          StringPrintf("system %zu has zero total output words", n + 1));
    }
  }

  double sum = 0.0;
  for (std::size_t m = 0; m < num; ++m) {
    for (std::size_t n = 0; n < num; ++n) {
      if (n == m) continue;
      long long edits = 0;
      auto it_n = systems[n].begin();
      for (const auto &[utt, words_m] : systems[m]) {
        edits += Levenshtein(words_m, it_n->second).distance;
        ++it_n;
      }
      sum += static_cast<double>(edits) / static_cast<double>(lengths[n]);
    }
  }
  return 100.0 * sum / static_cast<double>(num * (num - 1));
}

EnsembleStats ComputeEnsembleStats(const std::vector<Transcripts> &systems,
                                   const Transcripts &refs,
                                   const EnsembleStatsOptions &opts) {
  if (systems.empty()) {
    throw std::invalid_argument("no systems");
  }
  if (opts.sample_stddev && systems.size() < 2) {
    throw std::invalid_argument(
        "sample standard deviation requires at least 2 systems");
  }
  EnsembleStats stats;
  stats.wers.resize(systems.size());
  ParallelFor(systems.size(), opts.threads, [&](std::size_t i) {
    stats.wers[i] = ScoreWer(systems[i], refs).Wer();
  });

  double sum = 0.0;
  for (double w : stats.wers) sum += w;
  stats.mean = sum / static_cast<double>(stats.wers.size());
  double sq = 0.0;
  for (double w : stats.wers) sq += (w - stats.mean) * (w - stats.mean);
  double denom = opts.sample_stddev
                     ? static_cast<double>(stats.wers.size() - 1)
                     : static_cast<double>(stats.wers.size());
  stats.stddev = std::sqrt(sq / denom);
  stats.cwer = CrossWer(systems);
  return stats;
}

std::vector<SystemOutput> SynthEnsemble(const Transcripts &refs,
                                        const SynthOptions &opts) {
  if (opts.num_systems < 1) {
    throw std::invalid_argument("num_systems must be >= 1");
  }
  if (!(opts.target_wer >= 0.0 && opts.target_wer <= 50.0)) {
    throw std::invalid_argument("target WER must be in [0, 50]");
  }
  if (refs.empty()) {
    throw DataError("empty reference set");
  }
  std::set<std::string> vocab_set;
  for (const auto &[utt, words] : refs) {
    vocab_set.insert(words.begin(), words.end());
  }
  std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
  if (vocab.empty() && opts.target_wer > 0.0) {
    throw DataError("reference vocabulary is empty");
  }
  const double p = opts.target_wer / 100.0;

  std::vector<SystemOutput> systems(
      static_cast<std::size_t>(opts.num_systems));
  for (std::size_t s = 0; s < systems.size(); ++s) {
    systems[s].system_id = "synth" + std::to_string(s + 1);
    for (const auto &[utt, ref_words] : refs) {
      Rng rng(DeriveSeed(opts.seed, s, utt));
      Hypothesis hyp;
      for (const std::string &word : ref_words) {
        if (rng.Uniform() >= p) {
          hyp.words.push_back(word);
          continue;
        }
        double action = rng.Uniform();
        if (action < 0.6) {
          hyp.words.push_back(vocab[rng.Bounded(vocab.size())]);
        } else if (action < 0.8) {
          // deletion
        } else {
          hyp.words.push_back(word);
          hyp.words.push_back(vocab[rng.Bounded(vocab.size())]);
        }
      }
      NBestList &list = systems[s].lists[utt];
      list.utterance_id = utt;
      list.hypotheses.push_back(std::move(hyp));
    }
  }
  return systems;
}

ReceptiveField ComputeReceptiveField(const std::vector<LayerContext> &layers) {
  if (layers.empty()) {
    throw std::invalid_argument("empty layer stack");
  }
  ReceptiveField field;
  for (const LayerContext &layer : layers) {
    if (layer.kind == LayerContext::Kind::kSpliced) {
      if (layer.offsets.empty() ||
          std::find(layer.offsets.begin(), layer.offsets.end(), 0) ==
              layer.offsets.end()) {
        throw std::invalid_argument("spliced layer must include offset 0");
      }
      auto [lo, hi] =
          std::minmax_element(layer.offsets.begin(), layer.offsets.end());
      field.left += -*lo;
      field.right += *hi;
    } else {
      if (layer.past_horizon < 0 || layer.future_horizon < 0) {
        throw std::invalid_argument("recurrent horizons must be >= 0");
      }
      field.left += layer.past_horizon;
      field.right += layer.future_horizon;
    }
  }
  return field;
}

std::vector<LayerContext> ParseLayersFile(const std::string &text,
                                          const std::string &filename) {
  std::vector<LayerContext> layers;
  std::vector<std::string> lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    std::vector<std::string> fields = SplitFields(lines[i], ' ');
    if (fields.size() != 2 || fields[1].empty()) {
      throw DataError(filename, line_no,
                      "expected \"splice o1,o2,...\" or \"recur past,future\"");
    }
    LayerContext layer;
    std::vector<std::string> parts = SplitFields(fields[1], ',');
    if (fields[0] == "splice") {
      layer.kind = LayerContext::Kind::kSpliced;
      bool has_zero = false;
      for (const std::string &part : parts) {
        long long offset = 0;
        if (!ParseInt(part, &offset)) {
          throw DataError(filename, line_no, "bad offset '" + part + "'");
        }
        if (!layer.offsets.empty() && offset <= layer.offsets.back()) {
          throw DataError(filename, line_no,
                          "offsets must be strictly increasing");
        }
        if (offset == 0) has_zero = true;
        layer.offsets.push_back(static_cast<int>(offset));
      }
      if (!has_zero) {
        throw DataError(filename, line_no, "offsets must include 0");
      }
    } else if (fields[0] == "recur") {
      layer.kind = LayerContext::Kind::kRecurrent;
      if (parts.size() != 2) {
        throw DataError(filename, line_no,
                        "expected \"recur past,future\"");
      }
      long long past = 0, future = 0;
      if (!ParseInt(parts[0], &past) || !ParseInt(parts[1], &future) ||
          past < 0 || future < 0) {
        throw DataError(filename, line_no,
                        "horizons must be non-negative integers");
      }
      layer.past_horizon = static_cast<int>(past);
      layer.future_horizon = static_cast<int>(future);
    } else {
      throw DataError(filename, line_no,
                      "unknown layer kind '" + fields[0] + "'");
    }
    layers.push_back(std::move(layer));
  }
  if (layers.empty()) {
    throw DataError(filename, 0, "no layers");
  }
  return layers;
}

}  // namespace combkit
