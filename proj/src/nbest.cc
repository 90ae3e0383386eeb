// combkit/nbest.cc
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

#include "combkit/nbest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include "combkit/error.h"
#include "combkit/text_io.h"

namespace combkit {

SystemOutput ParseNbest(const std::string &text, const std::string &filename) {
  SystemOutput system;
  system.system_id = filename;
  std::set<std::pair<std::string, long long>> seen_ranks;
  std::vector<std::string> lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::vector<std::string> fields = SplitFields(lines[i], '\t');
    if (fields.size() != 5) {
      throw DataError(filename, line_no,
                      StringPrintf("expected \"utt-id<TAB>rank<TAB>acoustic"
                                   "<TAB>lm<TAB>words\", got %zu tab-separated "
                                   "field(s)",
                                   fields.size()));
    }
    const std::string &utt = fields[0];
    if (utt.empty()) {
      throw DataError(filename, line_no, "empty utterance id");
    }
    long long rank = 0;
    if (!ParseInt(fields[1], &rank) || rank < 1) {
      throw DataError(filename, line_no,
                      "rank must be a positive integer, got '" + fields[1] +
                          "'");
    }
    Hypothesis hyp;
    if (!ParseDouble(fields[2], &hyp.acoustic_score)) {
      throw DataError(filename, line_no,
                      "bad acoustic score '" + fields[2] + "'");
    }
    if (!ParseDouble(fields[3], &hyp.lm_score)) {
      throw DataError(filename, line_no, "bad lm score '" + fields[3] + "'");
    }
    if (!fields[4].empty()) {
      for (const std::string &token : SplitFields(fields[4], ' ')) {
        if (token.empty()) {
          throw DataError(filename, line_no, "empty word token");
        }
        hyp.words.push_back(token);
      }
    }
    if (!seen_ranks.emplace(utt, rank).second) {
      throw DataError(filename, line_no,
                      StringPrintf("duplicate rank %lld for utterance '%s'",
                                   rank, utt.c_str()));
    }
    NBestList &list = system.lists[utt];
    list.utterance_id = utt;
    list.hypotheses.push_back(std::move(hyp));
  }
  if (system.lists.empty()) {
    throw DataError(filename, 0, "no utterances");
  }
  return system;
}

std::string RenderNbest(const SystemOutput &system) {
  std::string out;
  for (const auto &[utt, list] : system.lists) {
    for (std::size_t i = 0; i < list.hypotheses.size(); ++i) {
      const Hypothesis &hyp = list.hypotheses[i];
      out += utt;
      out += '\t';
      out += std::to_string(i + 1);
      out += '\t';
      out += FormatFull(hyp.acoustic_score);
      out += '\t';
      out += FormatFull(hyp.lm_score);
      out += '\t';
      out += JoinWords(hyp.words);
      out += '\n';
    }
  }
  return out;
}

PosteriorDistribution ComputePosteriors(const NBestList &list,
                                        const PosteriorScales &scales) {
  if (list.hypotheses.empty()) {
    throw std::invalid_argument("empty N-best list for utterance '" +
                                list.utterance_id + "'");
  }
  if (!(scales.lm_scale >= 0.0)) {
    throw std::invalid_argument("lm scale must be >= 0");
  }
  if (!(scales.posterior_scale > 0.0)) {
    throw std::invalid_argument("posterior scale must be > 0");
  }

  // Combined log scores, grouped by word sequence in first-seen order.
  std::vector<PosteriorEntry> entries;
  std::vector<std::vector<double>> scores;  // parallel to entries
  std::map<WordSequence, std::size_t> index;
  for (const Hypothesis &hyp : list.hypotheses) {
    double s = scales.posterior_scale *
               (hyp.acoustic_score + scales.lm_scale * hyp.lm_score);
    auto [it, inserted] = index.emplace(hyp.words, entries.size());
    if (inserted) {
      entries.push_back(PosteriorEntry{hyp.words, 0.0});
      scores.emplace_back();
    }
    scores[it->second].push_back(s);
  }

  // Log-sum-exp merge of duplicates, then a max-shifted softmax.
  std::vector<double> merged(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    double m = *std::max_element(scores[i].begin(), scores[i].end());
    double sum = 0.0;
    for (double s : scores[i]) sum += std::exp(s - m);
    merged[i] = m + std::log(sum);
  }
  double shift = *std::max_element(merged.begin(), merged.end());
  double total = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].probability = std::exp(merged[i] - shift);
    total += entries[i].probability;
  }
  for (PosteriorEntry &e : entries) e.probability /= total;

  std::sort(entries.begin(), entries.end(),
            [](const PosteriorEntry &a, const PosteriorEntry &b) {
              if (a.probability != b.probability)
                return a.probability > b.probability;
              return CompareWords(a.words, b.words) < 0;
            });

  PosteriorDistribution dist;
  dist.entries = std::move(entries);
  return dist;
}

Transcripts OneBest(const SystemOutput &system, const PosteriorScales &scales) {
  Transcripts best;
  for (const auto &[utt, list] : system.lists) {
    PosteriorDistribution dist = ComputePosteriors(list, scales);
    best.emplace(utt, dist.entries.front().words);
  }
  return best;
}

}  // namespace combkit
