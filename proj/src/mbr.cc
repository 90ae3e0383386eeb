// combkit/mbr.cc
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

#include "combkit/mbr.h"

#include <set>
#include <stdexcept>

#include "combkit/error.h"
#include "combkit/parallel.h"
#include "combkit/text_io.h"

namespace combkit {

CombinationWeights CombinationWeights::Uniform(std::size_t num_systems) {
  if (num_systems == 0) {
    throw std::invalid_argument("weights require at least one system");
  }
  CombinationWeights w;
  w.lambdas.assign(num_systems, 1.0 / static_cast<double>(num_systems));
  return w;
}

CombinationWeights CombinationWeights::Normalized(std::vector<double> raw) {
  if (raw.empty()) {
    throw std::invalid_argument("weights require at least one system");
  }
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("combination weights must be non-negative");
    }
    sum += v;
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("combination weights must not all be zero");
  }
  for (double &v : raw) v /= sum;
  CombinationWeights w;
  w.lambdas = std::move(raw);
  return w;
}

namespace {

// Shared candidate evaluation for decode (one system) and combination.
// The summation order is part of the contract: systems in the given order,
// each system's hypotheses in the posterior's canonical order.
MbrResult EvaluateCandidates(const std::vector<PosteriorDistribution> &systems,
                             const std::vector<double> &lambdas,
                             const std::vector<WordSequence> &candidates,
                             const std::string &utterance_id) {
  MbrResult result;
  result.utterance_id = utterance_id;
  result.candidate_risks.reserve(candidates.size());

  std::size_t best = 0;
  double best_mass = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const WordSequence &cand = candidates[c];
    double risk = 0.0;
    double mass = 0.0;  // lambda-weighted posterior of the candidate itself
    for (std::size_t m = 0; m < systems.size(); ++m) {
      double expected = 0.0;
      for (const PosteriorEntry &entry : systems[m].entries) {
        expected += entry.probability *
                    static_cast<double>(Levenshtein(cand, entry.words).distance);
        if (entry.words == cand) mass += lambdas[m] * entry.probability;
      }
      risk += lambdas[m] * expected;
    }
    result.candidate_risks.push_back(CandidateRisk{cand, risk});
    if (c == 0) {
      best_mass = mass;
      continue;
    }
    const double best_risk = result.candidate_risks[best].risk;
    bool better = risk < best_risk;
    if (risk == best_risk) {
      if (mass > best_mass) {
        better = true;
      } else if (mass == best_mass &&
                 CompareWords(cand, result.candidate_risks[best].words) < 0) {
        better = true;
      }
    }
    if (better) {
      best = c;
      best_mass = mass;
    }
  }
  result.chosen = result.candidate_risks[best].words;
  result.risk = result.candidate_risks[best].risk;
  return result;
}

// Union of the systems' supports, first occurrence kept.
std::vector<WordSequence> EnumerateCandidates(
    const std::vector<PosteriorDistribution> &systems) {
  std::vector<WordSequence> candidates;
  std::set<WordSequence> seen;
  for (const PosteriorDistribution &dist : systems) {
    for (const PosteriorEntry &entry : dist.entries) {
      if (seen.insert(entry.words).second) candidates.push_back(entry.words);
    }
  }
  return candidates;
}

}  // namespace

MbrResult MbrDecode(const PosteriorDistribution &posterior,
                    const std::vector<WordSequence> *candidates,
                    const std::string &utterance_id) {
  if (posterior.entries.empty()) {
    throw std::invalid_argument("empty posterior distribution");
  }
  std::vector<PosteriorDistribution> systems{posterior};
  std::vector<WordSequence> cands;
  if (candidates == nullptr) {
    cands = EnumerateCandidates(systems);
  } else {
    std::set<WordSequence> seen;
    for (const WordSequence &cand : *candidates) {
      if (seen.insert(cand).second) cands.push_back(cand);
    }
    if (cands.empty()) {
      throw std::invalid_argument("empty candidate set");
    }
  }
  return EvaluateCandidates(systems, {1.0}, cands, utterance_id);
}

MbrResult MbrCombine(const std::vector<PosteriorDistribution> &systems,
                     const CombinationWeights &weights,
                     const std::string &utterance_id) {
  if (systems.empty()) {
    throw std::invalid_argument("combination requires at least one system");
  }
  if (weights.lambdas.size() != systems.size()) {
    throw std::invalid_argument(StringPrintf(
        "got %zu weights for %zu systems", weights.lambdas.size(),
        systems.size()));
  }
  for (const PosteriorDistribution &dist : systems) {
    if (dist.entries.empty()) {
      throw std::invalid_argument("empty posterior distribution");
    }
  }
  return EvaluateCandidates(systems, weights.lambdas,
                            EnumerateCandidates(systems), utterance_id);
}

std::map<std::string, MbrResult> CombineCorpus(
    const std::vector<SystemOutput> &systems, const CombinationWeights &weights,
    const CombineOptions &opts) {
  if (systems.empty()) {
    throw std::invalid_argument("combination requires at least one system");
  }
  if (weights.lambdas.size() != systems.size()) {
    throw std::invalid_argument(StringPrintf(
        "got %zu weights for %zu systems", weights.lambdas.size(),
        systems.size()));
  }

  // Utterance coverage: all ids, and the ids covered by every system.
  std::map<std::string, std::size_t> coverage;
  for (const SystemOutput &system : systems) {
    for (const auto &[utt, list] : system.lists) ++coverage[utt];
  }
  std::vector<std::string> utts;
  std::string partial;
  for (const auto &[utt, count] : coverage) {
    if (count == systems.size()) {
      utts.push_back(utt);
    } else if (!opts.intersect) {
      partial += partial.empty() ? utt : ", " + utt;
    }
  }
  if (!partial.empty()) {
    throw DataError("utterance(s) not present in every system: " + partial);
  }
  if (utts.empty()) {
    throw DataError("no utterances common to all systems");
  }

  std::vector<MbrResult> rows(utts.size());
  ParallelFor(utts.size(), opts.threads, [&](std::size_t i) {
    const std::string &utt = utts[i];
    std::vector<PosteriorDistribution> posteriors;
    posteriors.reserve(systems.size());
    for (const SystemOutput &system : systems) {
      posteriors.push_back(
          ComputePosteriors(system.lists.at(utt), opts.scales));
    }
    rows[i] = MbrCombine(posteriors, weights, utt);
  });

  std::map<std::string, MbrResult> results;
  for (MbrResult &row : rows) {
    std::string utt = row.utterance_id;
    results.emplace(std::move(utt), std::move(row));
  }
  return results;
}

Transcripts CombinedTranscripts(
    const std::map<std::string, MbrResult> &results) {
  Transcripts transcripts;
  for (const auto &[utt, result] : results) {
    transcripts.emplace(utt, result.chosen);
  }
  return transcripts;
}

std::string RenderRisks(const std::map<std::string, MbrResult> &results) {
  std::string out;
  for (const auto &[utt, result] : results) {
    for (const CandidateRisk &cand : result.candidate_risks) {
      out += utt;
      out += '\t';
      out += FormatFull(cand.risk);
      out += '\t';
      out += JoinWords(cand.words);
      out += '\n';
    }
  }
  return out;
}

}  // namespace combkit
