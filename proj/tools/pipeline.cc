// combkit/tools/pipeline.cc
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

#include "pipeline.h"

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "combkit/align.h"
#include "combkit/diversity.h"
#include "combkit/error.h"
#include "combkit/grapheme_lexicon.h"
#include "combkit/mbr.h"
#include "combkit/nbest.h"
#include "combkit/smoothing.h"
#include "combkit/text_io.h"

namespace combkit {

namespace {

std::string Trim(const std::string &s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Config {
  std::string path;
  std::map<std::string, ConfigEntry> entries;

  const ConfigEntry *Find(const std::string &key) {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
};

Config ParseConfig(const std::string &text, const std::string &path) {
  Config config;
  config.path = path;
  std::vector<std::string> lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::string line = Trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path, line_no, "expected \"key = value\"");
    }
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      throw DataError(path, line_no, "empty config key");
    }
    if (!config.entries.emplace(key, ConfigEntry{value, line_no, false})
             .second) {
      throw DataError(path, line_no, "duplicate config key '" + key + "'");
    }
  }
  return config;
}

std::vector<std::string> SplitList(const std::string &value) {
  std::vector<std::string> items;
  for (const std::string &field : SplitFields(value, ',')) {
    std::string item = Trim(field);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

// What the stages have produced so far; the report is assembled from this.
struct PipelineState {
  std::optional<Transcripts> refs;
  std::vector<SystemOutput> systems;
  PosteriorScales scales;
  std::optional<Transcripts> combined;
  std::optional<double> scored_wer;
};

class StageRunner {
 public:
  StageRunner(Config *config, const PipelineOptions &opts,
              OutputStager *stager)
      : config_(config), opts_(opts), stager_(stager) {}

  void Run(const std::string &stage) {
    stage_ = stage;
    if (stage == "lexicon-build") {
      LexiconBuildStage();
    } else if (stage == "synth-ensemble") {
      SynthStage();
    } else if (stage == "mbr-combine") {
      CombineStage();
    } else if (stage == "score") {
      ScoreStage();
    } else if (stage == "cwer") {
      CwerStage();
    } else if (stage == "smooth") {
      SmoothStage();
    } else {
      throw DataError(config_->path, 0, "unknown stage '" + stage + "'");
    }
  }

  PipelineState &state() { return state_; }

 private:
  std::optional<std::string> Get(const std::string &key) {
    const ConfigEntry *entry = config_->Find(stage_ + "." + key);
    if (entry == nullptr) return std::nullopt;
    return entry->value;
  }

  std::string Require(const std::string &key) {
    std::optional<std::string> value = Get(key);
    if (!value.has_value()) {
      throw DataError(config_->path, 0,
                      "stage " + stage_ + ": missing parameter '" + stage_ +
                          "." + key + "'");
    }
    return *value;
  }

  long long GetInt(const std::string &key, long long fallback) {
    std::optional<std::string> value = Get(key);
    if (!value.has_value()) return fallback;
    long long parsed = 0;
    if (!ParseInt(*value, &parsed)) {
      throw DataError(config_->path, 0,
                      "stage " + stage_ + ": bad integer '" + *value +
                          "' for '" + key + "'");
    }
    return parsed;
  }

  double GetDouble(const std::string &key, double fallback) {
    std::optional<std::string> value = Get(key);
    if (!value.has_value()) return fallback;
    double parsed = 0.0;
    if (!ParseDouble(*value, &parsed)) {
      throw DataError(config_->path, 0,
                      "stage " + stage_ + ": bad number '" + *value +
                          "' for '" + key + "'");
    }
    return parsed;
  }

  bool GetBool(const std::string &key, bool fallback) {
    std::optional<std::string> value = Get(key);
    if (!value.has_value()) return fallback;
    if (*value == "true") return true;
    if (*value == "false") return false;
    throw DataError(config_->path, 0,
                    "stage " + stage_ + ": expected true or false for '" +
                        key + "'");
  }

  Transcripts ReadTranscripts(const std::string &path) {
    return ParseTranscripts(stager_->Read(path), path);
  }

  void LexiconBuildStage() {
    std::string words_path = Require("words");
    LexiconBuild build =
        BuildLexicon(ParseWordList(stager_->Read(words_path)),
                     GetBool("attributes", true));
    stager_->Stage(Require("out"), RenderLexicon(build.entries));
    std::optional<std::string> rejects_path = Get("rejects");
    std::string rejects;
    for (const Rejection &r : build.rejections) {
      rejects += r.word + "\t" + r.reason + "\n";
    }
    if (rejects_path.has_value()) {
      stager_->Stage(*rejects_path, rejects);
    } else {
      for (const Rejection &r : build.rejections) {
        std::cerr << "lexicon-build: rejected '" << r.word << "': " << r.reason
                  << "\n";
      }
    }
  }

  void SynthStage() {
    state_.refs = ReadTranscripts(Require("ref"));
    SynthOptions synth;
    long long systems = GetInt("systems", 0);
    if (systems < 1) {
      throw DataError(config_->path, 0,
                      "stage synth-ensemble: 'systems' must be >= 1");
    }
    synth.num_systems = static_cast<int>(systems);
    synth.target_wer = GetDouble("target-wer", 0.0);
    synth.seed = opts_.seed;
    state_.systems = SynthEnsemble(*state_.refs, synth);
    std::optional<std::string> prefix = Get("out-prefix");
    if (prefix.has_value()) {
      for (std::size_t i = 0; i < state_.systems.size(); ++i) {
        stager_->Stage(*prefix + std::to_string(i + 1) + ".nbest",
                       RenderNbest(state_.systems[i]));
      }
    }
  }

  void CombineStage() {
    std::optional<std::string> nbest = Get("nbest");
    if (nbest.has_value()) {
      state_.systems.clear();
      for (const std::string &path : SplitList(*nbest)) {
        state_.systems.push_back(ParseNbest(stager_->Read(path), path));
      }
    }
    if (state_.systems.empty()) {
      throw DataError(config_->path, 0,
                      "stage mbr-combine: no N-best inputs (run "
                      "synth-ensemble first or set 'mbr-combine.nbest')");
    }
    CombinationWeights weights =
        CombinationWeights::Uniform(state_.systems.size());
    std::optional<std::string> lambdas = Get("lambdas");
    if (lambdas.has_value()) {
      std::vector<double> raw;
      for (const std::string &item : SplitList(*lambdas)) {
        double v = 0.0;
        if (!ParseDouble(item, &v)) {
          throw DataError(config_->path, 0,
                          "stage mbr-combine: bad lambda '" + item + "'");
        }
        raw.push_back(v);
      }
      weights = CombinationWeights::Normalized(raw);
    }
    CombineOptions combine;
    combine.scales.lm_scale = GetDouble("lm-scale", 1.0);
    combine.scales.posterior_scale = GetDouble("post-scale", 1.0);
    combine.intersect = GetBool("intersect", false);
    combine.threads = opts_.threads;
    state_.scales = combine.scales;
    std::map<std::string, MbrResult> results =
        CombineCorpus(state_.systems, weights, combine);
    state_.combined = CombinedTranscripts(results);
    std::optional<std::string> out = Get("out");
    if (out.has_value()) {
      stager_->Stage(*out, RenderTranscripts(*state_.combined));
    }
    std::optional<std::string> risks = Get("risks");
    if (risks.has_value()) {
      stager_->Stage(*risks, RenderRisks(results));
    }
  }

  void ScoreStage() {
    std::optional<std::string> hyp_path = Get("hyp");
    std::optional<std::string> ref_path = Get("ref");
    if (ref_path.has_value()) {
      Transcripts refs = ReadTranscripts(*ref_path);
      if (!state_.refs.has_value()) state_.refs = refs;
      ScoreAgainst(hyp_path, refs);
    } else {
      if (!state_.refs.has_value()) {
        throw DataError(config_->path, 0,
                        "stage score: no references (set 'score.ref' or run "
                        "synth-ensemble first)");
      }
      ScoreAgainst(hyp_path, *state_.refs);
    }
  }

  void ScoreAgainst(const std::optional<std::string> &hyp_path,
                    const Transcripts &refs) {
    WerOptions wer;
    wer.threads = opts_.threads;
    WerReport report;
    if (hyp_path.has_value()) {
      report = ScoreWer(ReadTranscripts(*hyp_path), refs, wer);
    } else {
      if (!state_.combined.has_value()) {
        throw DataError(config_->path, 0,
                        "stage score: no hypotheses (set 'score.hyp' or run "
                        "mbr-combine first)");
      }
      report = ScoreWer(*state_.combined, refs, wer);
    }
    state_.scored_wer = report.Wer();
    std::optional<std::string> out = Get("out");
    if (out.has_value()) {
      stager_->Stage(*out, report.MachineLine() + "\n");
    }
  }

  void CwerStage() {
    std::vector<Transcripts> one_bests;
    std::optional<std::string> hyp = Get("hyp");
    if (hyp.has_value()) {
      for (const std::string &path : SplitList(*hyp)) {
        one_bests.push_back(ReadTranscripts(path));
      }
    } else {
      for (const SystemOutput &system : state_.systems) {
        one_bests.push_back(OneBest(system, state_.scales));
      }
    }
    double cwer = CrossWer(one_bests);
    std::optional<std::string> out = Get("out");
    if (out.has_value()) {
      stager_->Stage(*out, StringPrintf("CWER=%.1f\nCWER_FULL=%s\n", cwer,
                                        FormatFull(cwer).c_str()));
    }
  }

  void SmoothStage() {
    std::vector<ParamBundle> models;
    for (const std::string &path : SplitList(Require("bundles"))) {
      models.push_back(ParseBundle(stager_->Read(path), path));
    }
    std::string data_path = Require("data");
    Dataset data = ParseDataset(stager_->Read(data_path), data_path);
    EstimateOptions estimate;
    estimate.max_iters = static_cast<int>(
        GetInt("max-iters", estimate.max_iters));
    estimate.tol = GetDouble("tol", estimate.tol);
    EstimateResult result =
        EstimateWeights(models, BuiltinEvaluator(data), estimate);
    stager_->Stage(Require("out"),
                   RenderBundle(Interpolate(models, result.weights)));
    std::optional<std::string> weights_out = Get("weights-out");
    if (weights_out.has_value()) {
      stager_->Stage(*weights_out, RenderWeights(result.weights));
    }
  }

  Config *config_;
  const PipelineOptions &opts_;
  OutputStager *stager_;
  std::string stage_;
  PipelineState state_;
};

std::string Cell(double value) { return StringPrintf("%.4f", value); }

std::string BuildReport(PipelineState &state, int threads) {
  std::string report = "row\tid\twer\tmu\tsigma\tcwer\trel_vs_best\n";
  int row = 1;
  std::vector<double> wers;
  if (state.refs.has_value() && !state.systems.empty()) {
    std::vector<Transcripts> one_bests;
    one_bests.reserve(state.systems.size());
    for (const SystemOutput &system : state.systems) {
      one_bests.push_back(OneBest(system, state.scales));
    }
    if (one_bests.size() >= 2) {
      EnsembleStatsOptions stats_opts;
      stats_opts.threads = threads;
      EnsembleStats stats =
          ComputeEnsembleStats(one_bests, *state.refs, stats_opts);
      wers = stats.wers;
      for (std::size_t i = 0; i < stats.wers.size(); ++i) {
        report += StringPrintf("%d\t%s\t%s\t-\t-\t-\t-\n", row++,
                               state.systems[i].system_id.c_str(),
                               Cell(stats.wers[i]).c_str());
      }
      report += StringPrintf("%d\tensemble\t-\t%s\t%s\t%s\t-\n", row++,
                             Cell(stats.mean).c_str(),
                             Cell(stats.stddev).c_str(),
                             Cell(stats.cwer).c_str());
    } else {
      WerOptions wer_opts;
      wer_opts.threads = threads;
      wers.push_back(ScoreWer(one_bests[0], *state.refs, wer_opts).Wer());
      report += StringPrintf("%d\t%s\t%s\t-\t-\t-\t-\n", row++,
                             state.systems[0].system_id.c_str(),
                             Cell(wers[0]).c_str());
    }
  }
  if (state.scored_wer.has_value()) {
    std::string rel = "-";
    if (!wers.empty()) {
      double best = *std::min_element(wers.begin(), wers.end());
      // A perfect baseline leaves the relative change undefined.
      if (best > 0.0) rel = Cell(RelativeChange(best, *state.scored_wer));
    }
    report += StringPrintf("%d\tcombined\t%s\t-\t-\t-\t%s\n", row++,
                           Cell(*state.scored_wer).c_str(), rel.c_str());
  }
  return report;
}

}  // namespace

std::string RunPipeline(const std::string &config_text,
                        const std::string &config_path,
                        const PipelineOptions &opts, OutputStager *stager) {
  Config config = ParseConfig(config_text, config_path);

  const ConfigEntry *stages_entry = config.Find("stages");
  if (stages_entry == nullptr) {
    throw DataError(config_path, 0, "missing 'stages' key");
  }
  std::vector<std::string> stages = SplitList(stages_entry->value);
  if (stages.empty()) {
    throw DataError(config_path, stages_entry->line, "empty stage list");
  }
  static const std::set<std::string> kKnown = {
      "lexicon-build", "synth-ensemble", "mbr-combine",
      "score",         "cwer",           "smooth"};
  std::set<std::string> seen;
  for (const std::string &stage : stages) {
    if (!kKnown.count(stage)) {
      throw DataError(config_path, stages_entry->line,
                      "unknown stage '" + stage + "'");
    }
    if (!seen.insert(stage).second) {
      throw DataError(config_path, stages_entry->line,
                      "duplicate stage '" + stage + "'");
    }
  }

  PipelineOptions effective = opts;
  const ConfigEntry *seed_entry = config.Find("seed");
  if (seed_entry != nullptr && !opts.seed_overridden) {
    long long seed = 0;
    if (!ParseInt(seed_entry->value, &seed) || seed < 0) {
      throw DataError(config_path, seed_entry->line,
                      "bad seed '" + seed_entry->value + "'");
    }
    effective.seed = static_cast<std::uint64_t>(seed);
  }
  const ConfigEntry *report_entry = config.Find("report");

  // Reject typo'd keys before running anything.
  static const std::map<std::string, std::set<std::string>> kParams = {
      {"lexicon-build", {"words", "out", "rejects", "attributes"}},
      {"synth-ensemble", {"ref", "systems", "target-wer", "out-prefix"}},
      {"mbr-combine",
       {"nbest", "lambdas", "lm-scale", "post-scale", "intersect", "out",
        "risks"}},
      {"score", {"hyp", "ref", "out"}},
      {"cwer", {"hyp", "out"}},
      {"smooth", {"bundles", "data", "out", "weights-out", "max-iters", "tol"}},
  };
  for (const auto &[key, entry] : config.entries) {
    if (entry.used) continue;
    std::size_t dot = key.find('.');
    bool known = false;
    if (dot != std::string::npos) {
      std::string stage = key.substr(0, dot);
      known = seen.count(stage) &&
              kParams.at(stage).count(key.substr(dot + 1));
    }
    if (!known) {
      throw DataError(config_path, entry.line,
                      "unknown config key '" + key + "'");
    }
  }

  StageRunner runner(&config, effective, stager);
  for (const std::string &stage : stages) {
    try {
      runner.Run(stage);
    } catch (const DataError &e) {
      throw DataError("stage " + stage + ": " + e.what());
    } catch (const std::invalid_argument &e) {
      throw std::invalid_argument("stage " + stage + ": " + e.what());
    }
  }

  std::string report = BuildReport(runner.state(), effective.threads);
  if (report_entry != nullptr) {
    stager->Stage(report_entry->value, report);
    return "";
  }
  return report;
}

}  // namespace combkit
