// combkit/tools/combkit_main.cc
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
//
// Single combkit executable. Subcommands cover lexicon building, WER/cWER
// scoring, N-best MBR decoding and combination, ensemble statistics and
// synthesis, checkpoint smoothing, receptive fields, and a pipeline runner.
// Exit codes: 0 success, 1 usage error, 2 data error. File outputs are
// staged in memory and written only on success, so a nonzero exit never
// leaves files behind.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "combkit/align.h"
#include "combkit/diversity.h"
#include "combkit/error.h"
#include "combkit/grapheme_lexicon.h"
#include "combkit/mbr.h"
#include "combkit/nbest.h"
#include "combkit/smoothing.h"
#include "combkit/text_io.h"
#include "pipeline.h"
#include "stager.h"

namespace {

using combkit::DataError;
using combkit::FormatFull;
using combkit::OutputStager;
using combkit::ParseDouble;
using combkit::ParseInt;
using combkit::ReadFileText;
using combkit::SplitFields;
using combkit::SplitLines;
using combkit::StringPrintf;

std::vector<double> ParseLambdaList(const std::string &value) {
  std::vector<double> lambdas;
  for (const std::string &item : SplitFields(value, ',')) {
    double v = 0.0;
    if (!ParseDouble(item, &v)) {
      throw std::invalid_argument("bad lambda '" + item + "'");
    }
    lambdas.push_back(v);
  }
  return lambdas;
}

std::vector<int> ParseCheckpointFile(const std::string &path) {
  std::vector<int> available;
  std::vector<std::string> lines = SplitLines(ReadFileText(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (const std::string &token : SplitFields(lines[i], ' ')) {
      if (token.empty()) continue;
      long long value = 0;
      if (!ParseInt(token, &value)) {
        throw DataError(path, static_cast<int>(i) + 1,
                        "bad checkpoint index '" + token + "'");
      }
      available.push_back(static_cast<int>(value));
    }
  }
  if (available.empty()) {
    throw DataError(path, 0, "no checkpoint indices");
  }
  return available;
}

combkit::Transcripts ReadTranscriptsFile(const std::string &path) {
  return combkit::ParseTranscripts(ReadFileText(path), path);
}

}  // namespace

int main(int argc, char **argv) {
  OutputStager stager;
  std::string out_text;  // printed only after a fully successful run
  int threads = 1;

  CLI::App app{"Speech system combination toolkit", "combkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("combkit 0.1.0"));
  app.add_option("--threads", threads,
                 "Worker threads for per-utterance loops")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  // glex: graphemic lexicon tools.
  CLI::App *glex = app.add_subcommand("glex", "Graphemic lexicon tools");
  glex->require_subcommand(1);
  glex->fallthrough();

  struct {
    std::string words, out, rejects;
    bool no_attributes = false;
  } glex_build_args;
  CLI::App *glex_build =
      glex->add_subcommand("build", "Build a graphemic lexicon from a word list");
  glex_build->fallthrough();
  glex_build->add_option("--words", glex_build_args.words, "Word list file")
      ->required();
  glex_build->add_option("--out", glex_build_args.out,
                         "Lexicon output file (default stdout)");
  glex_build->add_option("--rejects", glex_build_args.rejects,
                         "Rejected-words output file (default stderr)");
  glex_build->add_flag("--no-attributes", glex_build_args.no_attributes,
                       "Do not mark DA/DB attributes");
  glex_build->callback([&]() {
    combkit::LexiconBuild build = combkit::BuildLexicon(
        combkit::ParseWordList(ReadFileText(glex_build_args.words)),
        !glex_build_args.no_attributes);
    std::string lexicon = combkit::RenderLexicon(build.entries);
    if (glex_build_args.out.empty()) {
      out_text += lexicon;
    } else {
      stager.Stage(glex_build_args.out, lexicon);
    }
    if (!glex_build_args.rejects.empty()) {
      std::string rejects;
      for (const combkit::Rejection &r : build.rejections) {
        rejects += r.word + "\t" + r.reason + "\n";
      }
      stager.Stage(glex_build_args.rejects, rejects);
    } else {
      for (const combkit::Rejection &r : build.rejections) {
        std::cerr << "rejected '" << r.word << "': " << r.reason << "\n";
      }
    }
  });

  struct {
    std::string lexicon, context = "mono", out;
  } glex_units_args;
  CLI::App *glex_units =
      glex->add_subcommand("units", "List the acoustic unit inventory");
  glex_units->fallthrough();
  glex_units->add_option("--lexicon", glex_units_args.lexicon, "Lexicon file")
      ->required();
  glex_units->add_option("--context", glex_units_args.context,
                         "Context mode: mono or left-bi")
      ->check(CLI::IsMember({"mono", "left-bi"}));
  glex_units->add_option("--out", glex_units_args.out,
                         "Inventory output file (default stdout)");
  glex_units->callback([&]() {
    std::vector<combkit::LexiconEntry> entries = combkit::ParseLexicon(
        ReadFileText(glex_units_args.lexicon), glex_units_args.lexicon);
    if (entries.empty()) {
      throw DataError(glex_units_args.lexicon, 0, "no entries");
    }
    combkit::UnitInventory inventory = combkit::ContextUnits(
        entries, glex_units_args.context == "mono"
                     ? combkit::ContextMode::kMono
                     : combkit::ContextMode::kLeftBi);
    if (glex_units_args.out.empty()) {
      out_text += inventory.Render();
    } else {
      stager.Stage(glex_units_args.out, inventory.Render());
    }
  });

  // score: WER of a hypothesis file against references.
  struct {
    std::string hyp, ref;
    bool detail = false;
    bool missing_as_empty = false;
  } score_args;
  CLI::App *score =
      app.add_subcommand("score", "Score hypotheses against references");
  score->fallthrough();
  score->add_option("--hyp", score_args.hyp, "Hypothesis transcript file")
      ->required();
  score->add_option("--ref", score_args.ref, "Reference transcript file")
      ->required();
  score->add_flag("--detail", score_args.detail,
                  "Print the per-utterance report");
  score->add_flag("--missing-as-empty", score_args.missing_as_empty,
                  "Treat a missing hypothesis as an empty one");
  score->callback([&]() {
    combkit::WerOptions opts;
    opts.missing_hyp_as_empty = score_args.missing_as_empty;
    opts.threads = threads;
    combkit::WerReport report =
        combkit::ScoreWer(ReadTranscriptsFile(score_args.hyp),
                          ReadTranscriptsFile(score_args.ref), opts);
    out_text +=
        score_args.detail ? report.DetailedReport() : report.MachineLine() + "\n";
  });

  // mbr: decode and combine.
  CLI::App *mbr = app.add_subcommand("mbr", "Minimum Bayes risk decoding");
  mbr->require_subcommand(1);
  mbr->fallthrough();

  struct {
    std::string nbest, out, risks;
    double lm_scale = 1.0, post_scale = 1.0;
  } decode_args;
  CLI::App *mbr_decode =
      mbr->add_subcommand("decode", "Single-system MBR decode of an N-best file");
  mbr_decode->fallthrough();
  mbr_decode->add_option("--nbest", decode_args.nbest, "N-best file")
      ->required();
  mbr_decode->add_option("--lm-scale", decode_args.lm_scale,
                         "LM scale gamma (>= 0)")
      ->check(CLI::NonNegativeNumber);
  mbr_decode->add_option("--post-scale", decode_args.post_scale,
                         "Posterior scale beta (> 0)")
      ->check(CLI::PositiveNumber);
  mbr_decode->add_option("--out", decode_args.out, "1-best output file")
      ->required();
  mbr_decode->add_option("--risks", decode_args.risks,
                         "Per-candidate risk dump file");
  mbr_decode->callback([&]() {
    combkit::SystemOutput system =
        combkit::ParseNbest(ReadFileText(decode_args.nbest), decode_args.nbest);
    combkit::PosteriorScales scales{decode_args.lm_scale,
                                    decode_args.post_scale};
    std::map<std::string, combkit::MbrResult> results;
    for (const auto &[utt, list] : system.lists) {
      results.emplace(
          utt, combkit::MbrDecode(combkit::ComputePosteriors(list, scales),
                                  nullptr, utt));
    }
    stager.Stage(decode_args.out,
                 combkit::RenderTranscripts(combkit::CombinedTranscripts(results)));
    if (!decode_args.risks.empty()) {
      stager.Stage(decode_args.risks, combkit::RenderRisks(results));
    }
  });

  struct {
    std::vector<std::string> nbest;
    std::string lambdas, out, risks;
    double lm_scale = 1.0, post_scale = 1.0;
    bool intersect = false;
  } combine_args;
  CLI::App *mbr_combine =
      mbr->add_subcommand("combine", "Multi-system MBR combination");
  mbr_combine->fallthrough();
  mbr_combine->add_option("--nbest", combine_args.nbest,
                          "N-best file, one per system (repeatable)")
      ->required();
  mbr_combine->add_option("--lambdas", combine_args.lambdas,
                          "Comma-separated system weights (default uniform)");
  mbr_combine->add_option("--lm-scale", combine_args.lm_scale,
                          "LM scale gamma (>= 0)")
      ->check(CLI::NonNegativeNumber);
  mbr_combine->add_option("--post-scale", combine_args.post_scale,
                          "Posterior scale beta (> 0)")
      ->check(CLI::PositiveNumber);
  mbr_combine->add_flag("--intersect", combine_args.intersect,
                        "Combine over the utterance intersection");
  mbr_combine->add_option("--out", combine_args.out, "1-best output file")
      ->required();
  mbr_combine->add_option("--risks", combine_args.risks,
                          "Per-candidate risk dump file");
  mbr_combine->callback([&]() {
    std::vector<combkit::SystemOutput> systems;
    systems.reserve(combine_args.nbest.size());
    for (const std::string &path : combine_args.nbest) {
      systems.push_back(combkit::ParseNbest(ReadFileText(path), path));
    }
    combkit::CombinationWeights weights =
        combine_args.lambdas.empty()
            ? combkit::CombinationWeights::Uniform(systems.size())
            : combkit::CombinationWeights::Normalized(
                  ParseLambdaList(combine_args.lambdas));
    combkit::CombineOptions opts;
    opts.scales = combkit::PosteriorScales{combine_args.lm_scale,
                                           combine_args.post_scale};
    opts.intersect = combine_args.intersect;
    opts.threads = threads;
    std::map<std::string, combkit::MbrResult> results =
        combkit::CombineCorpus(systems, weights, opts);
    stager.Stage(combine_args.out,
                 combkit::RenderTranscripts(combkit::CombinedTranscripts(results)));
    if (!combine_args.risks.empty()) {
      stager.Stage(combine_args.risks, combkit::RenderRisks(results));
    }
  });

  // cwer: cross WER between system 1-bests.
  struct {
    std::vector<std::string> hyp;
    std::string out;
  } cwer_args;
  CLI::App *cwer = app.add_subcommand("cwer", "Cross WER between systems");
  cwer->fallthrough();
  cwer->add_option("--hyp", cwer_args.hyp,
                   "1-best transcript file, one per system (repeatable)")
      ->required();
  cwer->add_option("--out", cwer_args.out, "Output file (default stdout)");
  cwer->callback([&]() {
    if (cwer_args.hyp.size() < 2) {
      throw std::invalid_argument("cwer requires at least 2 --hyp files");
    }
    std::vector<combkit::Transcripts> systems;
    systems.reserve(cwer_args.hyp.size());
    for (const std::string &path : cwer_args.hyp) {
      systems.push_back(ReadTranscriptsFile(path));
    }
    double value = combkit::CrossWer(systems);
    std::string text = StringPrintf("CWER=%.1f\nCWER_FULL=%s\n", value,
                                    FormatFull(value).c_str());
    if (cwer_args.out.empty()) {
      out_text += text;
    } else {
      stager.Stage(cwer_args.out, text);
    }
  });

  // stats: ensemble WER statistics.
  struct {
    std::vector<std::string> hyp;
    std::string ref, out;
    bool sample = false;
  } stats_args;
  CLI::App *stats = app.add_subcommand("stats", "Ensemble WER statistics");
  stats->fallthrough();
  stats->add_option("--hyp", stats_args.hyp,
                    "1-best transcript file, one per system (repeatable)")
      ->required();
  stats->add_option("--ref", stats_args.ref, "Reference transcript file")
      ->required();
  stats->add_flag("--sample", stats_args.sample,
                  "Sample instead of population standard deviation");
  stats->add_option("--out", stats_args.out, "Output file (default stdout)");
  stats->callback([&]() {
    if (stats_args.hyp.size() < 2) {
      throw std::invalid_argument("stats requires at least 2 --hyp files");
    }
    std::vector<combkit::Transcripts> systems;
    systems.reserve(stats_args.hyp.size());
    for (const std::string &path : stats_args.hyp) {
      systems.push_back(ReadTranscriptsFile(path));
    }
    combkit::EnsembleStatsOptions opts;
    opts.sample_stddev = stats_args.sample;
    opts.threads = threads;
    combkit::EnsembleStats result = combkit::ComputeEnsembleStats(
        systems, ReadTranscriptsFile(stats_args.ref), opts);
    std::string text = StringPrintf("SYSTEMS=%zu\n", result.wers.size());
    for (std::size_t i = 0; i < result.wers.size(); ++i) {
      text += StringPrintf("WER%zu=%.6f\n", i + 1, result.wers[i]);
    }
    text += StringPrintf("MU=%.6f\n", result.mean);
    text += StringPrintf("SIGMA=%.6f\n", result.stddev);
    text += StringPrintf("CWER=%.6f\n", result.cwer);
    if (stats_args.out.empty()) {
      out_text += text;
    } else {
      stager.Stage(stats_args.out, text);
    }
  });

  // smooth: estimate per-layer weights and write the interpolated bundle.
  struct {
    std::vector<std::string> bundle;
    std::string data, out, weights_out;
    int max_iters = 200;
    double tol = 1e-8;
  } smooth_args;
  CLI::App *smooth =
      app.add_subcommand("smooth", "Layer-wise checkpoint smoothing");
  smooth->fallthrough();
  smooth->add_option("--bundle", smooth_args.bundle,
                     "Parameter bundle file, one per model (repeatable)")
      ->required();
  smooth->add_option("--data", smooth_args.data,
                     "Validation dataset for the builtin evaluator")
      ->required();
  smooth->add_option("--out", smooth_args.out, "Smoothed bundle output file")
      ->required();
  smooth->add_option("--weights-out", smooth_args.weights_out,
                     "Estimated weights output file");
  smooth->add_option("--max-iters", smooth_args.max_iters,
                     "Optimizer iteration cap")
      ->check(CLI::PositiveNumber);
  smooth->add_option("--tol", smooth_args.tol,
                     "Stop when the loss improves by less")
      ->check(CLI::PositiveNumber);
  smooth->callback([&]() {
    std::vector<combkit::ParamBundle> models;
    models.reserve(smooth_args.bundle.size());
    for (const std::string &path : smooth_args.bundle) {
      models.push_back(combkit::ParseBundle(ReadFileText(path), path));
    }
    combkit::Dataset data =
        combkit::ParseDataset(ReadFileText(smooth_args.data), smooth_args.data);
    combkit::EstimateOptions opts;
    opts.max_iters = smooth_args.max_iters;
    opts.tol = smooth_args.tol;
    combkit::EstimateResult result = combkit::EstimateWeights(
        models, combkit::BuiltinEvaluator(data), opts);
    stager.Stage(smooth_args.out,
                 combkit::RenderBundle(combkit::Interpolate(models, result.weights)));
    if (!smooth_args.weights_out.empty()) {
      stager.Stage(smooth_args.weights_out, combkit::RenderWeights(result.weights));
    }
    out_text += "LOSS=" + FormatFull(result.loss) + "\n";
  });

  // checkpoints: walk back from the last iteration at a fixed interval.
  struct {
    std::string available, out;
    int count = 0, interval = 0;
  } ckpt_args;
  CLI::App *checkpoints =
      app.add_subcommand("checkpoints", "Select smoothing checkpoints");
  checkpoints->fallthrough();
  checkpoints->add_option("--available", ckpt_args.available,
                          "File of available iteration indices")
      ->required();
  checkpoints->add_option("--count", ckpt_args.count, "Number of checkpoints")
      ->required()
      ->check(CLI::PositiveNumber);
  checkpoints->add_option("--interval", ckpt_args.interval,
                          "Iteration interval between checkpoints")
      ->required()
      ->check(CLI::PositiveNumber);
  checkpoints->add_option("--out", ckpt_args.out, "Output file (default stdout)");
  checkpoints->callback([&]() {
    std::vector<int> selected = combkit::SelectCheckpoints(
        ParseCheckpointFile(ckpt_args.available), ckpt_args.count,
        ckpt_args.interval);
    std::string text;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      if (i > 0) text += ' ';
      text += std::to_string(selected[i]);
    }
    text += '\n';
    if (ckpt_args.out.empty()) {
      out_text += text;
    } else {
      stager.Stage(ckpt_args.out, text);
    }
  });

  // rfield: receptive field of a layer stack.
  struct {
    std::string layers, out;
  } rfield_args;
  CLI::App *rfield =
      app.add_subcommand("rfield", "Receptive field of a layer stack");
  rfield->fallthrough();
  rfield->add_option("--layers", rfield_args.layers, "Layers file")->required();
  rfield->add_option("--out", rfield_args.out, "Output file (default stdout)");
  rfield->callback([&]() {
    combkit::ReceptiveField field =
        combkit::ComputeReceptiveField(combkit::ParseLayersFile(
            ReadFileText(rfield_args.layers), rfield_args.layers));
    std::string text = StringPrintf("LEFT=%d RIGHT=%d\n", field.left, field.right);
    if (rfield_args.out.empty()) {
      out_text += text;
    } else {
      stager.Stage(rfield_args.out, text);
    }
  });

  // synth: deterministic synthetic ensemble.
  struct {
    std::string ref, out_prefix;
    int systems = 1;
    double target_wer = 0.0;
    std::uint64_t seed = 0;
  } synth_args;
  CLI::App *synth =
      app.add_subcommand("synth", "Generate a synthetic random ensemble");
  synth->fallthrough();
  synth->add_option("--ref", synth_args.ref, "Reference transcript file")
      ->required();
  synth->add_option("--systems", synth_args.systems, "Number of systems")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--target-wer", synth_args.target_wer,
                    "Per-system corruption rate in percent")
      ->required()
      ->check(CLI::Range(0.0, 50.0));
  synth->add_option("--seed", synth_args.seed, "Random seed");
  synth->add_option("--out-prefix", synth_args.out_prefix,
                    "N-best files are written as <prefix><i>.nbest")
      ->required();
  synth->callback([&]() {
    combkit::SynthOptions opts;
    opts.num_systems = synth_args.systems;
    opts.target_wer = synth_args.target_wer;
    opts.seed = synth_args.seed;
    std::vector<combkit::SystemOutput> systems =
        combkit::SynthEnsemble(ReadTranscriptsFile(synth_args.ref), opts);
    for (std::size_t i = 0; i < systems.size(); ++i) {
      stager.Stage(synth_args.out_prefix + std::to_string(i + 1) + ".nbest",
                   combkit::RenderNbest(systems[i]));
    }
  });

  // pipeline: staged end-to-end runs from a config file.
  struct {
    std::string config;
    std::uint64_t seed = 0;
  } pipeline_args;
  CLI::App *pipeline =
      app.add_subcommand("pipeline", "Run a staged pipeline from a config");
  pipeline->fallthrough();
  pipeline->add_option("--config", pipeline_args.config, "Pipeline config file")
      ->required();
  CLI::Option *pipeline_seed =
      pipeline->add_option("--seed", pipeline_args.seed,
                           "Random seed (overrides the config seed)");
  pipeline->callback([&]() {
    combkit::PipelineOptions opts;
    opts.seed = pipeline_args.seed;
    opts.seed_overridden = pipeline_seed->count() > 0;
    opts.threads = threads;
    out_text += combkit::RunPipeline(ReadFileText(pipeline_args.config),
                                     pipeline_args.config, opts, &stager);
  });

  try {
    app.parse(argc, argv);
    stager.Flush();
    std::cout << out_text;
    return 0;
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
