// combkit/tests/acceptance.cc
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
// Release gate. Each criterion is an independent end-to-end check of a
// numeric or behavioral contract the toolkit must honor before it ships.
// Runs every criterion by default, or a single one with --criterion N.
// Each executed criterion prints exactly one PASS/FAIL line; the process
// exits nonzero if any executed criterion failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "combkit/align.h"
#include "combkit/diversity.h"
#include "combkit/mbr.h"
#include "combkit/nbest.h"
#include "combkit/rng.h"
#include "combkit/smoothing.h"
#include "combkit/text_io.h"
#include "oracles.h"
#include "subprocess.h"

namespace {

using combkit::BuiltinEvaluator;
using combkit::CombinationWeights;
using combkit::CombineCorpus;
using combkit::CombinedTranscripts;
using combkit::ComputePosteriors;
using combkit::ComputeReceptiveField;
using combkit::CrossWer;
using combkit::Dataset;
using combkit::EstimateResult;
using combkit::EstimateWeights;
using combkit::Hypothesis;
using combkit::Levenshtein;
using combkit::LossFn;
using combkit::MbrCombine;
using combkit::MbrResult;
using combkit::NBestList;
using combkit::ParamBundle;
using combkit::ParseLayersFile;
using combkit::PosteriorDistribution;
using combkit::PosteriorScales;
using combkit::ReceptiveField;
using combkit::RelativeChange;
using combkit::Rng;
using combkit::ScoreWer;
using combkit::SelectCheckpoints;
using combkit::StringPrintf;
using combkit::SynthEnsemble;
using combkit::SynthOptions;
using combkit::SystemOutput;
using combkit::Transcripts;
using combkit::WordSequence;
using combkit::testing::ReadFile;
using combkit::testing::Run;
using combkit::testing::RunResult;
using combkit::testing::TempDir;
using combkit::testing::WriteFile;

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool Near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// ---------------------------------------------------------------------------
// Criterion 1: the documented lexicon excerpt is reproduced byte for byte by
// `glex build` on the four words it shows.
// ---------------------------------------------------------------------------

Outcome Criterion1() {
  TempDir tmp;
  WriteFile(tmp.File("words.txt"), "B.B.C.'s\ninformation\nmoon\nthe\n");
  RunResult r = Run({"glex", "build", "--words", tmp.File("words.txt")});
  const std::string expected =
      "B.B.C.'s\tb;DB b;DB c;DADB s\n"
      "information\ti n f o r m a t i o n\n"
      "moon\tm o o n\n"
      "the\tt h e\n";
  if (r.exit_code != 0) {
    return {false, StringPrintf("glex build exited with %d", r.exit_code)};
  }
  if (r.out != expected) {
    return {false, "lexicon excerpt differs from the documented four entries"};
  }
  return {true, "four-entry lexicon excerpt reproduced byte for byte"};
}

// ---------------------------------------------------------------------------
// Criterion 2: receptive fields of the two documented layer stacks. The
// seven-layer spliced stack must give exactly (15, 10); a single +-10 splice
// must give (10, 10). Checked through the library and the rfield subcommand.
// ---------------------------------------------------------------------------

Outcome Criterion2() {
  const std::string stack_a =
      "splice -1,0,1\n"
      "splice -1,0,1\n"
      "splice -1,0,1,2\n"
      "splice -3,0,3\n"
      "splice -3,0,3\n"
      "splice -6,-3,0\n"
      "splice 0\n";
  const std::string stack_b = "splice -10,0,10\n";

  ReceptiveField field =
      ComputeReceptiveField(ParseLayersFile(stack_a, "stack_a"));
  if (field.left != 15 || field.right != 10) {
    return {false, StringPrintf("seven-layer stack computed (%d, %d), want (15, 10)",
                                field.left, field.right)};
  }

  TempDir tmp;
  WriteFile(tmp.File("a.layers"), stack_a);
  WriteFile(tmp.File("b.layers"), stack_b);
  RunResult ra = Run({"rfield", "--layers", tmp.File("a.layers")});
  RunResult rb = Run({"rfield", "--layers", tmp.File("b.layers")});
  if (ra.exit_code != 0 || ra.out != "LEFT=15 RIGHT=10\n") {
    return {false, "rfield on the seven-layer stack did not print LEFT=15 RIGHT=10"};
  }
  if (rb.exit_code != 0 || rb.out != "LEFT=10 RIGHT=10\n") {
    return {false, "rfield on the single +-10 splice did not print LEFT=10 RIGHT=10"};
  }
  return {true, "layer stacks yield (15, 10) and (10, 10) exactly"};
}

// ---------------------------------------------------------------------------
// Criterion 3: RelativeChange on the pinned WER pairs reproduces the
// reference one-decimal percentages within +-0.05 after rounding. Each pair
// prints its own detail line; the criterion fails if any pair misses.
// ---------------------------------------------------------------------------

Outcome Criterion3() {
  struct RelCase {
    double baseline;
    double other;
    double expected;  // one-decimal percentage
  };
  const RelCase cases[] = {
      {27.8, 30.7, 10.4}, {27.8, 26.3, -5.4}, {24.4, 26.9, 10.3},
      {24.4, 23.0, -5.7}, {25.0, 26.7, 6.8},  {25.0, 23.2, -7.2},
      {23.4, 25.0, 6.8},  {23.4, 21.7, -7.3}, {23.4, 21.7, -7.3},
      {21.5, 20.3, -5.6},
  };
  int ok = 0;
  const int total = static_cast<int>(sizeof(cases) / sizeof(cases[0]));
  for (const RelCase &c : cases) {
    double computed = RelativeChange(c.baseline, c.other);
    double rounded = std::round(computed * 10.0) / 10.0;
    bool hit = std::fabs(rounded - c.expected) <= 0.05 + 1e-9;
    if (hit) ++ok;
    std::printf("  %.1f -> %.1f: computed %+.4f rounds to %+.1f, want %+.1f%s\n",
                c.baseline, c.other, computed, rounded, c.expected,
                hit ? "" : "  MISMATCH");
  }
  if (ok != total) {
    return {false, StringPrintf("%d/%d pairs reproduce; the remaining pair "
                                "rounds to a different decimal",
                                ok, total)};
  }
  return {true, StringPrintf("all %d relative changes reproduce to +-0.05", total)};
}

// ---------------------------------------------------------------------------
// Criterion 4: MbrCombine agrees exactly (chosen words and risk value) with
// exhaustive enumeration of the weighted expected-distance objective on at
// least 200 random small instances.
// ---------------------------------------------------------------------------

Outcome Criterion4() {
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  const double gammas[] = {0.0, 0.5, 1.0};
  const double betas[] = {0.5, 1.0, 2.0};
  Rng rng(20260825);
  const int instances = 250;
  int mismatches = 0;
  for (int t = 0; t < instances; ++t) {
    PosteriorScales scales;
    scales.lm_scale = gammas[rng.Bounded(3)];
    scales.posterior_scale = betas[rng.Bounded(3)];
    std::size_t num_systems = 1 + rng.Bounded(3);
    std::vector<PosteriorDistribution> dists;
    std::vector<double> raw;
    for (std::size_t m = 0; m < num_systems; ++m) {
      NBestList list;
      list.utterance_id = "u";
      std::size_t num_hyps = 1 + rng.Bounded(6);
      for (std::size_t h = 0; h < num_hyps; ++h) {
        Hypothesis hyp;
        std::size_t len = rng.Bounded(5);  // 0..4, empty allowed
        for (std::size_t k = 0; k < len; ++k) {
          hyp.words.push_back(vocab[rng.Bounded(vocab.size())]);
        }
        hyp.acoustic_score = -3.0 + 6.0 * rng.Uniform();
        hyp.lm_score = -2.0 + 4.0 * rng.Uniform();
        list.hypotheses.push_back(hyp);
      }
      dists.push_back(ComputePosteriors(list, scales));
      raw.push_back(0.1 + rng.Uniform());
    }
    CombinationWeights weights = CombinationWeights::Normalized(raw);
    MbrResult got = MbrCombine(dists, weights);
    combkit::oracles::ExhaustiveMbrResult want =
        combkit::oracles::ExhaustiveMbr(dists, weights.lambdas);
    if (got.chosen != want.chosen || got.risk != want.risk) ++mismatches;
  }
  if (mismatches != 0) {
    return {false, StringPrintf("%d of %d instances disagree with exhaustive "
                                "enumeration",
                                mismatches, instances)};
  }
  return {true, StringPrintf("%d random instances match exhaustive enumeration "
                             "exactly",
                             instances)};
}

// ---------------------------------------------------------------------------
// Criterion 5: the edit-distance DP agrees with the naive recursion on every
// ordered pair of sequences up to length 6 over a 3-symbol vocabulary.
// ---------------------------------------------------------------------------

Outcome Criterion5() {
  const std::vector<std::string> symbols = {"a", "b", "c"};
  std::vector<WordSequence> seqs;
  seqs.push_back({});
  std::size_t start = 0;
  for (int len = 1; len <= 6; ++len) {
    std::size_t end = seqs.size();
    for (std::size_t i = start; i < end; ++i) {
      for (const std::string &s : symbols) {
        WordSequence next = seqs[i];
        next.push_back(s);
        seqs.push_back(std::move(next));
      }
    }
    start = end;
  }
  // 1 + 3 + ... + 3^6 sequences.
  if (seqs.size() != 1093) {
    return {false, StringPrintf("enumerated %zu sequences, expected 1093",
                                seqs.size())};
  }
  long long checked = 0;
  // The naive recursion is symmetric in its arguments, so each unordered
  // pair is recursed once and both DP orientations are checked against it.
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    for (std::size_t j = i; j < seqs.size(); ++j) {
      int want = combkit::oracles::NaiveDistance(seqs[i], seqs[j]);
      if (Levenshtein(seqs[i], seqs[j]).distance != want) {
        return {false, StringPrintf("distance mismatch on pair (%s | %s)",
                                    combkit::JoinWords(seqs[i]).c_str(),
                                    combkit::JoinWords(seqs[j]).c_str())};
      }
      ++checked;
      if (j != i) {
        if (Levenshtein(seqs[j], seqs[i]).distance != want) {
          return {false, StringPrintf("distance mismatch on pair (%s | %s)",
                                      combkit::JoinWords(seqs[j]).c_str(),
                                      combkit::JoinWords(seqs[i]).c_str())};
        }
        ++checked;
      }
    }
  }
  return {true, StringPrintf("%lld ordered pairs agree with the naive recursion",
                             checked)};
}

// ---------------------------------------------------------------------------
// Criterion 6: cross WER hand values to 1e-9 plus permutation invariance of
// the ensemble on random systems.
// ---------------------------------------------------------------------------

Outcome Criterion6() {
  {
    Transcripts s1{{"u1", {"a", "b", "c"}}};
    Transcripts s2{{"u1", {"a", "b", "d"}}};
    double got = CrossWer({s1, s2});
    if (!Near(got, 100.0 / 3.0, 1e-9)) {
      return {false, StringPrintf("substitution hand case gave %.12f, want %.12f",
                                  got, 100.0 / 3.0)};
    }
  }
  {
    Transcripts s1{{"u1", {"a", "b"}}};
    Transcripts s2{{"u1", {"a", "b", "c"}}};
    double got = CrossWer({s1, s2});
    if (!Near(got, 100.0 * 5.0 / 12.0, 1e-9)) {
      return {false, StringPrintf("length-skew hand case gave %.12f, want %.12f",
                                  got, 100.0 * 5.0 / 12.0)};
    }
  }
  const std::vector<std::string> vocab = {"v", "w", "x", "y", "z"};
  Rng rng(7331);
  for (int trial = 0; trial < 3; ++trial) {
    std::size_t num_systems = 2 + rng.Bounded(3);
    std::vector<Transcripts> systems(num_systems);
    for (Transcripts &sys : systems) {
      for (int u = 1; u <= 3; ++u) {
        WordSequence words;
        std::size_t len = 1 + rng.Bounded(5);
        for (std::size_t k = 0; k < len; ++k) {
          words.push_back(vocab[rng.Bounded(vocab.size())]);
        }
        sys[StringPrintf("u%d", u)] = words;
      }
    }
    double base = CrossWer(systems);
    for (std::size_t shift = 1; shift < num_systems; ++shift) {
      std::vector<Transcripts> rotated = systems;
      std::rotate(rotated.begin(), rotated.begin() + shift, rotated.end());
      if (!Near(CrossWer(rotated), base, 1e-9)) {
        return {false, StringPrintf("rotation by %zu changed the cross WER",
                                    shift)};
      }
    }
    std::vector<Transcripts> reversed(systems.rbegin(), systems.rend());
    if (!Near(CrossWer(reversed), base, 1e-9)) {
      return {false, "reversing the system order changed the cross WER"};
    }
  }
  return {true, "hand values match to 1e-9 and the metric is order-invariant"};
}

// ---------------------------------------------------------------------------
// Criterion 7: over 50 seeded synthetic 3-system ensembles (target 25% on a
// 10000-word reference set), MBR combination beats the mean single-system
// WER in at least 45 trials and never exceeds the worst system.
// ---------------------------------------------------------------------------

Outcome Criterion7() {
  std::vector<std::string> vocab;
  for (int k = 0; k < 50; ++k) vocab.push_back(StringPrintf("w%02d", k));
  Transcripts refs;
  Rng ref_rng(90001);
  long long ref_words = 0;
  for (int u = 0; u < 500; ++u) {
    WordSequence words;
    for (int k = 0; k < 20; ++k) {
      words.push_back(vocab[ref_rng.Bounded(vocab.size())]);
    }
    ref_words += static_cast<long long>(words.size());
    refs[StringPrintf("u%03d", u)] = words;
  }
  if (ref_words < 10000) {
    return {false, StringPrintf("reference set has only %lld words", ref_words)};
  }

  int beat_mean = 0;
  int bounded_by_worst = 0;
  const int trials = 50;
  for (int seed = 1; seed <= trials; ++seed) {
    SynthOptions opts;
    opts.num_systems = 3;
    opts.target_wer = 25.0;
    opts.seed = static_cast<std::uint64_t>(seed);
    std::vector<SystemOutput> systems = SynthEnsemble(refs, opts);

    double sum = 0.0;
    double worst = 0.0;
    for (const SystemOutput &sys : systems) {
      double wer = ScoreWer(combkit::OneBest(sys, {}), refs).Wer();
      sum += wer;
      worst = std::max(worst, wer);
    }
    double mean = sum / static_cast<double>(systems.size());

    std::map<std::string, MbrResult> combined =
        CombineCorpus(systems, CombinationWeights::Uniform(systems.size()));
    double comb_wer = ScoreWer(CombinedTranscripts(combined), refs).Wer();

    if (comb_wer < mean) ++beat_mean;
    if (comb_wer <= worst + 1e-9) ++bounded_by_worst;
  }
  bool pass = beat_mean >= 45 && bounded_by_worst == trials;
  return {pass,
          StringPrintf("combination beat the ensemble mean in %d/%d trials and "
                       "stayed at or below the worst system in %d/%d",
                       beat_mean, trials, bounded_by_worst, trials)};
}

// ---------------------------------------------------------------------------
// Criterion 8: weight estimation. (a) the optimizer matches an exhaustive
// per-layer simplex grid within 1e-3 loss for 2 and 3 models on the builtin
// evaluator; (b) on convex toy losses the achieved loss never exceeds the
// best single model by more than 1e-6; (c) the scalar two-model example
// recovers alpha = (0.7, 0.3) within 1e-2; (d) checkpoint selection over a
// 120-iteration schedule returns {120, 114, ..., 6} exactly.
// ---------------------------------------------------------------------------

ParamBundle ScalarBundle(double v) {
  ParamBundle bundle;
  bundle.layers.push_back({"v", {v}});
  return bundle;
}

ParamBundle ClassifierBundle(std::vector<double> w, std::vector<double> b) {
  ParamBundle bundle;
  bundle.layers.push_back({"W", std::move(w)});
  bundle.layers.push_back({"b", std::move(b)});
  return bundle;
}

Outcome Criterion8() {
  // (a) Grid-search oracle agreement on the builtin evaluator, dim-1 inputs,
  // two classes. The cross-entropy of a linear classifier is convex in its
  // parameters and interpolation is affine in the weights, so the surface
  // over the per-layer simplexes is convex and the grid optimum is tight.
  Dataset data;
  data.feature_dim = 1;
  data.labels = {0, 1, 0, 1, 1};
  data.features = {{1.0}, {-1.0}, {0.5}, {-0.25}, {0.1}};
  LossFn loss = BuiltinEvaluator(data);
  std::vector<ParamBundle> models = {
      ClassifierBundle({1.0, -1.0}, {0.2, -0.2}),
      ClassifierBundle({-0.5, 0.5}, {0.0, 0.0}),
      ClassifierBundle({2.0, -2.0}, {-0.3, 0.3}),
  };
  {
    std::vector<ParamBundle> two(models.begin(), models.begin() + 2);
    double opt = EstimateWeights(two, loss).loss;
    double grid = combkit::oracles::GridSearchBestLoss(two, loss, 400);
    if (!Near(opt, grid, 1e-3)) {
      return {false, StringPrintf("two-model loss %.6f vs grid %.6f", opt, grid)};
    }
  }
  double gap3 = 0.0;
  {
    double opt = EstimateWeights(models, loss).loss;
    double grid = combkit::oracles::GridSearchBestLoss(models, loss, 50);
    gap3 = std::fabs(opt - grid);
    if (!Near(opt, grid, 1e-3)) {
      return {false, StringPrintf("three-model loss %.6f vs grid %.6f", opt, grid)};
    }
  }

  // (b) Vertex dominance on convex toys: linear, a quadratic whose optimum
  // lies outside the hull, and the builtin evaluator on separable data.
  {
    std::vector<ParamBundle> verts = {ScalarBundle(0.0), ScalarBundle(1.0),
                                      ScalarBundle(0.3)};
    struct Toy {
      const char *name;
      LossFn fn;
    };
    Dataset sep;
    sep.feature_dim = 1;
    sep.labels = {0, 1, 0, 1};
    sep.features = {{1.0}, {-1.0}, {0.5}, {-0.5}};
    LossFn sep_loss = BuiltinEvaluator(sep);
    std::vector<ParamBundle> classifiers = {
        ClassifierBundle({0.0, 0.0}, {0.0, 0.0}),
        ClassifierBundle({4.0, -4.0}, {0.0, 0.0}),
    };
    const Toy toys[] = {
        {"linear", [](const ParamBundle &b) { return -b.layers[0].values[0]; }},
        {"quadratic",
         [](const ParamBundle &b) {
           double v = b.layers[0].values[0];
           return (v - 2.0) * (v - 2.0);
         }},
    };
    for (const Toy &toy : toys) {
      double best_vertex = toy.fn(verts[0]);
      for (const ParamBundle &v : verts) {
        best_vertex = std::min(best_vertex, toy.fn(v));
      }
      double achieved = EstimateWeights(verts, toy.fn).loss;
      if (achieved > best_vertex + 1e-6) {
        return {false, StringPrintf("%s toy: achieved %.9f above best vertex %.9f",
                                    toy.name, achieved, best_vertex)};
      }
    }
    double best_vertex = std::min(sep_loss(classifiers[0]), sep_loss(classifiers[1]));
    double achieved = EstimateWeights(classifiers, sep_loss).loss;
    if (achieved > best_vertex + 1e-6) {
      return {false, StringPrintf("separable toy: achieved %.9f above best "
                                  "vertex %.9f",
                                  achieved, best_vertex)};
    }
  }

  // (c) Scalar recovery: models at 0 and 1, optimum at 0.3.
  {
    std::vector<ParamBundle> pair = {ScalarBundle(0.0), ScalarBundle(1.0)};
    LossFn quad = [](const ParamBundle &b) {
      double v = b.layers[0].values[0];
      return (v - 0.3) * (v - 0.3);
    };
    EstimateResult result = EstimateWeights(pair, quad);
    double a0 = result.weights.alpha[0][0];
    double a1 = result.weights.alpha[0][1];
    if (!Near(a0, 0.7, 1e-2) || !Near(a1, 0.3, 1e-2)) {
      return {false, StringPrintf("scalar example recovered (%.4f, %.4f), want "
                                  "(0.7, 0.3)",
                                  a0, a1)};
    }
  }

  // (d) Checkpoint selection: 20 checkpoints at interval 6 from iteration 120.
  {
    std::vector<int> available;
    for (int i = 1; i <= 120; ++i) available.push_back(i);
    std::vector<int> expected;
    for (int i = 0; i < 20; ++i) expected.push_back(120 - 6 * i);
    if (SelectCheckpoints(available, 20, 6) != expected) {
      return {false, "checkpoint selection over 120 iterations is not "
                     "{120, 114, ..., 6}"};
    }
  }

  return {true, StringPrintf("grid gap %.2e; vertex dominance holds on 3 toys; "
                             "scalar example recovers (0.7, 0.3); checkpoint "
                             "grid {120, 114, ..., 6} exact",
                             gap3)};
}

// ---------------------------------------------------------------------------
// Criterion 9: every subcommand, run twice with identical inputs, flags and
// seed (worker threads enabled where supported), produces byte-identical
// stdout and output files.
// ---------------------------------------------------------------------------

struct Snapshot {
  int exit_code = 0;
  std::string out;
  std::vector<std::string> files;
};

Outcome Criterion9() {
  TempDir tmp;
  WriteFile(tmp.File("words.txt"), "don't\nmoon\nB.B.C.'s\nabove-board\n");
  WriteFile(tmp.File("ref.txt"),
            "u1\tthe cat sat\nu2\ton the mat\nu3\tblue moon\n");
  WriteFile(tmp.File("hypA.txt"),
            "u1\tthe cat sat\nu2\ton a mat\nu3\tblue moon\n");
  WriteFile(tmp.File("hypB.txt"),
            "u1\tthe cap sat\nu2\ton the mat\nu3\tblue moons\n");
  WriteFile(tmp.File("n1.nbest"),
            "u1\t1\t-1.0\t-0.5\tthe cat sat\n"
            "u1\t2\t-1.5\t-0.7\tthe cap sat\n"
            "u2\t1\t-0.5\t-0.2\ton the mat\n"
            "u2\t2\t-2.0\t-0.9\tin the mat\n");
  WriteFile(tmp.File("n2.nbest"),
            "u1\t1\t-0.8\t-0.3\tthe cat sat\n"
            "u1\t2\t-1.2\t-0.6\ta cat sat\n"
            "u2\t1\t-1.0\t-0.4\tin the mat\n"
            "u2\t2\t-1.1\t-0.5\ton the mat\n");
  WriteFile(tmp.File("m1.pbundle"),
            "PBUNDLE 1\nlayer W 4\n0 0 0 0\nlayer b 2\n0 0\n");
  WriteFile(tmp.File("m2.pbundle"),
            "PBUNDLE 1\nlayer W 4\n4 -4 -4 4\nlayer b 2\n0.5 -0.5\n");
  WriteFile(tmp.File("dev.tsv"),
            "0\t1.0 -1.0\n1\t-1.0 1.0\n0\t0.5 -0.25\n1\t-0.3 0.8\n");
  WriteFile(tmp.File("avail.txt"), "1 2 3 4 5 6 7 8 9 10\n");
  WriteFile(tmp.File("a.layers"),
            "splice -1,0,1\nsplice -1,0,1\nsplice -1,0,1,2\nsplice -3,0,3\n"
            "splice -3,0,3\nsplice -6,-3,0\nsplice 0\n");
  WriteFile(tmp.File("pipe.cfg"),
            "stages = synth-ensemble, mbr-combine, score, cwer\n"
            "seed = 7\n"
            "report = " + tmp.File("report.tsv") + "\n"
            "synth-ensemble.ref = " + tmp.File("ref.txt") + "\n"
            "synth-ensemble.systems = 3\n"
            "synth-ensemble.target-wer = 25\n"
            "mbr-combine.out = " + tmp.File("pipe_combined.txt") + "\n"
            "score.out = " + tmp.File("pipe_score.txt") + "\n"
            "cwer.out = " + tmp.File("pipe_cwer.txt") + "\n");

  struct Command {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> outputs;
  };
  const std::vector<Command> commands = {
      {"glex build",
       {"glex", "build", "--words", tmp.File("words.txt"), "--out",
        tmp.File("lex.txt"), "--rejects", tmp.File("rej.txt")},
       {tmp.File("lex.txt"), tmp.File("rej.txt")}},
      {"glex units",
       {"glex", "units", "--lexicon", tmp.File("lex.txt"), "--context",
        "left-bi", "--out", tmp.File("units.txt")},
       {tmp.File("units.txt")}},
      {"score",
       {"--threads", "4", "score", "--hyp", tmp.File("hypA.txt"), "--ref",
        tmp.File("ref.txt"), "--detail"},
       {}},
      {"mbr decode",
       {"mbr", "decode", "--nbest", tmp.File("n1.nbest"), "--out",
        tmp.File("dec.txt"), "--risks", tmp.File("dec_risks.tsv")},
       {tmp.File("dec.txt"), tmp.File("dec_risks.tsv")}},
      {"mbr combine",
       {"--threads", "4", "mbr", "combine", "--nbest", tmp.File("n1.nbest"),
        "--nbest", tmp.File("n2.nbest"), "--lambdas", "2,1", "--lm-scale",
        "0.5", "--post-scale", "2", "--out", tmp.File("comb.txt"), "--risks",
        tmp.File("comb_risks.tsv")},
       {tmp.File("comb.txt"), tmp.File("comb_risks.tsv")}},
      {"cwer",
       {"cwer", "--hyp", tmp.File("hypA.txt"), "--hyp", tmp.File("hypB.txt"),
        "--out", tmp.File("cwer.txt")},
       {tmp.File("cwer.txt")}},
      {"stats",
       {"--threads", "4", "stats", "--hyp", tmp.File("hypA.txt"), "--hyp",
        tmp.File("hypB.txt"), "--ref", tmp.File("ref.txt")},
       {}},
      {"smooth",
       {"smooth", "--bundle", tmp.File("m1.pbundle"), "--bundle",
        tmp.File("m2.pbundle"), "--data", tmp.File("dev.tsv"), "--out",
        tmp.File("smoothed.pbundle"), "--weights-out", tmp.File("weights.txt"),
        "--max-iters", "60"},
       {tmp.File("smoothed.pbundle"), tmp.File("weights.txt")}},
      {"checkpoints",
       {"checkpoints", "--available", tmp.File("avail.txt"), "--count", "3",
        "--interval", "2"},
       {}},
      {"rfield", {"rfield", "--layers", tmp.File("a.layers")}, {}},
      {"synth",
       {"synth", "--ref", tmp.File("ref.txt"), "--systems", "2",
        "--target-wer", "20", "--seed", "11", "--out-prefix", tmp.File("s")},
       {tmp.File("s1.nbest"), tmp.File("s2.nbest")}},
      {"pipeline",
       {"--threads", "4", "pipeline", "--config", tmp.File("pipe.cfg"),
        "--seed", "7"},
       {tmp.File("report.tsv"), tmp.File("pipe_combined.txt"),
        tmp.File("pipe_score.txt"), tmp.File("pipe_cwer.txt")}},
  };

  auto snapshot = [](const Command &cmd) {
    Snapshot snap;
    RunResult r = Run(cmd.args);
    snap.exit_code = r.exit_code;
    snap.out = r.out;
    for (const std::string &path : cmd.outputs) {
      snap.files.push_back(ReadFile(path));
    }
    return snap;
  };

  int file_count = 0;
  for (const Command &cmd : commands) {
    Snapshot first = snapshot(cmd);
    if (first.exit_code != 0) {
      return {false, StringPrintf("%s exited with %d on the first run",
                                  cmd.name.c_str(), first.exit_code)};
    }
    Snapshot second = snapshot(cmd);
    if (second.exit_code != 0) {
      return {false, StringPrintf("%s exited with %d on the second run",
                                  cmd.name.c_str(), second.exit_code)};
    }
    if (first.out != second.out) {
      return {false, StringPrintf("%s stdout differs between runs",
                                  cmd.name.c_str())};
    }
    for (std::size_t i = 0; i < cmd.outputs.size(); ++i) {
      if (first.files[i] != second.files[i]) {
        return {false, StringPrintf("%s output %s differs between runs",
                                    cmd.name.c_str(), cmd.outputs[i].c_str())};
      }
      ++file_count;
    }
  }
  return {true, StringPrintf("%zu subcommand invocations re-ran byte-identically "
                             "(%d output files compared)",
                             commands.size(), file_count)};
}

using CriterionFn = Outcome (*)();

const CriterionFn kCriteria[] = {
    Criterion1, Criterion2, Criterion3, Criterion4, Criterion5,
    Criterion6, Criterion7, Criterion8, Criterion9,
};

}  // namespace

int main(int argc, char **argv) {
  int selected = 0;  // 0 runs every criterion
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  const int total = static_cast<int>(sizeof(kCriteria) / sizeof(kCriteria[0]));
  if (selected < 0 || selected > total) {
    std::fprintf(stderr, "criterion must be between 1 and %d (0 for all)\n",
                 total);
    return 2;
  }
  bool all_ok = true;
  for (int n = 1; n <= total; ++n) {
    if (selected != 0 && selected != n) continue;
    Outcome outcome;
    try {
      outcome = kCriteria[n - 1]();
    } catch (const std::exception &e) {
      outcome = {false, StringPrintf("unhandled exception: %s", e.what())};
    }
    std::printf("%s criterion %d: %s\n", outcome.pass ? "PASS" : "FAIL", n,
                outcome.detail.c_str());
    if (!outcome.pass) all_ok = false;
  }
  return all_ok ? 0 : 1;
}
