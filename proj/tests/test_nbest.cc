// combkit/tests/test_nbest.cc
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "combkit/error.h"
#include "combkit/nbest.h"
#include "combkit/rng.h"

namespace combkit {
namespace {

TEST_CASE("n-best files parse in file order") {
  SystemOutput sys = ParseNbest(
      "utt1\t1\t-10.5\t-3\tthe cat\n"
      "utt2\t1\t-8\t-2\ton\n"
      "utt1\t2\t-11\t-3.5\tthe cap\n"
      "utt1\t3\t-12\t-4\t\n",
      "sys1.nbest");
  CHECK(sys.system_id == "sys1.nbest");
  REQUIRE(sys.lists.size() == 2);
  const NBestList &utt1 = sys.lists.at("utt1");
  REQUIRE(utt1.hypotheses.size() == 3);
  CHECK(utt1.hypotheses[0].words == WordSequence{"the", "cat"});
  CHECK(utt1.hypotheses[0].acoustic_score == -10.5);
  CHECK(utt1.hypotheses[0].lm_score == -3.0);
  CHECK(utt1.hypotheses[1].words == WordSequence{"the", "cap"});
  CHECK(utt1.hypotheses[2].words.empty());
  CHECK(sys.lists.at("utt2").hypotheses.size() == 1);
}

TEST_CASE("n-best rendering renumbers ranks and round-trips") {
  std::string text =
      "utt1\t1\t-10.5\t-3\tthe cat\n"
      "utt1\t2\t-11\t-3.5\tthe cap\n";
  SystemOutput sys = ParseNbest(text, "sys1.nbest");
  CHECK(RenderNbest(sys) == text);
  // Non-contiguous ranks collapse to positions on output.
  SystemOutput gaps = ParseNbest("utt1\t5\t-1\t-2\ta\nutt1\t9\t-2\t-3\tb\n",
                                 "gaps.nbest");
  CHECK(RenderNbest(gaps) == "utt1\t1\t-1\t-2\ta\nutt1\t2\t-2\t-3\tb\n");
}

TEST_CASE("n-best parsing rejects malformed lines") {
  CHECK_THROWS_WITH_AS(ParseNbest("utt1\t1\t-1\t-2\n", "f.nbest"),
                       "f.nbest:1: expected \"utt-id<TAB>rank<TAB>acoustic"
                       "<TAB>lm<TAB>words\", got 4 tab-separated field(s)",
                       DataError);
  CHECK_THROWS_AS(ParseNbest("utt1\t0\t-1\t-2\ta\n", "f.nbest"), DataError);
  CHECK_THROWS_AS(ParseNbest("utt1\t-1\t-1\t-2\ta\n", "f.nbest"), DataError);
  CHECK_THROWS_AS(ParseNbest("utt1\tx\t-1\t-2\ta\n", "f.nbest"), DataError);
  CHECK_THROWS_AS(ParseNbest("utt1\t1\tinf\t-2\ta\n", "f.nbest"), DataError);
  CHECK_THROWS_AS(ParseNbest("utt1\t1\t-1\tnan\ta\n", "f.nbest"), DataError);
  CHECK_THROWS_AS(ParseNbest("\t1\t-1\t-2\ta\n", "f.nbest"), DataError);
  CHECK_THROWS_AS(ParseNbest("utt1\t1\t-1\t-2\ta  b\n", "f.nbest"), DataError);
  CHECK_THROWS_WITH_AS(
      ParseNbest("utt1\t1\t-1\t-2\ta\nutt1\t1\t-3\t-4\tb\n", "f.nbest"),
      "f.nbest:2: duplicate rank 1 for utterance 'utt1'", DataError);
  CHECK_THROWS_WITH_AS(ParseNbest("", "f.nbest"), "f.nbest: no utterances",
                       DataError);
}

NBestList MakeList(std::vector<Hypothesis> hyps) {
  NBestList list;
  list.utterance_id = "utt1";
  list.hypotheses = std::move(hyps);
  return list;
}

TEST_CASE("posteriors form a softmax over combined scores") {
  // s = beta * (acoustic + gamma * lm); exp(0) = 1 vs exp(log 3) = 3.
  NBestList list = MakeList({{{"a"}, 0.0, 0.0}, {{"b"}, std::log(3.0), 0.0}});
  PosteriorDistribution post = ComputePosteriors(list, {1.0, 1.0});
  REQUIRE(post.entries.size() == 2);
  CHECK(post.entries[0].words == WordSequence{"b"});
  CHECK(post.entries[0].probability == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(post.entries[1].probability == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("lm scale weights the language model score") {
  NBestList list = MakeList({{{"a"}, 0.0, std::log(9.0)}, {{"b"}, 0.0, 0.0}});
  // gamma = 0 ignores the lm score entirely.
  PosteriorDistribution flat = ComputePosteriors(list, {0.0, 1.0});
  CHECK(flat.entries[0].probability == doctest::Approx(0.5).epsilon(1e-12));
  // gamma = 0.5 contributes half the lm log score: exp(log(9)/2) = 3.
  PosteriorDistribution half = ComputePosteriors(list, {0.5, 1.0});
  CHECK(half.entries[0].words == WordSequence{"a"});
  CHECK(half.entries[0].probability == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("posterior scale sharpens or flattens the distribution") {
  NBestList list = MakeList({{{"a"}, 1.0, 0.0}, {{"b"}, 0.0, 0.0}});
  PosteriorDistribution soft = ComputePosteriors(list, {1.0, 0.5});
  PosteriorDistribution sharp = ComputePosteriors(list, {1.0, 4.0});
  CHECK(soft.entries[0].probability < sharp.entries[0].probability);
  // beta = 4, score gap 4: p(a) = e^4 / (e^4 + 1).
  double expect = std::exp(4.0) / (std::exp(4.0) + 1.0);
  CHECK(sharp.entries[0].probability ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("duplicate word sequences merge probability mass") {
  // Two copies of "a" at exp-score 1.5 each vs one "b" at 1.0:
  // p(a) = 3/4 after log-sum-exp merging.
  NBestList list = MakeList({{{"a"}, std::log(1.5), 0.0},
                             {{"b"}, 0.0, 0.0},
                             {{"a"}, std::log(1.5), 0.0}});
  PosteriorDistribution post = ComputePosteriors(list, {1.0, 1.0});
  REQUIRE(post.entries.size() == 2);
  CHECK(post.entries[0].words == WordSequence{"a"});
  CHECK(post.entries[0].probability == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("posteriors are invariant to a constant score shift") {
  NBestList base = MakeList({{{"a"}, -3.0, -1.0}, {{"b"}, -5.0, -2.0}});
  NBestList shifted = MakeList({{{"a"}, -103.0, -1.0}, {{"b"}, -105.0, -2.0}});
  PosteriorDistribution p = ComputePosteriors(base, {1.0, 1.0});
  PosteriorDistribution q = ComputePosteriors(shifted, {1.0, 1.0});
  REQUIRE(p.entries.size() == q.entries.size());
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    CHECK(p.entries[i].words == q.entries[i].words);
    CHECK(p.entries[i].probability ==
          doctest::Approx(q.entries[i].probability).epsilon(1e-12));
  }
}

TEST_CASE("posteriors survive extreme score magnitudes") {
  NBestList list = MakeList({{{"a"}, -1000.0, 0.0}, {{"b"}, -1001.0, 0.0}});
  PosteriorDistribution post = ComputePosteriors(list, {1.0, 1.0});
  double sum = 0.0;
  for (const PosteriorEntry &e : post.entries) sum += e.probability;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(post.entries[0].words == WordSequence{"a"});
  CHECK(post.entries[0].probability > 0.7);
}

TEST_CASE("equal probabilities order by word sequence bytes") {
  NBestList list = MakeList({{{"zz"}, 0.0, 0.0},
                             {{"aa"}, 0.0, 0.0},
                             {{"mm"}, 0.0, 0.0}});
  PosteriorDistribution post = ComputePosteriors(list, {1.0, 1.0});
  REQUIRE(post.entries.size() == 3);
  CHECK(post.entries[0].words == WordSequence{"aa"});
  CHECK(post.entries[1].words == WordSequence{"mm"});
  CHECK(post.entries[2].words == WordSequence{"zz"});
}

TEST_CASE("posterior probabilities sum to one on random lists") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Hypothesis> hyps;
    std::size_t n = 1 + rng.Bounded(12);
    for (std::size_t i = 0; i < n; ++i) {
      Hypothesis h;
      std::size_t len = rng.Bounded(4);
      for (std::size_t w = 0; w < len; ++w) {
        h.words.push_back(std::string(1, static_cast<char>('a' + rng.Bounded(3))));
      }
      h.acoustic_score = -20.0 * rng.Uniform();
      h.lm_score = -10.0 * rng.Uniform();
      hyps.push_back(std::move(h));
    }
    PosteriorDistribution post =
        ComputePosteriors(MakeList(std::move(hyps)), {0.8, 1.7});
    double sum = 0.0;
    for (const PosteriorEntry &e : post.entries) {
      CHECK(e.probability > 0.0);
      sum += e.probability;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < post.entries.size(); ++i) {
      bool ordered =
          post.entries[i - 1].probability > post.entries[i].probability ||
          (post.entries[i - 1].probability == post.entries[i].probability &&
           CompareWords(post.entries[i - 1].words, post.entries[i].words) < 0);
      CHECK(ordered);
    }
  }
}

TEST_CASE("posterior computation validates its inputs") {
  NBestList empty;
  empty.utterance_id = "utt9";
  CHECK_THROWS_AS(ComputePosteriors(empty, {1.0, 1.0}), std::invalid_argument);
  NBestList list = MakeList({{{"a"}, 0.0, 0.0}});
  CHECK_THROWS_AS(ComputePosteriors(list, {-0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ComputePosteriors(list, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ComputePosteriors(list, {1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("one-best picks the top posterior entry per utterance") {
  SystemOutput sys = ParseNbest(
      "utt1\t1\t0\t0\tthe cat\n"
      "utt1\t2\t1\t0\tthe cap\n"
      "utt2\t1\t0\t0\ton\n",
      "sys.nbest");
  Transcripts best = OneBest(sys, {1.0, 1.0});
  REQUIRE(best.size() == 2);
  CHECK(best["utt1"] == WordSequence{"the", "cap"});
  CHECK(best["utt2"] == WordSequence{"on"});
}

}  // namespace
}  // namespace combkit
