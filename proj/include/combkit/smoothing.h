// combkit/smoothing.h
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

#ifndef COMBKIT_SMOOTHING_H_
#define COMBKIT_SMOOTHING_H_

#include <functional>
#include <string>
#include <vector>

namespace combkit {

struct BundleLayer {
  std::string name;
  std::vector<double> values;  // finite, non-empty
};

// Named layered parameter arrays of one model checkpoint.
struct ParamBundle {
  std::vector<BundleLayer> layers;  // names unique, order significant
};

// Bundle file: "PBUNDLE 1" header, then per layer "layer <name> <dim>"
// followed by <dim> whitespace-separated decimal reals (line breaks
// insignificant). Values render at full round-trip precision.
ParamBundle ParseBundle(const std::string &text, const std::string &filename);
std::string RenderBundle(const ParamBundle &bundle);

// Per-layer convex combination weights over M models: every alpha[layer][m]
// is non-negative and each layer's row sums to 1.
struct SmoothingWeights {
  std::vector<std::string> layer_names;
  std::vector<std::vector<double>> alpha;  // [layer][model]
};

// Weights file: "SMOOTHW 1" then per layer "layer <name> w1 w2 ... wM".
std::string RenderWeights(const SmoothingWeights &weights);

// Selects count checkpoint indices {last, last-k, last-2k, ...} that exist in
// `available`, anchored at the final iteration, returned descending. Throws
// DataError stating how many indices were found when fewer than count exist;
// std::invalid_argument for count < 1, interval < 1 or empty availability.
std::vector<int> SelectCheckpoints(const std::vector<int> &available, int count,
                                   int interval);

// Layer-wise interpolation: output layer L = sum_m alpha[L][m] * model_m[L],
// elementwise in double precision, summed in model-index order. All bundles
// must share an identical layer schema (names, order, dimensions). Throws
// std::invalid_argument naming the first divergent layer on schema mismatch
// or a weight shape mismatch.
ParamBundle Interpolate(const std::vector<ParamBundle> &models,
                        const SmoothingWeights &weights);

// Deterministic scalar loss of a parameter bundle on some validation data
// (bound at construction).
using LossFn = std::function<double(const ParamBundle &)>;

struct EstimateOptions {
  int max_iters = 200;
  double tol = 1e-8;           // stop when the loss improves by less
  double fd_step = 1e-4;       // central finite-difference step
  double learning_rate = 1.0;  // halved on non-improvement
};

struct EstimateResult {
  SmoothingWeights weights;
  double loss = 0.0;
};

// Estimates per-layer simplex weights minimizing the evaluator loss.
// Weights are parameterized as a per-layer softmax of free parameters (so
// every iterate is feasible), initialized uniform and optimized by gradient
// descent with central finite-difference gradients. Each single model (a
// simplex vertex) and the uniform start are also probed, and the result is
// polished by snapping single layers to single models while that strictly
// improves the loss, since the softmax iterates can only approach such
// corners asymptotically. The best configuration seen is returned, so the
// achieved loss never exceeds the uniform-initialization loss nor the best
// single model's loss. Throws DataError if the evaluator produces a
// non-finite loss.
EstimateResult EstimateWeights(const std::vector<ParamBundle> &models,
                               const LossFn &loss_fn,
                               const EstimateOptions &opts = {});

// Dense classification dataset for the builtin evaluator:
// lines "label<TAB>f1 f2 ... fD".
struct Dataset {
  int feature_dim = 0;
  std::vector<int> labels;
  std::vector<std::vector<double>> features;
};

Dataset ParseDataset(const std::string &text, const std::string &filename);

// Mean multinomial cross-entropy of the linear classifier softmax(W*x + b)
// over the dataset. The bundle must carry layer "W" (classes x features,
// row-major) and layer "b" (classes). Throws DataError on schema mismatch or
// a label out of range.
LossFn BuiltinEvaluator(const Dataset &data);

}  // namespace combkit

#endif  // COMBKIT_SMOOTHING_H_
