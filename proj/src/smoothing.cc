// combkit/smoothing.cc
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

#include "combkit/smoothing.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "combkit/error.h"
#include "combkit/text_io.h"

namespace combkit {

namespace {

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> Tokenize(const std::string &text) {
  std::vector<Token> tokens;
  int line = 1;
  std::string cur;
  int cur_line = 0;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) {
        tokens.push_back(Token{cur, cur_line});
        cur.clear();
      }
      if (c == '\n') ++line;
      continue;
    }
    if (cur.empty()) cur_line = line;
    cur += c;
  }
  if (!cur.empty()) tokens.push_back(Token{cur, cur_line});
  return tokens;
}

}  // namespace

ParamBundle ParseBundle(const std::string &text, const std::string &filename) {
  std::vector<Token> tokens = Tokenize(text);
  std::size_t pos = 0;
  auto next = [&](const char *what) -> const Token & {
    if (pos >= tokens.size()) {
      int line = tokens.empty() ? 0 : tokens.back().line;
      throw DataError(filename, line,
                      std::string("unexpected end of file, expected ") + what);
    }
    return tokens[pos++];
  };

  const Token &magic = next("\"PBUNDLE\" header");
  const Token &version = next("bundle version");
  if (magic.text != "PBUNDLE" || version.text != "1") {
    throw DataError(filename, magic.line,
                    "unsupported header, expected \"PBUNDLE 1\"");
  }

  ParamBundle bundle;
  std::set<std::string> names;
  while (pos < tokens.size()) {
    const Token &keyword = next("\"layer\"");
    if (keyword.text != "layer") {
      throw DataError(filename, keyword.line,
                      "expected \"layer\", got '" + keyword.text + "'");
    }
    BundleLayer layer;
    layer.name = next("layer name").text;
    if (!names.insert(layer.name).second) {
      throw DataError(filename, tokens[pos - 1].line,
                      "duplicate layer '" + layer.name + "'");
    }
    const Token &dim_tok = next("layer dimension");
    long long dim = 0;
    if (!ParseInt(dim_tok.text, &dim) || dim < 1) {
      throw DataError(filename, dim_tok.line,
                      "bad layer dimension '" + dim_tok.text + "'");
    }
    layer.values.reserve(static_cast<std::size_t>(dim));
    for (long long i = 0; i < dim; ++i) {
      const Token &value_tok = next("layer value");
      double value = 0.0;
      if (!ParseDouble(value_tok.text, &value)) {
        throw DataError(filename, value_tok.line,
                        "bad value '" + value_tok.text + "' in layer '" +
                            layer.name + "'");
      }
      layer.values.push_back(value);
    }
    bundle.layers.push_back(std::move(layer));
  }
  if (bundle.layers.empty()) {
    throw DataError(filename, 0, "bundle has no layers");
  }
  return bundle;
}

std::string RenderBundle(const ParamBundle &bundle) {
  std::string out = "PBUNDLE 1\n";
  for (const BundleLayer &layer : bundle.layers) {
    out += StringPrintf("layer %s %zu\n", layer.name.c_str(),
                        layer.values.size());
    for (std::size_t i = 0; i < layer.values.size(); ++i) {
      if (i > 0) out += ' ';
      out += FormatFull(layer.values[i]);
    }
    out += '\n';
  }
  return out;
}

std::string RenderWeights(const SmoothingWeights &weights) {
  std::string out = "SMOOTHW 1\n";
  for (std::size_t l = 0; l < weights.layer_names.size(); ++l) {
    out += "layer " + weights.layer_names[l];
    for (double w : weights.alpha[l]) {
      out += ' ';
      out += FormatFull(w);
    }
    out += '\n';
  }
  return out;
}

std::vector<int> SelectCheckpoints(const std::vector<int> &available, int count,
                                   int interval) {
  if (count < 1) {
    throw std::invalid_argument("checkpoint count must be >= 1");
  }
  if (interval < 1) {
    throw std::invalid_argument("checkpoint interval must be >= 1");
  }
  if (available.empty()) {
    throw std::invalid_argument("no available checkpoints");
  }
  std::set<int> have(available.begin(), available.end());
  const int first = *have.begin();
  const int last = *have.rbegin();
  std::vector<int> selected;
  for (long long it = last; it >= first; it -= interval) {
    if (have.count(static_cast<int>(it))) {
      selected.push_back(static_cast<int>(it));
      if (selected.size() == static_cast<std::size_t>(count)) break;
    }
  }
  if (selected.size() < static_cast<std::size_t>(count)) {
    throw DataError(StringPrintf(
        "found only %zu of %d requested checkpoints (last=%d, interval=%d)",
        selected.size(), count, last, interval));
  }
  return selected;
}

namespace {

// Throws std::invalid_argument naming the first layer whose name, order or
// dimension diverges from the reference schema.
void CheckSchema(const ParamBundle &ref, const ParamBundle &other) {
  std::size_t layers = std::min(ref.layers.size(), other.layers.size());
  for (std::size_t l = 0; l < layers; ++l) {
    if (ref.layers[l].name != other.layers[l].name) {
      throw std::invalid_argument("layer schema mismatch at '" +
                                  ref.layers[l].name + "'");
    }
    if (ref.layers[l].values.size() != other.layers[l].values.size()) {
      throw std::invalid_argument("layer dimension mismatch at '" +
                                  ref.layers[l].name + "'");
    }
  }
  if (ref.layers.size() != other.layers.size()) {
    const ParamBundle &longer =
        ref.layers.size() > other.layers.size() ? ref : other;
    throw std::invalid_argument("layer schema mismatch at '" +
                                longer.layers[layers].name + "'");
  }
}

}  // namespace

ParamBundle Interpolate(const std::vector<ParamBundle> &models,
                        const SmoothingWeights &weights) {
  if (models.empty()) {
    throw std::invalid_argument("interpolation requires at least one model");
  }
  for (std::size_t m = 1; m < models.size(); ++m) {
    CheckSchema(models[0], models[m]);
  }
  if (weights.layer_names.size() != models[0].layers.size() ||
      weights.alpha.size() != weights.layer_names.size()) {
    throw std::invalid_argument("weight shape mismatch");
  }
  for (std::size_t l = 0; l < weights.layer_names.size(); ++l) {
    if (weights.layer_names[l] != models[0].layers[l].name) {
      throw std::invalid_argument("layer schema mismatch at '" +
                                  models[0].layers[l].name + "'");
    }
    if (weights.alpha[l].size() != models.size()) {
      throw std::invalid_argument("weight shape mismatch at '" +
                                  weights.layer_names[l] + "'");
    }
  }

  ParamBundle out;
  out.layers.resize(models[0].layers.size());
  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    out.layers[l].name = models[0].layers[l].name;
    out.layers[l].values.assign(models[0].layers[l].values.size(), 0.0);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const double alpha = weights.alpha[l][m];
      const std::vector<double> &values = models[m].layers[l].values;
      for (std::size_t i = 0; i < values.size(); ++i) {
        out.layers[l].values[i] += alpha * values[i];
      }
    }
  }
  return out;
}

namespace {

double CheckedLoss(const LossFn &loss_fn, const ParamBundle &bundle) {
  double loss = loss_fn(bundle);
  if (!std::isfinite(loss)) {
    throw DataError("evaluator produced a non-finite loss");
  }
  return loss;
}

// Per-layer softmax of the free parameters.
SmoothingWeights WeightsFromTheta(const std::vector<std::string> &layer_names,
                                  const std::vector<std::vector<double>> &theta) {
  SmoothingWeights weights;
  weights.layer_names = layer_names;
  weights.alpha.resize(theta.size());
  for (std::size_t l = 0; l < theta.size(); ++l) {
    double m = *std::max_element(theta[l].begin(), theta[l].end());
    double total = 0.0;
    weights.alpha[l].resize(theta[l].size());
    for (std::size_t i = 0; i < theta[l].size(); ++i) {
      weights.alpha[l][i] = std::exp(theta[l][i] - m);
      total += weights.alpha[l][i];
    }
    for (double &w : weights.alpha[l]) w /= total;
  }
  return weights;
}

}  // namespace

EstimateResult EstimateWeights(const std::vector<ParamBundle> &models,
                               const LossFn &loss_fn,
                               const EstimateOptions &opts) {
  if (models.empty()) {
    throw std::invalid_argument("estimation requires at least one model");
  }
  const std::size_t num_models = models.size();
  const std::size_t num_layers = models[0].layers.size();
  std::vector<std::string> layer_names;
  layer_names.reserve(num_layers);
  for (const BundleLayer &layer : models[0].layers) {
    layer_names.push_back(layer.name);
  }

  EstimateResult best;
  best.weights.layer_names = layer_names;
  if (num_models == 1) {
    best.weights.alpha.assign(num_layers, {1.0});
    best.loss = CheckedLoss(loss_fn, models[0]);
    return best;
  }

  // Probe every simplex vertex: a single model is always reachable, so the
  // estimate can never be worse than the best individual model.
  best.loss = CheckedLoss(loss_fn, models[0]);
  best.weights.alpha.assign(num_layers, std::vector<double>(num_models, 0.0));
  for (auto &row : best.weights.alpha) row[0] = 1.0;
  for (std::size_t m = 1; m < num_models; ++m) {
    double loss = CheckedLoss(loss_fn, models[m]);
    if (loss < best.loss) {
      best.loss = loss;
      best.weights.alpha.assign(num_layers,
                                std::vector<double>(num_models, 0.0));
      for (auto &row : best.weights.alpha) row[m] = 1.0;
    }
  }

  std::vector<std::vector<double>> theta(
      num_layers, std::vector<double>(num_models, 0.0));
  auto eval = [&](const std::vector<std::vector<double>> &t) {
    return CheckedLoss(loss_fn,
                       Interpolate(models, WeightsFromTheta(layer_names, t)));
  };

  double cur_loss = eval(theta);  // uniform initialization
  if (cur_loss < best.loss) {
    best.loss = cur_loss;
    best.weights = WeightsFromTheta(layer_names, theta);
  }

  double lr = opts.learning_rate;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // Central finite-difference gradient.
    std::vector<std::vector<double>> grad(
        num_layers, std::vector<double>(num_models, 0.0));
    for (std::size_t l = 0; l < num_layers; ++l) {
      for (std::size_t m = 0; m < num_models; ++m) {
        double saved = theta[l][m];
        theta[l][m] = saved + opts.fd_step;
        double up = eval(theta);
        theta[l][m] = saved - opts.fd_step;
        double down = eval(theta);
        theta[l][m] = saved;
        grad[l][m] = (up - down) / (2.0 * opts.fd_step);
      }
    }

    std::vector<std::vector<double>> proposal = theta;
    for (std::size_t l = 0; l < num_layers; ++l) {
      for (std::size_t m = 0; m < num_models; ++m) {
        proposal[l][m] -= lr * grad[l][m];
      }
    }
    double proposal_loss = eval(proposal);
    if (proposal_loss < cur_loss) {
      double gain = cur_loss - proposal_loss;
      theta = std::move(proposal);
      cur_loss = proposal_loss;
      if (cur_loss < best.loss) {
        best.loss = cur_loss;
        best.weights = WeightsFromTheta(layer_names, theta);
      }
      if (gain < opts.tol) break;
    } else {
      lr *= 0.5;
      if (lr < 1e-12) break;
    }
  }

  // The softmax parameterization approaches a simplex boundary only
  // asymptotically, yet with layer-wise weights the optimum frequently sits
  // at a per-layer corner (one model supplying an entire layer), which the
  // whole-model vertex probes above do not cover. Greedily snap single
  // layers to single models while that strictly improves the loss. Every
  // acceptance strictly lowers the loss over a finite configuration set, so
  // the loop terminates.
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t l = 0; l < num_layers; ++l) {
      for (std::size_t m = 0; m < num_models; ++m) {
        SmoothingWeights candidate = best.weights;
        std::fill(candidate.alpha[l].begin(), candidate.alpha[l].end(), 0.0);
        candidate.alpha[l][m] = 1.0;
        double loss = CheckedLoss(loss_fn, Interpolate(models, candidate));
        if (loss < best.loss) {
          best.loss = loss;
          best.weights = std::move(candidate);
          improved = true;
        }
      }
    }
  }
  return best;
}

Dataset ParseDataset(const std::string &text, const std::string &filename) {
  Dataset data;
  std::vector<std::string> lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    std::vector<std::string> fields = SplitFields(lines[i], '\t');
    if (fields.size() != 2) {
      throw DataError(filename, line_no,
                      StringPrintf("expected \"label<TAB>features\", got %zu "
                                   "tab-separated field(s)",
                                   fields.size()));
    }
    long long label = 0;
    if (!ParseInt(fields[0], &label) || label < 0) {
      throw DataError(filename, line_no, "bad label '" + fields[0] + "'");
    }
    std::vector<double> features;
    for (const std::string &token : SplitFields(fields[1], ' ')) {
      double value = 0.0;
      if (!ParseDouble(token, &value)) {
        throw DataError(filename, line_no, "bad feature '" + token + "'");
      }
      features.push_back(value);
    }
    if (features.empty()) {
      throw DataError(filename, line_no, "no features");
    }
    if (data.feature_dim == 0) {
      data.feature_dim = static_cast<int>(features.size());
    } else if (static_cast<int>(features.size()) != data.feature_dim) {
      throw DataError(filename, line_no,
                      StringPrintf("expected %d features, got %zu",
                                   data.feature_dim, features.size()));
    }
    data.labels.push_back(static_cast<int>(label));
    data.features.push_back(std::move(features));
  }
  if (data.labels.empty()) {
    throw DataError(filename, 0, "no examples");
  }
  return data;
}

LossFn BuiltinEvaluator(const Dataset &data) {
  return [data](const ParamBundle &bundle) -> double {
    const BundleLayer *weight = nullptr;
    const BundleLayer *bias = nullptr;
    for (const BundleLayer &layer : bundle.layers) {
      if (layer.name == "W") weight = &layer;
      if (layer.name == "b") bias = &layer;
    }
    if (weight == nullptr || bias == nullptr) {
      throw DataError("evaluator needs layers 'W' and 'b'");
    }
    const std::size_t dim = static_cast<std::size_t>(data.feature_dim);
    if (weight->values.size() % dim != 0) {
      throw DataError(StringPrintf(
          "layer 'W' size %zu is not a multiple of the feature dim %zu",
          weight->values.size(), dim));
    }
    const std::size_t classes = weight->values.size() / dim;
    if (bias->values.size() != classes) {
      throw DataError(StringPrintf("layer 'b' size %zu, expected %zu",
                                   bias->values.size(), classes));
    }

    double total = 0.0;
    std::vector<double> logits(classes);
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (static_cast<std::size_t>(data.labels[i]) >= classes) {
        throw DataError(StringPrintf("label %d out of range for %zu classes",
                                     data.labels[i], classes));
      }
      const std::vector<double> &x = data.features[i];
      for (std::size_t c = 0; c < classes; ++c) {
        double z = bias->values[c];
        for (std::size_t d = 0; d < dim; ++d) {
          z += weight->values[c * dim + d] * x[d];
        }
        logits[c] = z;
      }
      double m = *std::max_element(logits.begin(), logits.end());
      double lse = 0.0;
      for (double z : logits) lse += std::exp(z - m);
      total += (m + std::log(lse)) - logits[static_cast<std::size_t>(data.labels[i])];
    }
    return total / static_cast<double>(data.labels.size());
  };
}

}  // namespace combkit
