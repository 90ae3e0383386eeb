// combkit/tools/pipeline.h
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

#ifndef COMBKIT_TOOLS_PIPELINE_H_
#define COMBKIT_TOOLS_PIPELINE_H_

#include <cstdint>
#include <string>

#include "stager.h"

namespace combkit {

struct PipelineOptions {
  std::uint64_t seed = 0;     // overrides the config seed when overridden
  bool seed_overridden = false;
  int threads = 1;
};

// Parses a key=value pipeline config, runs its stages in order and stages
// every file output. Returns the report text when the config does not name
// a report file (the caller prints it); otherwise the report is staged and
// the return value is empty. A stage failure aborts with the stage name
// prefixed to the underlying error; nothing is flushed by this function.
//
// Config format: '#' comment lines, "stages = s1, s2, ...", optional "seed"
// and "report" keys, and per-stage parameters "<stage>.<key> = value".
// Stage names: lexicon-build, synth-ensemble, mbr-combine, score, cwer,
// smooth; each may appear once.
std::string RunPipeline(const std::string &config_text,
                        const std::string &config_path,
                        const PipelineOptions &opts, OutputStager *stager);

}  // namespace combkit

#endif  // COMBKIT_TOOLS_PIPELINE_H_
