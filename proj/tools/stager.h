// combkit/tools/stager.h
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

#ifndef COMBKIT_TOOLS_STAGER_H_
#define COMBKIT_TOOLS_STAGER_H_

#include <map>
#include <string>

#include "combkit/text_io.h"

namespace combkit {

// Collects file outputs in memory and writes them only once the whole
// command has succeeded, so a nonzero exit leaves no files behind. Reads go
// through the pending set first, letting pipeline stages consume files
// staged by earlier stages before anything touches the disk.
class OutputStager {
 public:
  void Stage(const std::string &path, std::string content) {
    pending_[path] = std::move(content);
  }

  std::string Read(const std::string &path) const {
    auto it = pending_.find(path);
    if (it != pending_.end()) return it->second;
    return ReadFileText(path);
  }

  // Writes all staged files, in path order.
  void Flush() {
    for (const auto &[path, content] : pending_) {
      WriteFileText(path, content);
    }
    pending_.clear();
  }

 private:
  std::map<std::string, std::string> pending_;
};

}  // namespace combkit

#endif  // COMBKIT_TOOLS_STAGER_H_
