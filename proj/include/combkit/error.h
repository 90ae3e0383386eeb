// combkit/error.h
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

#ifndef COMBKIT_ERROR_H_
#define COMBKIT_ERROR_H_

#include <stdexcept>
#include <string>

namespace combkit {

// Malformed or inconsistent input data (parse failures, validation failures,
// missing files). Carries file:line context when it is known. The CLI maps
// this to exit code 2; flag-level misuse maps to std::invalid_argument and
// exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &message)
      : std::runtime_error(message) {}
  DataError(const std::string &file, int line, const std::string &message)
      : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + message
                                    : file + ": " + message) {}
};

}  // namespace combkit

#endif  // COMBKIT_ERROR_H_
