// combkit/text_io.h
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

#ifndef COMBKIT_TEXT_IO_H_
#define COMBKIT_TEXT_IO_H_

#include <string>
#include <string_view>
#include <vector>

namespace combkit {

// Reads a whole file as UTF-8 text. Throws DataError naming the path if the
// file cannot be opened.
std::string ReadFileText(const std::string &path);

// Writes text to a file, creating parent directories as needed. Throws
// DataError naming the path on failure.
void WriteFileText(const std::string &path, const std::string &text);

// Splits text into lines on '\n'. A trailing newline does not produce an
// extra empty line; a final line without a newline is kept.
std::vector<std::string> SplitLines(std::string_view text);

// Splits a line on a separator, keeping empty fields (n separators give
// n + 1 fields).
std::vector<std::string> SplitFields(std::string_view line, char sep);

// Strict number parsing over the full string. Returns false on trailing
// garbage, empty input, or (for ParseDouble) non-finite values.
bool ParseDouble(std::string_view s, double *value);
bool ParseInt(std::string_view s, long long *value);

// printf-style formatting into a std::string.
std::string StringPrintf(const char *fmt, ...);

// Shortest decimal rendering that round-trips a double exactly.
std::string FormatFull(double value);

}  // namespace combkit

#endif  // COMBKIT_TEXT_IO_H_
