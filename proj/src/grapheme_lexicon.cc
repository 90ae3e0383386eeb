// combkit/grapheme_lexicon.cc
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

#include "combkit/grapheme_lexicon.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "combkit/error.h"
#include "combkit/text_io.h"

namespace combkit {

namespace {

bool IsAsciiLetter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char ToLowerAscii(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::string AttributedGrapheme::Render() const {
  std::string s(1, base);
  if (apostrophe || abbreviation) {
    s += ';';
    if (apostrophe) s += "DA";
    if (abbreviation) s += "DB";
  }
  return s;
}

std::string LexiconEntry::RenderUnits() const {
  std::string s;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (i > 0) s += ' ';
    s += units[i].Render();
  }
  return s;
}

std::vector<AttributedGrapheme> WordToGraphemes(std::string_view word,
                                                bool mark_attributes) {
  std::vector<AttributedGrapheme> units;
  bool pending_da = false;  // apostrophe seen before any letter
  for (std::size_t i = 0; i < word.size(); ++i) {
    char c = word[i];
    if (IsAsciiLetter(c)) {
      AttributedGrapheme g;
      g.base = ToLowerAscii(c);
      if (pending_da && mark_attributes) g.apostrophe = true;
      pending_da = false;
      units.push_back(g);
    } else if (c == '.') {
      // An abbreviation period marks the letter it directly follows.
      if (mark_attributes && i > 0 && IsAsciiLetter(word[i - 1]) &&
          !units.empty()) {
        units.back().abbreviation = true;
      }
    } else if (c == '\'') {
      if (!units.empty()) {
        if (mark_attributes) units.back().apostrophe = true;
      } else {
        pending_da = true;  // word-initial: mark the next letter
      }
    } else if (c == '-') {
      // dropped, no attribute
    } else {
      throw DataError(StringPrintf(
          "word '%.*s': disallowed character '%c' at position %zu",
          static_cast<int>(word.size()), word.data(), c, i + 1));
    }
  }
  if (units.empty()) {
    throw DataError(StringPrintf("word '%.*s' contains no letters",
                                 static_cast<int>(word.size()), word.data()));
  }
  return units;
}

LexiconBuild BuildLexicon(const std::vector<std::string> &words,
                          bool mark_attributes) {
  std::set<std::string> distinct(words.begin(), words.end());
  LexiconBuild build;
  for (const std::string &word : distinct) {
    try {
      build.entries.push_back({word, WordToGraphemes(word, mark_attributes)});
    } catch (const DataError &e) {
      build.rejections.push_back({word, e.what()});
    }
  }
  return build;
}

std::set<std::string> UnitInventory::SecondPositionSymbols() const {
  std::set<std::string> out;
  for (const auto &[left, unit] : units) out.insert(unit);
  return out;
}

std::string UnitInventory::Render() const {
  std::string out;
  for (const auto &[left, unit] : units) {
    if (context == ContextMode::kLeftBi) {
      out += left;
      out += ' ';
    }
    out += unit;
    out += '\n';
  }
  return out;
}

UnitInventory ContextUnits(const std::vector<LexiconEntry> &lexicon,
                           ContextMode mode) {
  if (lexicon.empty()) {
    throw std::invalid_argument("context units: empty lexicon");
  }
  UnitInventory inventory;
  inventory.context = mode;
  for (const LexiconEntry &entry : lexicon) {
    std::string prev(kBoundarySymbol);
    for (const AttributedGrapheme &g : entry.units) {
      std::string unit = g.Render();
      if (mode == ContextMode::kMono) {
        inventory.units.insert({std::string(), unit});
      } else {
        inventory.units.insert({prev, unit});
      }
      prev = std::move(unit);
    }
  }
  return inventory;
}

std::string RenderLexicon(const std::vector<LexiconEntry> &entries) {
  std::vector<const LexiconEntry *> sorted;
  sorted.reserve(entries.size());
  for (const LexiconEntry &e : entries) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const LexiconEntry *a, const LexiconEntry *b) {
              return a->word < b->word;
            });
  std::string out;
  for (const LexiconEntry *e : sorted) {
    out += e->word;
    out += '\t';
    out += e->RenderUnits();
    out += '\n';
  }
  return out;
}

namespace {

AttributedGrapheme ParseUnit(const std::string &token, const std::string &file,
                             int line) {
  AttributedGrapheme g;
  if (token.empty() || token[0] < 'a' || token[0] > 'z') {
    throw DataError(file, line, "bad unit '" + token + "': base must be a-z");
  }
  g.base = token[0];
  if (token.size() == 1) return g;
  std::string_view attrs(token);
  attrs.remove_prefix(1);
  if (attrs[0] != ';') {
    throw DataError(file, line, "bad unit '" + token + "': expected ';'");
  }
  attrs.remove_prefix(1);
  if (attrs == "DA") {
    g.apostrophe = true;
  } else if (attrs == "DB") {
    g.abbreviation = true;
  } else if (attrs == "DADB") {
    g.apostrophe = g.abbreviation = true;
  } else {
    throw DataError(file, line, "bad unit '" + token + "': unknown attributes");
  }
  return g;
}

}  // namespace

std::vector<LexiconEntry> ParseLexicon(const std::string &text,
                                       const std::string &filename) {
  std::vector<LexiconEntry> entries;
  std::set<std::string> seen;
  std::vector<std::string> lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int line_no = static_cast<int>(i) + 1;
    const std::string &line = lines[i];
    if (line.empty()) {
      throw DataError(filename, line_no, "empty line");
    }
    std::vector<std::string> fields = SplitFields(line, '\t');
    if (fields.size() != 2) {
      throw DataError(filename, line_no,
                      StringPrintf("expected 2 tab-separated fields, got %zu",
                                   fields.size()));
    }
    if (fields[0].empty()) {
      throw DataError(filename, line_no, "empty word");
    }
    if (!seen.insert(fields[0]).second) {
      throw DataError(filename, line_no, "duplicate word '" + fields[0] + "'");
    }
    LexiconEntry entry;
    entry.word = fields[0];
    for (const std::string &token : SplitFields(fields[1], ' ')) {
      if (token.empty()) {
        throw DataError(filename, line_no, "empty unit token");
      }
      entry.units.push_back(ParseUnit(token, filename, line_no));
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<std::string> ParseWordList(const std::string &text) {
  std::vector<std::string> words;
  for (const std::string &line : SplitLines(text)) {
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

}  // namespace combkit
