// combkit/grapheme_lexicon.h
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

#ifndef COMBKIT_GRAPHEME_LEXICON_H_
#define COMBKIT_GRAPHEME_LEXICON_H_

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace combkit {

// One letter unit of a graphemic lexicon. Orthographic attributes mark an
// adjacent apostrophe (DA) or an abbreviation period (DB); an attributed
// grapheme is a distinct unit symbol from its bare form.
struct AttributedGrapheme {
  char base = 0;               // one of 'a'..'z'
  bool apostrophe = false;     // DA
  bool abbreviation = false;   // DB

  // "c", "c;DA", "c;DB" or "c;DADB" (DA always renders before DB).
  std::string Render() const;

  friend bool operator==(const AttributedGrapheme &,
                         const AttributedGrapheme &) = default;
};

struct LexiconEntry {
  std::string word;  // original orthographic token, case preserved
  std::vector<AttributedGrapheme> units;  // non-empty

  std::string RenderUnits() const;  // units joined by single spaces

  friend bool operator==(const LexiconEntry &, const LexiconEntry &) = default;
};

// Decomposes an orthographic token into attributed graphemes. Letters are
// lowercased in input order. A period right after a letter marks that letter
// DB; an apostrophe marks the nearest preceding letter DA (or the nearest
// following letter when the word starts with the apostrophe); hyphens are
// dropped. Periods, apostrophes and hyphens never emit units of their own.
// With mark_attributes off all attribute flags stay clear.
// Throws DataError for a token without letters (naming the token) or for a
// disallowed character (naming its 1-based position).
std::vector<AttributedGrapheme> WordToGraphemes(std::string_view word,
                                                bool mark_attributes);

struct Rejection {
  std::string word;
  std::string reason;
};

struct LexiconBuild {
  std::vector<LexiconEntry> entries;     // sorted by word byte order
  std::vector<Rejection> rejections;     // sorted by word byte order
};

// Batch wrapper over WordToGraphemes: duplicates collapse, rejected words are
// collected with reasons instead of aborting the build.
LexiconBuild BuildLexicon(const std::vector<std::string> &words,
                          bool mark_attributes);

enum class ContextMode { kMono, kLeftBi };

// Word-boundary symbol for left-context units; cannot collide with a-z.
inline constexpr std::string_view kBoundarySymbol = "#";

// Acoustic unit inventory extracted from a lexicon. In mono mode `left` is
// empty; in left-bi mode `left` is the preceding unit symbol within the word,
// or the boundary symbol for a word-initial unit. Contexts never cross word
// boundaries.
struct UnitInventory {
  ContextMode context = ContextMode::kMono;
  std::set<std::pair<std::string, std::string>> units;  // (left, unit)

  std::set<std::string> SecondPositionSymbols() const;
  // One unit per line, sorted: "m" (mono) or "# m" / "m o" (left-bi).
  std::string Render() const;
};

// Throws std::invalid_argument for an empty lexicon.
UnitInventory ContextUnits(const std::vector<LexiconEntry> &lexicon,
                           ContextMode mode);

// Lexicon file: UTF-8 lines "word<TAB>unit unit ...". Rendering sorts by
// word; parsing is strict and round-trips bit-exactly.
std::string RenderLexicon(const std::vector<LexiconEntry> &entries);
std::vector<LexiconEntry> ParseLexicon(const std::string &text,
                                       const std::string &filename);

// Word list file: one token per line, blank lines skipped.
std::vector<std::string> ParseWordList(const std::string &text);

}  // namespace combkit

#endif  // COMBKIT_GRAPHEME_LEXICON_H_
