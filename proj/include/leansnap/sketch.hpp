#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leansnap::sketch {

// Column counting for reported positions. Utf16 matches what language
// servers exchange (UTF-16 code units); Codepoint counts Unicode scalars.
enum class ColumnUnit { Utf16, Codepoint };

// One proof hole: a `sorry` token in executable source.
struct SorrySite {
  int line = 0;       // 0-based
  int character = 0;  // 0-based column, in the document's ColumnUnit
  int hole_index = 0;
  std::size_t byte_offset = 0;

  bool operator==(const SorrySite&) const = default;
};

class SketchError : public std::runtime_error {
 public:
  enum class Kind {
    NoTheoremFound,
    MultipleTheorems,
    UndelimitedHeader,
    StaleSite,
  };

  SketchError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// True for characters that may continue an identifier: ASCII letters,
// digits, underscore, apostrophe, and subscripts U+2080..U+209C. A `sorry`
// adjacent to one of these is part of a longer name, not a hole.
bool is_identifier_continuation(std::uint32_t codepoint);

// Scans source text for `sorry` tokens, skipping line comments (`--`),
// nested block comments (`/- -/`), and string literals. Sites come back in
// document order, hole_index counting from 0.
std::vector<SorrySite> find_sorry_positions(std::string_view text,
                                            ColumnUnit unit = ColumnUnit::Utf16);

// Replaces the `sorry` at site with the given tactic text. The token must
// still be a bare `sorry` at the recorded byte offset (StaleSite otherwise).
std::string substitute_tactic(std::string_view text, const SorrySite& site,
                              std::string_view tactic);

// Replaces the header of llm_sketch (from its `theorem` keyword through the
// first `:=` at bracket depth zero) with the header of formal_statement,
// leaving the proof body untouched. Each input must contain exactly one
// theorem declaration with a delimited header.
std::string splice_header(std::string_view formal_statement,
                          std::string_view llm_sketch);

// Source text plus its line index and cached hole scan.
class SketchDocument {
 public:
  explicit SketchDocument(std::string text,
                          ColumnUnit unit = ColumnUnit::Utf16);

  const std::string& text() const { return text_; }
  ColumnUnit unit() const { return unit_; }
  const std::vector<SorrySite>& holes() const { return holes_; }

  // Byte offset for a (line, character) position, or nullopt when the
  // position is past the end of its line or the document.
  std::optional<std::size_t> offset_of(int line, int character) const;

  // New document with hole_index replaced by the tactic text.
  SketchDocument substitute(int hole_index, std::string_view tactic) const;

 private:
  std::string text_;
  ColumnUnit unit_;
  std::vector<std::size_t> line_starts_;
  std::vector<SorrySite> holes_;
};

}  // namespace leansnap::sketch
