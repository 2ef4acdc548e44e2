#include "leansnap/sketch.hpp"

#include <algorithm>
#include <utility>

namespace leansnap::sketch {

namespace {

constexpr std::string_view kSorry = "sorry";
constexpr std::string_view kTheorem = "theorem";

// Decodes the UTF-8 sequence starting at i. Invalid bytes decode as U+FFFD
// with length 1 so the scanner keeps moving on garbage input.
std::uint32_t decode_utf8(std::string_view s, std::size_t i,
                          std::size_t& len) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  int extra;
  std::uint32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1Fu;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0Fu;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07u;
  } else {
    len = 1;
    return 0xFFFD;
  }
  if (i + static_cast<std::size_t>(extra) >= s.size()) {
    len = 1;
    return 0xFFFD;
  }
  for (int k = 1; k <= extra; ++k) {
    unsigned char b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      len = 1;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3Fu);
  }
  len = static_cast<std::size_t>(extra) + 1;
  return cp;
}

// Byte index where the codepoint ending just before i starts.
std::size_t prev_codepoint_start(std::string_view s, std::size_t i) {
  std::size_t p = i - 1;
  while (p > 0 && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) --p;
  return p;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

// Byte ranges covered by line comments, block comments (nested), and string
// literals. Non-overlapping, in document order.
std::vector<Span> masked_spans(std::string_view s) {
  std::vector<Span> spans;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    char c = s[i];
    if (c == '-' && i + 1 < n && s[i + 1] == '-') {
      std::size_t start = i;
      i += 2;
      while (i < n && s[i] != '\n') ++i;
      spans.push_back({start, i});
    } else if (c == '/' && i + 1 < n && s[i + 1] == '-') {
      std::size_t start = i;
      i += 2;
      int depth = 1;
      while (i < n && depth > 0) {
        if (s[i] == '/' && i + 1 < n && s[i + 1] == '-') {
          ++depth;
          i += 2;
        } else if (s[i] == '-' && i + 1 < n && s[i + 1] == '/') {
          --depth;
          i += 2;
        } else {
          ++i;
        }
      }
      spans.push_back({start, i});
    } else if (c == '"') {
      std::size_t start = i;
      ++i;
      while (i < n) {
        if (s[i] == '\\' && i + 1 < n) {
          i += 2;
        } else if (s[i] == '"') {
          ++i;
          break;
        } else {
          ++i;
        }
      }
      spans.push_back({start, i});
    } else {
      ++i;
    }
  }
  return spans;
}

bool intersects_mask(const std::vector<Span>& spans, std::size_t lo,
                     std::size_t hi) {
  auto it = std::lower_bound(
      spans.begin(), spans.end(), lo,
      [](const Span& sp, std::size_t v) { return sp.end <= v; });
  return it != spans.end() && it->begin < hi;
}

// If i falls inside a masked span, returns that span's end; otherwise i.
std::size_t skip_mask(const std::vector<Span>& spans, std::size_t i) {
  auto it = std::lower_bound(
      spans.begin(), spans.end(), i,
      [](const Span& sp, std::size_t v) { return sp.end <= v; });
  if (it != spans.end() && it->begin <= i) return it->end;
  return i;
}

bool clear_before(std::string_view s, std::size_t i) {
  if (i == 0) return true;
  std::size_t p = prev_codepoint_start(s, i);
  std::size_t len;
  return !is_identifier_continuation(decode_utf8(s, p, len));
}

bool clear_after(std::string_view s, std::size_t j) {
  if (j >= s.size()) return true;
  std::size_t len;
  return !is_identifier_continuation(decode_utf8(s, j, len));
}

// Occurrences of an identifier-like token outside masked regions.
std::vector<std::size_t> token_occurrences(std::string_view s,
                                           std::string_view token,
                                           const std::vector<Span>& spans) {
  std::vector<std::size_t> out;
  std::size_t from = 0;
  for (;;) {
    std::size_t i = s.find(token, from);
    if (i == std::string_view::npos) break;
    from = i + 1;
    if (intersects_mask(spans, i, i + token.size())) continue;
    if (!clear_before(s, i) || !clear_after(s, i + token.size())) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> line_start_offsets(std::string_view s) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') starts.push_back(i + 1);
  }
  return starts;
}

int column_units(std::string_view s, std::size_t line_start, std::size_t off,
                 ColumnUnit unit) {
  int col = 0;
  std::size_t i = line_start;
  while (i < off) {
    std::size_t len;
    std::uint32_t cp = decode_utf8(s, i, len);
    i += len;
    col += (unit == ColumnUnit::Utf16 && cp >= 0x10000) ? 2 : 1;
  }
  return col;
}

// Header extent of the single theorem declaration in text: from the
// `theorem` keyword through the first `:=` at bracket depth zero.
std::pair<std::size_t, std::size_t> header_extent(std::string_view s) {
  auto spans = masked_spans(s);
  auto decls = token_occurrences(s, kTheorem, spans);
  if (decls.empty()) {
    throw SketchError(SketchError::Kind::NoTheoremFound,
                      "no theorem declaration found");
  }
  if (decls.size() > 1) {
    throw SketchError(SketchError::Kind::MultipleTheorems,
                      "expected exactly one theorem declaration, found " +
                          std::to_string(decls.size()));
  }
  std::size_t i = decls[0] + kTheorem.size();
  long depth = 0;
  while (i < s.size()) {
    std::size_t skipped = skip_mask(spans, i);
    if (skipped != i) {
      i = skipped;
      continue;
    }
    std::size_t len;
    std::uint32_t cp = decode_utf8(s, i, len);
    switch (cp) {
      case '(':
      case '[':
      case '{':
      case 0x27E8:  // left angle bracket
        ++depth;
        break;
      case ')':
      case ']':
      case '}':
      case 0x27E9:
        --depth;
        break;
      case ':':
        if (depth == 0 && i + 1 < s.size() && s[i + 1] == '=') {
          return {decls[0], i + 2};
        }
        break;
      default:
        break;
    }
    i += len;
  }
  throw SketchError(SketchError::Kind::UndelimitedHeader,
                    "theorem header has no := at bracket depth zero");
}

}  // namespace

bool is_identifier_continuation(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  if (cp >= 'a' && cp <= 'z') return true;
  if (cp >= '0' && cp <= '9') return true;
  if (cp == '_' || cp == '\'') return true;
  return cp >= 0x2080 && cp <= 0x209C;  // subscript block
}

std::vector<SorrySite> find_sorry_positions(std::string_view text,
                                            ColumnUnit unit) {
  auto spans = masked_spans(text);
  auto offsets = token_occurrences(text, kSorry, spans);
  auto lines = line_start_offsets(text);
  std::vector<SorrySite> sites;
  sites.reserve(offsets.size());
  int hole = 0;
  for (std::size_t off : offsets) {
    auto it = std::upper_bound(lines.begin(), lines.end(), off);
    std::size_t line_idx = static_cast<std::size_t>(it - lines.begin()) - 1;
    SorrySite site;
    site.line = static_cast<int>(line_idx);
    site.character = column_units(text, lines[line_idx], off, unit);
    site.hole_index = hole++;
    site.byte_offset = off;
    sites.push_back(site);
  }
  return sites;
}

std::string substitute_tactic(std::string_view text, const SorrySite& site,
                              std::string_view tactic) {
  std::size_t off = site.byte_offset;
  bool intact = off + kSorry.size() <= text.size() &&
                text.substr(off, kSorry.size()) == kSorry &&
                clear_before(text, off) &&
                clear_after(text, off + kSorry.size()) &&
                !intersects_mask(masked_spans(text), off, off + kSorry.size());
  if (!intact) {
    throw SketchError(SketchError::Kind::StaleSite,
                      "no sorry token at byte offset " + std::to_string(off));
  }
  std::string out;
  out.reserve(text.size() + tactic.size());
  out += text.substr(0, off);
  out += tactic;
  out += text.substr(off + kSorry.size());
  return out;
}

std::string splice_header(std::string_view formal_statement,
                          std::string_view llm_sketch) {
  auto [fs, fe] = header_extent(formal_statement);
  auto [ss, se] = header_extent(llm_sketch);
  std::string out;
  out.reserve(llm_sketch.size() + (fe - fs));
  out += llm_sketch.substr(0, ss);
  out += formal_statement.substr(fs, fe - fs);
  out += llm_sketch.substr(se);
  return out;
}

SketchDocument::SketchDocument(std::string text, ColumnUnit unit)
    : text_(std::move(text)),
      unit_(unit),
      line_starts_(line_start_offsets(text_)),
      holes_(find_sorry_positions(text_, unit)) {}

std::optional<std::size_t> SketchDocument::offset_of(int line,
                                                     int character) const {
  if (line < 0 || character < 0) return std::nullopt;
  std::size_t li = static_cast<std::size_t>(line);
  if (li >= line_starts_.size()) return std::nullopt;
  std::size_t i = line_starts_[li];
  std::size_t line_end =
      li + 1 < line_starts_.size() ? line_starts_[li + 1] - 1 : text_.size();
  int col = 0;
  while (col < character) {
    if (i >= line_end) return std::nullopt;
    std::size_t len;
    std::uint32_t cp = decode_utf8(text_, i, len);
    i += len;
    col += (unit_ == ColumnUnit::Utf16 && cp >= 0x10000) ? 2 : 1;
  }
  if (col != character) return std::nullopt;  // landed inside a surrogate pair
  return i;
}

SketchDocument SketchDocument::substitute(int hole_index,
                                          std::string_view tactic) const {
  if (hole_index < 0 ||
      static_cast<std::size_t>(hole_index) >= holes_.size()) {
    throw std::out_of_range("hole index " + std::to_string(hole_index) +
                            " out of range");
  }
  return SketchDocument(
      substitute_tactic(text_, holes_[static_cast<std::size_t>(hole_index)],
                        tactic),
      unit_);
}

}  // namespace leansnap::sketch
