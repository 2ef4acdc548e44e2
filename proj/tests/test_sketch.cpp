#include <doctest.h>

#include <random>
#include <string>

#include "leansnap/sketch.hpp"
#include "support/oracles.hpp"

using namespace leansnap;
using sketch::ColumnUnit;

TEST_CASE("single hole at the token start") {
  auto sites = sketch::find_sorry_positions("theorem t : 1 = 1 := by sorry");
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].line == 0);
  CHECK(sites[0].character == 24);
  CHECK(sites[0].hole_index == 0);
  CHECK(sites[0].byte_offset == 24);
}

TEST_CASE("comments and strings do not contribute holes") {
  CHECK(sketch::find_sorry_positions("-- sorry\nexample := by sorry").size() ==
        1);
  CHECK(sketch::find_sorry_positions("/- sorry -/").empty());
  CHECK(sketch::find_sorry_positions("/- a /- sorry -/ still -/").empty());
  CHECK(sketch::find_sorry_positions("x := \"sorry\"").empty());
  CHECK(sketch::find_sorry_positions("x := \"\\\" sorry\"").empty());
  SUBCASE("block comment close inside a nested level") {
    auto sites = sketch::find_sorry_positions("/- /- -/ sorry -/\nsorry");
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].line == 1);
  }
}

TEST_CASE("identifier substrings are not holes") {
  CHECK(sketch::find_sorry_positions("exact sorryAx _").empty());
  CHECK(sketch::find_sorry_positions("have mysorry := 1").empty());
  CHECK(sketch::find_sorry_positions("sorry' = 1").empty());
  // Subscripts continue identifiers.
  CHECK(sketch::find_sorry_positions("have sorry₁ := 1").empty());
  // Punctuation does not.
  CHECK(sketch::find_sorry_positions("(sorry)").size() == 1);
  CHECK(sketch::find_sorry_positions("sorry;sorry").size() == 2);
}

TEST_CASE("no holes at all") {
  CHECK(sketch::find_sorry_positions("theorem t : True := trivial").empty());
  CHECK(sketch::find_sorry_positions("").empty());
}

TEST_CASE("columns count UTF-16 code units by default") {
  // h₁ is one UTF-16 unit; \U0001D53D takes two.
  std::string text = "have h₁\U0001D53D := sorry";
  auto utf16 = sketch::find_sorry_positions(text, ColumnUnit::Utf16);
  auto scalar = sketch::find_sorry_positions(text, ColumnUnit::Codepoint);
  REQUIRE(utf16.size() == 1);
  REQUIRE(scalar.size() == 1);
  CHECK(utf16[0].character == scalar[0].character + 1);
  CHECK(utf16[0].byte_offset == scalar[0].byte_offset);
}

TEST_CASE("scanner agrees with the brute-force oracle on 1000 documents") {
  std::mt19937_64 rng(20260822);
  for (int k = 0; k < 1000; ++k) {
    std::string doc = testing::random_document(rng);
    ColumnUnit unit = k % 2 == 0 ? ColumnUnit::Utf16 : ColumnUnit::Codepoint;
    auto got = sketch::find_sorry_positions(doc, unit);
    auto want = testing::oracle_scan(doc, unit);
    REQUIRE_MESSAGE(got == want, "doc #", k);
  }
}

TEST_CASE("substitution replaces exactly one hole") {
  std::string text = "theorem t : p \xe2\x88\xa7 q := by\n  sorry\n  sorry\n";
  auto sites = sketch::find_sorry_positions(text);
  REQUIRE(sites.size() == 2);
  std::string patched = sketch::substitute_tactic(text, sites[0], "norm_num");
  auto rest = sketch::find_sorry_positions(patched);
  REQUIRE(rest.size() == 1);
  // Hole 1 lives on its own line, so its position is untouched.
  CHECK(rest[0].line == sites[1].line);
  CHECK(rest[0].character == sites[1].character);

  SUBCASE("substituting every hole empties the scan") {
    std::string all = patched;
    while (true) {
      auto holes = sketch::find_sorry_positions(all);
      if (holes.empty()) break;
      all = sketch::substitute_tactic(all, holes[0], "omega");
    }
    CHECK(sketch::find_sorry_positions(all).empty());
    CHECK(all.find("omega") != std::string::npos);
  }
}

TEST_CASE("stale positions are rejected") {
  std::string text = "example := by sorry\n";
  auto sites = sketch::find_sorry_positions(text);
  REQUIRE(sites.size() == 1);
  std::string edited = "example := by  sorry\n";  // shifted by one column
  CHECK_THROWS_AS(sketch::substitute_tactic(edited, sites[0], "simp"),
                  sketch::SketchError);
  try {
    sketch::substitute_tactic(edited, sites[0], "simp");
  } catch (const sketch::SketchError& e) {
    CHECK(e.kind() == sketch::SketchError::Kind::StaleSite);
  }
}

TEST_CASE("header splice restores mangled identifiers byte-for-byte") {
  std::string formal =
      "theorem abs_nonneg (h₁ : x ≤ 0) (h₂ : 0 ≤ x) :"
      " x = (0 : ℝ) := by\n  sorry\n";
  std::string sketchv =
      "theorem abs_nonneg (h1 : x <= 0) (h2 : 0 <= x) : x = (0 : R) := by\n"
      "  have step := le_antisymm h1 h2\n  sorry\n";
  std::string spliced = sketch::splice_header(formal, sketchv);
  // Header comes from the formal statement...
  CHECK(spliced.find("h₁ : x ≤ 0") != std::string::npos);
  CHECK(spliced.find("(0 : ℝ)") != std::string::npos);
  CHECK(spliced.find("h1 : x <= 0") == std::string::npos);
  // ...and the body is carried over unchanged.
  CHECK(spliced.find("have step := le_antisymm h1 h2") != std::string::npos);

  std::string formal_header = formal.substr(0, formal.find(":=") + 2);
  CHECK(spliced.substr(0, formal_header.size()) == formal_header);

  SUBCASE("identical header is a fixed point") {
    CHECK(sketch::splice_header(formal, formal) == formal);
  }
}

TEST_CASE("splice preserves the body bytes after the delimiter") {
  std::string formal = "theorem t (n : ℕ) : n + 0 = n := by simp\n";
  std::string sketchv =
      "theorem t (n : Nat) : n + 0 = n := by\n  rw [Nat.add_zero]\n";
  std::string spliced = sketch::splice_header(formal, sketchv);
  auto body_of = [](const std::string& s) {
    return s.substr(s.find(":=") + 2);
  };
  CHECK(body_of(spliced) == body_of(sketchv));
}

TEST_CASE("splice failure modes") {
  CHECK_THROWS_AS(sketch::splice_header("theorem a : T := x", "example := 1"),
                  sketch::SketchError);
  CHECK_THROWS_AS(
      sketch::splice_header("theorem a : T := x",
                            "theorem a := 1\ntheorem b := 2"),
      sketch::SketchError);
  // := hidden inside a bracket never closes the header.
  CHECK_THROWS_AS(
      sketch::splice_header("theorem a : T := x", "theorem b (h : p := q)"),
      sketch::SketchError);
  try {
    sketch::splice_header("theorem a : T := x", "example := 1");
  } catch (const sketch::SketchError& e) {
    CHECK(e.kind() == sketch::SketchError::Kind::NoTheoremFound);
  }
}

TEST_CASE("the := delimiter respects bracket depth, including math brackets") {
  std::string formal = "theorem t : T := by sorry";
  std::string sketchv =
      "theorem t (v : Vec ⟨fun x := x⟩ n) : T := by exact w";
  // The := inside ⟨ ⟩ must not end the header.
  std::string spliced = sketch::splice_header(formal, sketchv);
  CHECK(spliced == "theorem t : T := by exact w");
}

TEST_CASE("sketch document caches holes and maps positions to offsets") {
  sketch::SketchDocument doc("a\n  sorry\nb := sorry\n");
  REQUIRE(doc.holes().size() == 2);
  auto off = doc.offset_of(doc.holes()[1].line, doc.holes()[1].character);
  REQUIRE(off.has_value());
  CHECK(*off == doc.holes()[1].byte_offset);
  CHECK_FALSE(doc.offset_of(0, 99).has_value());
  CHECK_FALSE(doc.offset_of(42, 0).has_value());

  auto sub = doc.substitute(0, "simp");
  CHECK(sub.holes().size() == 1);
  CHECK(doc.holes().size() == 2);  // original untouched
}
