#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "leansnap/bench.hpp"

using namespace leansnap;
namespace fs = std::filesystem;

namespace {

fs::path source_dir() {
  const char* env = std::getenv("LEANSNAP_SOURCE_DIR");
  REQUIRE_MESSAGE(env != nullptr, "LEANSNAP_SOURCE_DIR must point at the repo");
  return fs::path(env);
}

fs::path shipped_corpus() { return source_dir() / "corpus" / "suite.jsonc"; }

struct TmpDir {
  fs::path path;
  TmpDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("leansnap-bench-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TmpDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    fs::path p = path / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
  }
};

// Minimal single-problem corpus used by the error-path tests.
std::string tiny_corpus(const std::string& problem_fields) {
  return "{\n"
         "  // comments are allowed\n"
         "  \"version\": 1,\n"
         "  \"problems\": [\n"
         "    { \"id\": \"unit\", " + problem_fields + " }\n"
         "  ]\n"
         "}\n";
}

const char* kUnitBody =
    "\"sketch\": \"theorem unit : True := by\\n  sorry\\n\", "
    "\"importSeconds\": 10, \"bodySeconds\": 5, "
    "\"fallbackBranchSeconds\": 10, "
    "\"holes\": [ { \"line\": 1, \"character\": 2, "
    "\"tactics\": { \"aesop\": { \"closes\": true, \"cpuMs\": 0 } } } ]";

bench::Corpus unit_corpus() {
  TmpDir tmp;
  return bench::load_corpus(tmp.write("unit.jsonc", tiny_corpus(kUnitBody)));
}

}  // namespace

TEST_CASE("shipped corpus loads with the published shape") {
  auto corpus = bench::load_corpus(shipped_corpus());
  CHECK(corpus.version == 1);
  CHECK(corpus.problems.size() == 48);

  int end_to_end = 0, synthetic = 0;
  std::set<std::string> ids;
  for (const auto& p : corpus.problems) {
    ids.insert(p.id);
    if (p.kind == "end_to_end") ++end_to_end;
    if (p.synthetic) ++synthetic;
    CHECK(p.fallback_branch_seconds >= p.import_seconds);
    CHECK(!p.holes.empty());
  }
  CHECK(ids.size() == 48);
  CHECK(end_to_end == 3);
  CHECK(synthetic == 32);

  auto* nt345 = corpus.find("mathd_numbertheory_345");
  REQUIRE(nt345 != nullptr);
  CHECK(nt345->hole_count() == 5);
  CHECK(nt345->kind == "end_to_end");
  auto* nt3 = corpus.find("mathd_numbertheory_3");
  REQUIRE(nt3 != nullptr);
  CHECK(nt3->hole_count() == 3);
  auto* alg478 = corpus.find("mathd_algebra_478");
  REQUIRE(alg478 != nullptr);
  CHECK(alg478->hole_count() == 4);
  CHECK(corpus.find("no_such_theorem") == nullptr);

  CHECK(corpus.defaults.fit.native_base == doctest::Approx(120.0));
  CHECK(corpus.defaults.fit.native_per_branch == doctest::Approx(0.045));
  CHECK(corpus.defaults.fit.fallback_per_branch == doctest::Approx(75.0));
  CHECK(corpus.defaults.cost.t_load == doctest::Approx(75.0));
}

TEST_CASE("corpus loader rejects malformed inputs") {
  TmpDir tmp;
  using Kind = bench::CorpusError::Kind;
  auto expect = [&](const std::string& text, Kind kind) {
    auto p = tmp.write("bad.jsonc", text);
    try {
      bench::load_corpus(p);
      FAIL_CHECK("load_corpus accepted a bad corpus");
    } catch (const bench::CorpusError& e) {
      CHECK(e.kind() == kind);
    }
  };

  SUBCASE("missing file") {
    try {
      bench::load_corpus(tmp.path / "absent.jsonc");
      FAIL_CHECK("expected an error");
    } catch (const bench::CorpusError& e) {
      CHECK(e.kind() == Kind::Io);
    }
  }
  SUBCASE("not json") { expect("{ nope", Kind::Parse); }
  SUBCASE("declared hole where the sketch has none") {
    std::string body = kUnitBody;
    auto pos = body.find("sorry");
    body.replace(pos, 5, "admit");  // scanner will find nothing
    expect(tiny_corpus(body), Kind::HoleMismatch);
  }
  SUBCASE("hole position off by one column") {
    std::string body = kUnitBody;
    auto pos = body.find("\"character\": 2");
    body.replace(pos, 14, "\"character\": 3");
    expect(tiny_corpus(body), Kind::HoleMismatch);
  }
  SUBCASE("duplicate problem id") {
    std::string text =
        "{ \"version\": 1, \"problems\": [ { \"id\": \"unit\", " +
        std::string(kUnitBody) + " }, { \"id\": \"unit\", " + kUnitBody +
        " } ] }";
    expect(text, Kind::DuplicateId);
  }
  SUBCASE("rebuild cheaper than its own import is inconsistent") {
    std::string body = kUnitBody;
    auto pos = body.find("\"fallbackBranchSeconds\": 10");
    body.replace(pos, 27, "\"fallbackBranchSeconds\": 4");
    expect(tiny_corpus(body), Kind::Validation);
  }
  SUBCASE("no sketch at all") {
    std::string body = kUnitBody;
    auto start = body.find("\"sketch\"");
    auto end = body.find("\"importSeconds\"");
    body.erase(start, end - start);
    expect(tiny_corpus(body), Kind::Validation);
  }
  SUBCASE("sketchFile resolves relative to the corpus") {
    tmp.write("unit.lean", "theorem unit : True := by\n  sorry\n");
    std::string body = kUnitBody;
    auto start = body.find("\"sketch\":");
    auto end = body.find(", \"importSeconds\"");
    body.replace(start, end - start, "\"sketchFile\": \"unit.lean\"");
    auto corpus = bench::load_corpus(tmp.write("ok.jsonc", tiny_corpus(body)));
    REQUIRE(corpus.problems.size() == 1);
    CHECK(corpus.problems[0].sketch_text.find("sorry") != std::string::npos);
  }
  SUBCASE("empty problem list is a valid corpus") {
    auto corpus = bench::load_corpus(
        tmp.write("empty.jsonc", "{ \"version\": 1, \"problems\": [] }"));
    CHECK(corpus.problems.empty());
  }
}

TEST_CASE("run_suite on a one-problem corpus") {
  auto corpus = unit_corpus();
  bench::RunOptions opts;

  SUBCASE("both paths, derived two-worker pool") {
    auto rows = bench::run_suite(corpus, opts);
    REQUIRE(rows.size() == 1);
    const auto& r = rows[0];
    CHECK_FALSE(r.error.has_value());
    CHECK(r.theorem == "unit");
    CHECK(r.holes == 1);
    CHECK(r.branches == 7);
    // import + body + batch latency (cpu is zero everywhere)
    REQUIRE(r.native_s.has_value());
    CHECK(*r.native_s == doctest::Approx(16.0));
    // seven 10 s branches over the derived W=2 pool: four rounds
    REQUIRE(r.fallback_s.has_value());
    CHECK(*r.fallback_s == doctest::Approx(40.0));
    REQUIRE(r.speedup.has_value());
    CHECK(*r.speedup == doctest::Approx(2.5));
    REQUIRE(r.overhead_frac.has_value());
    CHECK(*r.overhead_frac == doctest::Approx(1.0));
    REQUIRE(r.mem_native_gb.has_value());
    CHECK(*r.mem_native_gb == doctest::Approx(3.2 + 7 * 8.0e-6));
    REQUIRE(r.mem_fallback_gb.has_value());
    CHECK(*r.mem_fallback_gb == doctest::Approx(6.0));
  }
  SUBCASE("native only") {
    opts.mode = bench::RunMode::Native;
    auto rows = bench::run_suite(corpus, opts);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].native_s.has_value());
    CHECK_FALSE(rows[0].fallback_s.has_value());
    CHECK_FALSE(rows[0].speedup.has_value());
  }
  SUBCASE("fallback only") {
    opts.mode = bench::RunMode::Fallback;
    auto rows = bench::run_suite(corpus, opts);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].native_s.has_value());
    CHECK(rows[0].fallback_s.has_value());
  }
  SUBCASE("explicit single worker serializes the pool") {
    opts.workers = 1;
    auto rows = bench::run_suite(corpus, opts);
    REQUIRE(rows.size() == 1);
    CHECK(*rows[0].fallback_s == doctest::Approx(70.0));
  }
}

TEST_CASE("end-to-end rows reproduce the published wall times") {
  auto corpus = bench::load_corpus(shipped_corpus());
  bench::RunOptions opts;
  opts.workers = 1;
  auto rows = bench::run_suite(corpus, opts);
  REQUIRE(rows.size() == 48);

  struct Want {
    const char* id;
    double native, fallback, ratio;
  };
  const Want wants[] = {
      {"mathd_numbertheory_345", 132.8, 2641.4, 19.9},
      {"mathd_numbertheory_3", 116.2, 1572.4, 13.5},
      {"mathd_algebra_478", 119.9, 1579.6, 13.2},
  };
  for (const auto& w : wants) {
    const bench::ReportRow* row = nullptr;
    for (const auto& r : rows)
      if (r.theorem == w.id) row = &r;
    REQUIRE_MESSAGE(row != nullptr, w.id);
    REQUIRE(row->native_s.has_value());
    REQUIRE(row->fallback_s.has_value());
    REQUIRE(row->speedup.has_value());
    CHECK(*row->native_s == doctest::Approx(w.native).epsilon(0.02));
    CHECK(*row->fallback_s == doctest::Approx(w.fallback).epsilon(0.02));
    CHECK(*row->speedup == doctest::Approx(w.ratio).epsilon(0.02));
  }
}

TEST_CASE("suite aggregates match the published group means") {
  auto corpus = bench::load_corpus(shipped_corpus());
  bench::RunOptions opts;
  opts.workers = 1;
  auto rows = bench::run_suite(corpus, opts);
  auto stats = bench::summarize(rows, corpus);

  CHECK(stats.grouped_count == 45);
  REQUIRE(stats.groups.size() == 5);
  int expected_holes[] = {1, 2, 3, 4, 5};
  int expected_count[] = {5, 19, 11, 7, 3};
  double expected_speedup[] = {7.9, 9.4, 13.8, 24.6, 29.8};
  for (std::size_t i = 0; i < stats.groups.size(); ++i) {
    const auto& g = stats.groups[i];
    CHECK(g.holes == expected_holes[i]);
    CHECK(g.count == expected_count[i]);
    CHECK(g.speedup_mean == doctest::Approx(expected_speedup[i]));
    CHECK(g.speedup_min <= g.speedup_mean);
    CHECK(g.speedup_max >= g.speedup_mean);
  }
  CHECK(stats.speedup_mean == doctest::Approx(14.0).epsilon(0.005));
  CHECK(stats.speedup_median == doctest::Approx(9.7));
  CHECK(stats.holes_mean == doctest::Approx(2.644).epsilon(0.001));
  CHECK(stats.branches_mean == doctest::Approx(18.511).epsilon(0.001));
  CHECK(stats.total_branches == 833);

  // The suite mean is the mean of its own rows, no more and no less.
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    const auto* p = corpus.find(r.theorem);
    if (p->kind == "end_to_end") continue;
    REQUIRE(r.speedup.has_value());
    sum += *r.speedup;
    ++n;
  }
  CHECK(n == 45);
  CHECK(stats.speedup_mean == doctest::Approx(sum / n));
}

TEST_CASE("csv report round-trips through the verifier") {
  auto corpus = unit_corpus();
  auto rows = bench::run_suite(corpus, bench::RunOptions{});
  std::string csv = bench::report_csv(rows);

  CHECK(csv.rfind(bench::kCsvHeader, 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  TmpDir tmp;
  auto path = tmp.write("expected.csv", csv);
  auto outcome = bench::verify_against_expected(rows, path, 0.01);
  CHECK(outcome.ok);
  CHECK(outcome.rows_checked == 1);
  CHECK(outcome.failures.empty());
}

TEST_CASE("verifier flags drift and missing rows") {
  auto corpus = unit_corpus();
  auto rows = bench::run_suite(corpus, bench::RunOptions{});
  TmpDir tmp;

  SUBCASE("a 10 percent error breaks a 5 percent tolerance") {
    auto path = tmp.write("expected.csv",
                          "theorem,native_s,fallback_s\nunit,17.6,40\n");
    auto outcome = bench::verify_against_expected(rows, path, 0.05);
    CHECK_FALSE(outcome.ok);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].find("native_s") != std::string::npos);
  }
  SUBCASE("blank cells and comment lines are skipped") {
    auto path = tmp.write("expected.csv",
                          "# published walls\ntheorem,native_s,speedup\n"
                          "unit,16,\n");
    auto outcome = bench::verify_against_expected(rows, path, 0.01);
    CHECK(outcome.ok);
  }
  SUBCASE("expected row absent from the run") {
    auto path = tmp.write("expected.csv",
                          "theorem,native_s\nunit,16\nghost,1\n");
    try {
      bench::verify_against_expected(rows, path, 0.05);
      FAIL_CHECK("expected MissingRow");
    } catch (const bench::CorpusError& e) {
      CHECK(e.kind() == bench::CorpusError::Kind::Validation);
      CHECK(std::string(e.what()).find("MissingRow: ghost") !=
            std::string::npos);
    }
  }
  SUBCASE("unknown column name is rejected") {
    auto path = tmp.write("expected.csv", "theorem,bogus\nunit,1\n");
    CHECK_THROWS_AS(bench::verify_against_expected(rows, path, 0.05),
                    bench::CorpusError);
  }
}

TEST_CASE("text report aligns the same data") {
  auto corpus = unit_corpus();
  auto rows = bench::run_suite(corpus, bench::RunOptions{});
  std::string text = bench::report_text(rows);
  CHECK(text.find("theorem") != std::string::npos);
  CHECK(text.find("unit") != std::string::npos);
  CHECK(text.find("speedup") != std::string::npos);
}

TEST_CASE("suite runs are deterministic byte for byte") {
  auto corpus = bench::load_corpus(shipped_corpus());
  bench::RunOptions opts;
  opts.workers = 1;
  auto a = bench::report_csv(bench::run_suite(corpus, opts));
  auto b = bench::report_csv(bench::run_suite(corpus, opts));
  CHECK(a == b);
}

TEST_CASE("suite output matches the frozen golden table") {
  auto golden_path = source_dir() / "corpus" / "golden_suite.csv";
  REQUIRE_MESSAGE(fs::exists(golden_path),
                  "golden table missing; regenerate with the run subcommand "
                  "and freeze it under corpus/");
  std::ifstream in(golden_path, std::ios::binary);
  std::string golden((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());

  auto corpus = bench::load_corpus(shipped_corpus());
  auto rows = bench::run_suite(corpus, bench::RunOptions{});
  CHECK(bench::report_csv(rows) == golden);
}
