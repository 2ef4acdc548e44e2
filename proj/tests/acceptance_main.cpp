// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. CLI-facing criteria shell out to the bench binary; model-facing
// ones drive the libraries directly.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "leansnap/bench.hpp"
#include "leansnap/client.hpp"
#include "leansnap/model.hpp"
#include "leansnap/orchestrator.hpp"
#include "leansnap/sim_server.hpp"
#include "leansnap/sketch.hpp"
#include "leansnap/transport.hpp"
#include "support/oracles.hpp"

using namespace leansnap;

namespace {

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run_cli(const std::string& cmd) {
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int rc = ::pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool within(double actual, double expected, double tol) {
  double denom = std::abs(expected);
  if (denom == 0.0) return std::abs(actual) <= tol;
  return std::abs(actual - expected) / denom <= tol;
}

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
  void expect_near(const std::string& what, double actual, double expected,
                   double tol) {
    if (!within(actual, expected, tol)) {
      std::ostringstream os;
      os << what << ": got " << actual << ", want " << expected << " +-"
         << tol * 100 << "%";
      fail(os.str());
    }
  }
};

std::string q(const std::string& path) { return "'" + path + "'"; }

// ---- criterion 1: end-to-end wall times over the CLI -----------------------

std::map<std::string, std::vector<std::string>> parse_csv_rows(
    const std::string& out, Check& c) {
  std::map<std::string, std::vector<std::string>> rows;
  auto lines = split(out, '\n');
  if (lines.empty() || lines[0].rfind("theorem,", 0) != 0) {
    c.fail("missing csv header");
    return rows;
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cells = split(lines[i], ',');
    rows[cells[0]] = cells;
  }
  return rows;
}

Check criterion_end_to_end(const std::string& cli, const std::string& corpus) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  auto r = run_cli(cli + " run --corpus " + q(corpus) +
                   " --mode both --workers 1 --format csv");
  double real_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  c.expect(r.status == 0, "run exited " + std::to_string(r.status));
  auto rows = parse_csv_rows(r.out, c);

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
    auto it = rows.find(w.id);
    if (it == rows.end()) {
      c.fail(std::string("row missing: ") + w.id);
      continue;
    }
    const auto& cells = it->second;
    if (cells.size() < 6) {
      c.fail(std::string("short row: ") + w.id);
      continue;
    }
    c.expect_near(std::string(w.id) + ".native", std::stod(cells[3]), w.native,
                  0.02);
    c.expect_near(std::string(w.id) + ".fallback", std::stod(cells[4]),
                  w.fallback, 0.02);
    c.expect_near(std::string(w.id) + ".speedup", std::stod(cells[5]), w.ratio,
                  0.02);
  }
  c.expect(real_s < 5.0,
           "run took " + std::to_string(real_s) + " s of real time");
  return c;
}

// ---- criterion 2: scaling table --------------------------------------------

Check criterion_scaling(const std::string& cli, const std::string& corpus) {
  Check c;
  auto r = run_cli(cli + " project --corpus " + q(corpus));
  c.expect(r.status == 0, "project exited " + std::to_string(r.status));
  auto lines = split(r.out, '\n');
  c.expect(!lines.empty() && lines[0] == "B,native_s,fallback_s,speedup,source",
           "missing table header");

  std::map<int, std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cells = split(lines[i], ',');
    if (cells.size() == 5) rows[std::stoi(cells[0])] = cells;
  }

  struct Meas {
    int b;
    double native, fallback;
  };
  const Meas measured[] = {
      {21, 116.2, 1572.4}, {28, 119.9, 1579.6}, {35, 132.8, 2641.4}};
  for (const auto& m : measured) {
    auto it = rows.find(m.b);
    if (it == rows.end()) {
      c.fail("B=" + std::to_string(m.b) + " row missing");
      continue;
    }
    c.expect(it->second[4] == "measured",
             "B=" + std::to_string(m.b) + " not marked measured");
    c.expect_near("B=" + std::to_string(m.b) + ".native",
                  std::stod(it->second[1]), m.native, 0.05);
    c.expect_near("B=" + std::to_string(m.b) + ".fallback",
                  std::stod(it->second[2]), m.fallback, 0.05);
  }
  for (int b : {14, 42, 56}) {
    auto it = rows.find(b);
    if (it == rows.end()) {
      c.fail("B=" + std::to_string(b) + " row missing");
      continue;
    }
    c.expect(it->second[4] == "projected",
             "B=" + std::to_string(b) + " not marked projected");
    c.expect_near("B=" + std::to_string(b) + ".native",
                  std::stod(it->second[1]), 120.0 + 0.045 * b, 0.02);
    c.expect_near("B=" + std::to_string(b) + ".fallback",
                  std::stod(it->second[2]), 75.0 * b, 0.02);
  }
  return c;
}

// ---- criterion 3: crossover ------------------------------------------------

Check criterion_crossover(const std::string& cli, const std::string& corpus) {
  Check c;
  auto r = run_cli(cli + " crossover --corpus " + q(corpus) +
                   " --t-elab 120 --t-load 75 --t-tactic 0.045");
  c.expect(r.status == 0, "crossover exited " + std::to_string(r.status));
  c.expect(r.out == "B=2\n", "stdout was \"" + r.out + "\", want \"B=2\"");
  return c;
}

// ---- criterion 4: overhead fraction over the profiled problems -------------

Check criterion_overhead(const std::string& corpus_path) {
  Check c;
  auto corpus = bench::load_corpus(corpus_path);
  bench::RunOptions opts;
  opts.mode = bench::RunMode::Native;
  opts.workers = 1;
  auto rows = bench::run_suite(corpus, opts);

  int profiled = 0;
  double cpu_sum = 0.0, per_branch_sum = 0.0;
  for (const auto& p : corpus.problems) {
    if (p.synthetic) continue;
    ++profiled;
    double cpu_total_ms = 0.0;
    for (const auto& h : p.holes)
      for (const auto& [name, out] : h.tactics) cpu_total_ms += out.cpu_ms;
    double branches = p.hole_count() * 7.0;
    double mean_cpu = cpu_total_ms / 1000.0 / branches;
    cpu_sum += mean_cpu;
    double frac =
        model::overhead_fraction(p.fallback_branch_seconds + mean_cpu,
                                 mean_cpu);
    if (frac < 0.999) {
      std::ostringstream os;
      os << p.id << " overhead fraction " << frac << " < 0.999";
      c.fail(os.str());
    }
    for (const auto& r : rows) {
      if (r.theorem == p.id && r.native_s.has_value()) {
        per_branch_sum += *r.native_s / r.branches;
      }
    }
  }
  c.expect(profiled == 16,
           "expected 16 profiled problems, found " + std::to_string(profiled));
  if (profiled > 0) {
    c.expect_near("mean tactic cpu", cpu_sum / profiled, 0.045, 0.05);
    c.expect_near("mean native per branch", per_branch_sum / profiled, 6.8,
                  0.05);
  }
  return c;
}

// ---- criterion 5: caching-tier table ---------------------------------------

Check criterion_levels(const std::string& cli, const std::string& corpus) {
  Check c;
  auto r = run_cli(cli + " project --corpus " + q(corpus) + " --levels");
  c.expect(r.status == 0, "project --levels exited " +
                              std::to_string(r.status));
  double l0 = -1, l1 = -1, l2 = -1, l12 = -1, est = -1, meas = -1;
  for (const auto& line : split(r.out, '\n')) {
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag == "L0") is >> l0;
    if (tag == "L1") is >> l1;
    if (tag == "L2") is >> l2;
    if (tag == "L1+2") is >> l12;
    if (tag == "full-file") {
      // full-file rebuild: estimated <X> s, measured <Y> s (...)
      std::string word;
      while (is >> word) {
        if (word == "estimated") is >> est;
        if (word == "measured") is >> meas;
      }
    }
  }
  c.expect_near("L0", l0, 2641.0, 0.02);
  c.expect_near("L1", l1, 330.0, 0.10);
  c.expect_near("L2", l2, 133.0, 0.02);
  c.expect_near("L1+2", l12, 17.0, 0.10);
  c.expect(est > 0 && meas > 0, "rebuild line not found");
  if (est > 0 && meas > 0) {
    c.expect_near("rebuild estimate", est, 11130.0, 1e-6);
    c.expect(std::abs(est - meas) / meas <= 0.001,
             "rebuild estimate off measured by more than 0.1%");
  }
  return c;
}

// ---- criterion 6: campaign-scale projection --------------------------------

Check criterion_campaign(const std::string& cli, const std::string& corpus) {
  Check c;
  auto r = run_cli(cli + " project --corpus " + q(corpus) + " --sweep");
  c.expect(r.status == 0, "project --sweep exited " + std::to_string(r.status));
  long total = -1;
  double fb = -1, nat = -1;
  for (const auto& line : split(r.out, '\n')) {
    std::istringstream is(line);
    std::string tag;
    is >> tag;
    if (tag == "total_branches") is >> total;
    if (tag == "fallback_hours") is >> fb;
    if (tag == "native_hours") is >> nat;
  }
  c.expect(total == 2800, "total branches " + std::to_string(total));
  c.expect_near("fallback hours", fb, 29.0, 0.05);
  c.expect_near("native hours", nat, 3.4, 0.05);
  return c;
}

// ---- criterion 7: the two proving paths agree ------------------------------

Check criterion_equivalence() {
  Check c;
  std::mt19937_64 rng(424242);
  const auto& pf = orch::Portfolio::standard();
  for (int iter = 0; iter < 120 && c.ok; ++iter) {
    auto p = testing::random_profile(rng, pf.tactics);
    int workers = 1 + static_cast<int>(rng() % 4);

    sim::SimSession session;
    session.register_profile(p);
    sim::SimServer server(session);
    transport::ServedStream stream(
        [&](const wire::RpcEnvelope& e) { return server.handle(e); });
    client::SnapshotClient cl(stream);
    auto native = orch::prove_native(cl, p, pf);

    orch::FallbackPlan plan;
    plan.workers = workers;
    auto fallback = orch::prove_fallback(p, pf, plan);

    c.expect(native.proved == fallback.proved,
             p.id + ": proved flags differ");
    if (native.holes.size() != fallback.holes.size()) {
      c.fail(p.id + ": hole counts differ");
      break;
    }
    for (std::size_t h = 0; h < native.holes.size(); ++h) {
      c.expect(native.holes[h].closed_by == fallback.holes[h].closed_by,
               p.id + ": closing sets differ at hole " + std::to_string(h));
    }

    // Native wall against a from-scratch reconstruction of the event trace.
    int H = p.hole_count();
    double t0 = p.session_overhead_seconds;
    double imports = t0 + p.import_seconds;
    double want_wall = 0.0;
    std::vector<double> durations;
    for (int k = 0; k < H; ++k) {
      double ready =
          imports + p.body_seconds * (k + 1) / static_cast<double>(H);
      std::vector<double> cpus;
      for (const auto& t : pf.tactics) {
        auto it = p.holes[static_cast<std::size_t>(k)].tactics.find(t);
        double cpu = it == p.holes[static_cast<std::size_t>(k)].tactics.end()
                         ? 0.0
                         : it->second.cpu_ms / 1000.0;
        cpus.push_back(cpu);
        durations.push_back(p.fallback_branch_seconds + cpu);
      }
      double end = ready + testing::oracle_batch_wall(cpus, 1.0, 1.20);
      want_wall = std::max(want_wall, end);
    }
    c.expect(within(native.wall_seconds, want_wall, 1e-9),
             p.id + ": native wall diverges from the trace oracle");

    double total = 0.0, longest = 0.0;
    for (double d : durations) {
      total += d;
      longest = std::max(longest, d);
    }
    c.expect(fallback.wall_seconds >= total / workers - 1e-9,
             p.id + ": fallback beats the work lower bound");
    c.expect(fallback.wall_seconds >= longest - 1e-9,
             p.id + ": fallback beats the longest-branch bound");
    c.expect(within(fallback.wall_seconds,
                    testing::oracle_makespan(durations, workers), 1e-9),
             p.id + ": fallback wall diverges from the pool oracle");
  }
  return c;
}

// ---- criterion 8: memory model ---------------------------------------------

Check criterion_memory() {
  Check c;
  const double env = 3.2, mctx_kb = 8.0;
  std::map<int, double> peak;
  for (int b : {7, 14, 35}) {
    TheoremProfile p;
    p.id = "mem" + std::to_string(b);
    p.import_seconds = 10;
    p.body_seconds = 5;
    p.env_gb = env;
    p.mctx_kb = mctx_kb;
    HoleSpec h;
    h.line = 1;
    h.character = 2;
    std::vector<std::string> configs;
    for (int i = 0; i < b; ++i) {
      std::string name = "t" + std::to_string(i);
      h.tactics[name] = {false, 50.0};
      configs.push_back(name);
    }
    p.holes.push_back(h);

    sim::SimSession session;
    session.register_profile(p);
    session.handle_open_document(p.uri(), p.sketch_text);
    auto cap = session.handle_capture(p.uri(), 1, 2);
    session.handle_branch(cap.snapshot_id, configs);
    session.run_until_idle();
    peak[b] = session.memory_peak_gb();
    c.expect(within(peak[b], env + b * mctx_kb * 1e-6, 1e-9),
             "native peak wrong at B=" + std::to_string(b));
  }
  double slope_a = (peak[14] - peak[7]) / 7.0;
  double slope_b = (peak[35] - peak[14]) / 21.0;
  c.expect(within(slope_a, mctx_kb * 1e-6, 1e-6) &&
               within(slope_b, mctx_kb * 1e-6, 1e-6),
           "native peak is not affine in B");

  TheoremProfile p;
  p.id = "fb";
  p.fallback_branch_seconds = 10;
  HoleSpec h;
  h.line = 1;
  h.character = 2;
  orch::Portfolio pf;
  for (int i = 0; i < 35; ++i) {
    std::string name = "t" + std::to_string(i);
    h.tactics[name] = {false, 0.0};
    pf.tactics.push_back(name);
  }
  p.holes.push_back(h);
  orch::FallbackPlan plan;
  plan.workers = 2;
  c.expect(within(orch::prove_fallback(p, pf, plan).peak_mem_gb, 6.0, 1e-12),
           "fallback peak != min(W,B)*3 at W=2,B=35");
  plan.workers = 8;
  orch::Portfolio two{{"t0", "t1"}};
  c.expect(within(orch::prove_fallback(p, two, plan).peak_mem_gb, 6.0, 1e-12),
           "fallback peak != min(W,B)*3 at W=8,B=2");
  c.expect(orch::FallbackPlan::from_ram(8.0).workers == 2,
           "derived worker count from 8 GB is not 2");
  return c;
}

// ---- criterion 9: sketch tooling -------------------------------------------

Check criterion_sketch() {
  Check c;
  std::mt19937_64 rng(20260822);
  for (int i = 0; i < 1000 && c.ok; ++i) {
    auto doc = testing::random_document(rng);
    auto unit = i % 2 == 0 ? sketch::ColumnUnit::Utf16 : sketch::ColumnUnit::Codepoint;
    auto got = sketch::find_sorry_positions(doc, unit);
    auto want = testing::oracle_scan(doc, unit);
    if (got.size() != want.size()) {
      c.fail("scanner count diverges on doc " + std::to_string(i));
      break;
    }
    for (std::size_t k = 0; k < got.size(); ++k) {
      if (got[k].line != want[k].line || got[k].character != want[k].character ||
          got[k].byte_offset != want[k].byte_offset) {
        c.fail("scanner position diverges on doc " + std::to_string(i));
        break;
      }
    }
  }

  // Substitution: replacing a hole consumes exactly that hole.
  for (int i = 0; i < 50 && c.ok; ++i) {
    auto doc = testing::random_document(rng);
    auto sites = sketch::find_sorry_positions(doc);
    int guard = 0;
    while (!sites.empty() && guard++ < 200) {
      std::size_t before = sites.size();
      doc = sketch::substitute_tactic(doc, sites[0], "omega");
      sites = sketch::find_sorry_positions(doc);
      if (sites.size() != before - 1) {
        c.fail("substitution did not consume exactly one hole");
        break;
      }
    }
  }

  // A sketch whose header the generator mangled gets the original statement
  // spliced back in, byte for byte.
  std::string formal =
      "theorem h (x : ℝ) (h₁ : x ≥ 0) : x + 1 ≥ 1 := by";
  std::string sketch_text =
      "theorem h (x : R) (hone : x >= 0) : x + 1 >= 1 := by\n"
      "  have h₂ : x + 1 ≥ 1 := by\n    sorry\n  exact h₂\n";
  std::string fixed = sketch::splice_header(formal, sketch_text);
  c.expect(fixed.rfind(formal, 0) == 0, "spliced header is not byte-exact");
  std::string body_before = sketch_text.substr(sketch_text.find(":= by") + 5);
  std::string body_after = fixed.substr(formal.size());
  c.expect(body_after == body_before, "splice touched the body");
  c.expect(sketch::splice_header(formal, fixed) == fixed,
           "splice is not idempotent");
  return c;
}

// ---- criterion 10: determinism ---------------------------------------------

Check criterion_determinism(const std::string& cli,
                            const std::string& corpus) {
  Check c;
  std::string cmd = cli + " run --corpus " + q(corpus) +
                    " --mode both --workers 1 --seed 7 --format csv";
  auto a = run_cli(cmd);
  auto b = run_cli(cmd);
  c.expect(a.status == 0 && b.status == 0, "run exited nonzero");
  c.expect(!a.out.empty() && a.out == b.out,
           "two runs with the same seed differ");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string corpus, cli;
  for (int i = 1; i + 1 < argc; i += 2) {
    std::string flag = argv[i];
    if (flag == "--corpus") corpus = argv[i + 1];
    if (flag == "--cli") cli = argv[i + 1];
  }
  if (corpus.empty() || cli.empty()) {
    std::cerr << "usage: acceptance --corpus <file> --cli <bench binary>\n";
    return 2;
  }

  struct Criterion {
    int number;
    const char* label;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria;
  criteria.push_back({1, "end-to-end wall times",
                      [&] { return criterion_end_to_end(cli, corpus); }});
  criteria.push_back({2, "scaling table",
                      [&] { return criterion_scaling(cli, corpus); }});
  criteria.push_back({3, "crossover point",
                      [&] { return criterion_crossover(cli, corpus); }});
  criteria.push_back({4, "overhead fraction",
                      [&] { return criterion_overhead(corpus); }});
  criteria.push_back({5, "caching tiers",
                      [&] { return criterion_levels(cli, corpus); }});
  criteria.push_back({6, "campaign projection",
                      [&] { return criterion_campaign(cli, corpus); }});
  criteria.push_back({7, "path equivalence",
                      [&] { return criterion_equivalence(); }});
  criteria.push_back({8, "memory model", [&] { return criterion_memory(); }});
  criteria.push_back({9, "sketch tooling", [&] { return criterion_sketch(); }});
  criteria.push_back({10, "determinism",
                      [&] { return criterion_determinism(cli, corpus); }});

  bool all_ok = true;
  for (const auto& cr : criteria) {
    Check result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.fail(std::string("unhandled exception: ") + e.what());
    }
    if (result.ok) {
      std::cout << "PASS criterion " << cr.number << ": " << cr.label
                << std::endl;
    } else {
      all_ok = false;
      std::cout << "FAIL criterion " << cr.number << ": " << cr.label << " ("
                << result.detail << ")" << std::endl;
    }
  }
  std::cout << (all_ok ? "acceptance: all criteria passed"
                       : "acceptance: FAILURES above")
            << std::endl;
  return all_ok ? 0 : 1;
}
