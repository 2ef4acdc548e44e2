// Benchmark harness for the snapshot protocol simulator. Subcommands:
//   run        execute the corpus suite, print a report table
//   verify     run the suite, diff rows against an expected CSV
//   serve      expose the simulated server on localhost TCP
//   crossover  break-even branch count of the two proving paths
//   project    scaling table, caching-tier comparison, campaign projection

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leansnap/bench.hpp"
#include "leansnap/model.hpp"
#include "leansnap/tcp.hpp"

namespace {

using namespace leansnap;

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct GlobalOpts {
  std::string corpus_path;
  int workers = 0;  // 0: derive from ram_gb
  bench::RunMode mode = bench::RunMode::Both;
  std::uint64_t seed = 0;
  std::string format = "csv";
  double ram_gb = 8.0;
  double jitter = 0.0;
};

bench::Corpus require_corpus(const GlobalOpts& g) {
  if (g.corpus_path.empty()) {
    throw CLI::ValidationError("--corpus", "a corpus file is required here");
  }
  return bench::load_corpus(g.corpus_path);
}

bench::RunOptions to_run_options(const GlobalOpts& g) {
  bench::RunOptions opts;
  opts.mode = g.mode;
  opts.workers = g.workers;
  opts.ram_gb = g.ram_gb;
  opts.seed = g.seed;
  opts.jitter_sigma = g.jitter;
  return opts;
}

void print_summary(std::ostream& out, const bench::SuiteStats& stats) {
  out << "\nper-group means (grouped problems only)\n";
  out << "holes  count  native_s  fallback_s  speedup  range\n";
  for (const auto& g : stats.groups) {
    out << g.holes << "      " << g.count << "     " << fmt(g.native_mean, 6)
        << "     " << fmt(g.fallback_mean, 6) << "      "
        << fmt(g.speedup_mean, 3) << "     " << fmt(g.speedup_min, 3) << "-"
        << fmt(g.speedup_max, 3) << "\n";
  }
  out << "overall: " << stats.grouped_count << " problems, "
      << stats.total_branches << " branches, mean holes "
      << fmt(stats.holes_mean, 3) << ", mean native "
      << fmt(stats.native_mean, 6) << " s, mean fallback "
      << fmt(stats.fallback_mean, 6) << " s, mean speedup "
      << fmt(stats.speedup_mean, 3) << "x, median speedup "
      << fmt(stats.speedup_median, 3) << "x\n";
}

int cmd_run(const GlobalOpts& g, bool summary) {
  bench::Corpus corpus = require_corpus(g);
  auto rows = bench::run_suite(corpus, to_run_options(g));
  std::cout << (g.format == "text" ? bench::report_text(rows)
                                   : bench::report_csv(rows));
  bool failed = false;
  for (const auto& r : rows) {
    if (r.error) {
      std::cerr << r.theorem << ": " << *r.error << "\n";
      failed = true;
    }
  }
  if (summary) print_summary(std::cout, bench::summarize(rows, corpus));
  return failed ? 1 : 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& expected,
               double tolerance) {
  bench::Corpus corpus = require_corpus(g);
  auto rows = bench::run_suite(corpus, to_run_options(g));
  auto outcome = bench::verify_against_expected(rows, expected, tolerance);
  for (const auto& f : outcome.failures) std::cout << "mismatch: " << f << "\n";
  std::cout << "verify: " << (outcome.ok ? "OK" : "FAIL") << " ("
            << outcome.rows_checked << " rows, " << outcome.failures.size()
            << " mismatches, tolerance " << fmt(tolerance, 3) << ")\n";
  return outcome.ok ? 0 : 1;
}

int cmd_serve(const GlobalOpts& g, int port) {
  bench::Corpus corpus = require_corpus(g);
  sim::SimOptions options;
  options.batch_latency_seconds = corpus.defaults.batch_latency_seconds;
  options.dispatch_overhead_factor = corpus.defaults.dispatch_overhead_factor;
  options.jitter_sigma = g.jitter;
  options.seed = g.seed;
  tcp::TcpServer server(port, options, corpus.problems);
  std::cout << "listening on 127.0.0.1:" << server.port() << std::endl;
  server.serve_forever();
  return 0;
}

int cmd_crossover(const GlobalOpts& g, std::optional<double> t_elab,
                  std::optional<double> t_load,
                  std::optional<double> t_tactic) {
  model::CostParams cost;
  if (!g.corpus_path.empty()) cost = bench::load_corpus(g.corpus_path).defaults.cost;
  double e = t_elab.value_or(cost.t_elab);
  double l = t_load.value_or(cost.t_load);
  double t = t_tactic.value_or(cost.t_tactic);
  auto b = model::crossover_branches(e, l, t);
  if (!b) {
    std::cout << "no crossover\n";
    std::cerr << "rebuild cost " << fmt(l, 6)
              << " s does not exceed per-branch tactic cost " << fmt(t, 6)
              << " s; the one-time elaboration never pays off\n";
    return 0;
  }
  std::cout << "B=" << *b << "\n";
  return 0;
}

// Mean tactic cpu over every (hole, tactic) pair of a profile, seconds.
double profile_mean_cpu(const TheoremProfile& p) {
  double total_ms = 0.0;
  long n = 0;
  for (const auto& hole : p.holes) {
    for (const auto& [name, outcome] : hole.tactics) {
      total_ms += outcome.cpu_ms;
      ++n;
    }
  }
  return n > 0 ? total_ms / static_cast<double>(n) / 1000.0 : 0.0;
}

int cmd_project_levels(const GlobalOpts& g, const std::string& theorem_id,
                       int workers_l1) {
  bench::Corpus corpus = require_corpus(g);
  const TheoremProfile* p = corpus.find(theorem_id);
  if (p == nullptr) {
    std::cerr << "no such theorem in corpus: " << theorem_id << "\n";
    return 2;
  }
  double mean_cpu = profile_mean_cpu(*p);
  model::LevelParams params;
  params.t_import = p->import_seconds;
  params.t_body = p->body_seconds;
  params.t_tactic = mean_cpu;
  params.fallback_per_branch = p->fallback_branch_seconds + mean_cpu;
  params.session_overhead = p->session_overhead_seconds;
  params.branches = p->hole_count() * orch::Portfolio::standard().size();
  params.workers_l1 = workers_l1;
  auto t = model::level_comparison(params);
  std::cout << "level  seconds  vs_l0\n";
  std::cout << "L0     " << fmt(t.l0, 6) << "   1\n";
  std::cout << "L1     " << fmt(t.l1, 6) << "      " << fmt(t.r1, 3) << "\n";
  std::cout << "L2     " << fmt(t.l2, 6) << "  " << fmt(t.r2, 3) << "\n";
  std::cout << "L1+2   " << fmt(t.l12, 6) << "   " << fmt(t.r12, 3) << "\n";
  model::RebuildCheck check;
  double est = model::rebuild_estimate(check);
  double rel = (est - check.measured_seconds) / check.measured_seconds;
  std::cout << "full-file rebuild: estimated " << fmt(est, 6)
            << " s, measured " << fmt(check.measured_seconds, 6) << " s ("
            << (rel >= 0 ? "+" : "") << fmt(rel * 100.0, 2) << "%)\n";
  return 0;
}

int cmd_project_sweep(const GlobalOpts& g, int drafts, int per_draft,
                      int workers) {
  model::SweepParams params;
  params.drafts = drafts;
  params.branches_per_draft = per_draft;
  params.workers = workers;
  if (!g.corpus_path.empty()) {
    auto cost = bench::load_corpus(g.corpus_path).defaults.cost;
    params.t_load = cost.t_load;
    params.t_elab = cost.t_elab;
    params.t_tactic = cost.t_tactic;
  }
  auto out = model::sweep_projection(params);
  std::cout << "total_branches  " << out.total_branches << "\n";
  std::cout << "fallback_hours  " << fmt(out.fallback_hours, 6) << "\n";
  std::cout << "native_hours    " << fmt(out.native_hours, 6) << "\n";
  return 0;
}

int cmd_project_table(const GlobalOpts& g, std::vector<int> branch_counts) {
  model::FitParams fit;
  std::map<int, std::pair<double, double>> measured;
  if (!g.corpus_path.empty()) {
    bench::Corpus corpus = bench::load_corpus(g.corpus_path);
    fit = corpus.defaults.fit;
    // Measured rows come from the end-to-end profiles, run at W=1.
    bench::Corpus sub;
    sub.defaults = corpus.defaults;
    for (const auto& p : corpus.problems) {
      if (p.kind == "end_to_end") sub.problems.push_back(p);
    }
    bench::RunOptions opts = to_run_options(g);
    opts.mode = bench::RunMode::Both;
    opts.workers = 1;
    for (const auto& row : bench::run_suite(sub, opts)) {
      if (row.native_s && row.fallback_s) {
        measured[row.branches] = {*row.native_s, *row.fallback_s};
      }
    }
  }
  auto rows = model::projection_table(branch_counts, fit, measured);
  std::cout << "B,native_s,fallback_s,speedup,source\n";
  for (const auto& r : rows) {
    std::cout << r.branches << "," << fmt(r.native_s, 6) << ","
              << fmt(r.fallback_s, 6) << "," << fmt(r.speedup, 3) << ","
              << (r.measured ? "measured" : "projected") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual-time benchmark harness for snapshot-based proof search"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--corpus", g.corpus_path, "corpus file (JSON, // comments ok)");
  app.add_option("--workers", g.workers,
                 "fallback worker count (0: derive from --ram-gb)");
  std::map<std::string, bench::RunMode> modes{
      {"native", bench::RunMode::Native},
      {"fallback", bench::RunMode::Fallback},
      {"both", bench::RunMode::Both}};
  app.add_option("--mode", g.mode, "which paths to time")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--seed", g.seed, "rng seed for jittered runs");
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"csv", "text"}));
  app.add_option("--ram-gb", g.ram_gb, "memory budget for derived workers");
  app.add_option("--jitter", g.jitter, "log-normal cpu jitter sigma");

  auto* run = app.add_subcommand("run", "run the suite and print the table");
  run->fallthrough();
  bool summary = false;
  run->add_flag("--summary", summary, "append per-group aggregates");

  auto* verify = app.add_subcommand("verify", "diff suite rows vs expected CSV");
  verify->fallthrough();
  std::string expected;
  double tolerance = 0.05;
  verify->add_option("--expected", expected, "expected CSV table")->required();
  verify->add_option("--tolerance", tolerance, "relative tolerance per cell");

  auto* serve = app.add_subcommand("serve", "serve the simulator over TCP");
  serve->fallthrough();
  int port = 0;
  serve->add_option("--port", port, "listen port (0: ephemeral, printed)");

  auto* crossover =
      app.add_subcommand("crossover", "break-even branch count");
  crossover->fallthrough();
  std::optional<double> x_elab, x_load, x_tactic;
  crossover->add_option("--t-elab", x_elab, "one-time elaboration cost, s");
  crossover->add_option("--t-load", x_load, "per-branch rebuild cost, s");
  crossover->add_option("--t-tactic", x_tactic, "per-branch tactic cost, s");

  auto* project = app.add_subcommand("project", "model projections");
  project->fallthrough();
  bool levels = false, sweep = false;
  std::string level_theorem = "mathd_numbertheory_345";
  int workers_l1 = 2, drafts = 100, per_draft = 28, sweep_workers = 2;
  std::vector<int> branch_counts{14, 21, 28, 35, 42, 56};
  project->add_flag("--levels", levels, "caching-tier comparison table");
  project->add_flag("--sweep", sweep, "campaign-scale projection");
  project->add_option("--theorem", level_theorem,
                      "profile behind the tier table");
  project->add_option("--workers-l1", workers_l1,
                      "import-cache tier worker count");
  project->add_option("--drafts", drafts, "sweep: number of drafted theorems");
  project->add_option("--branches-per-draft", per_draft,
                      "sweep: branches per theorem");
  project->add_option("--sweep-workers", sweep_workers,
                      "sweep: fallback workers");
  project->add_option("--branches", branch_counts,
                      "scaling table branch counts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(g, summary);
    if (verify->parsed()) return cmd_verify(g, expected, tolerance);
    if (serve->parsed()) return cmd_serve(g, port);
    if (crossover->parsed()) return cmd_crossover(g, x_elab, x_load, x_tactic);
    if (project->parsed()) {
      if (levels) return cmd_project_levels(g, level_theorem, workers_l1);
      if (sweep) return cmd_project_sweep(g, drafts, per_draft, sweep_workers);
      return cmd_project_table(g, branch_counts);
    }
  } catch (const bench::CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
