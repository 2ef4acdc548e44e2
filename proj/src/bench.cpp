#include "leansnap/bench.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "leansnap/client.hpp"
#include "leansnap/sim_server.hpp"
#include "leansnap/sketch.hpp"
#include "leansnap/transport.hpp"

namespace leansnap::bench {

using Json = nlohmann::json;

const char* const kCsvHeader =
    "theorem,H,B,native_s,fallback_s,speedup,overhead_frac,mem_native_gb,"
    "mem_fallback_gb";

namespace {

[[noreturn]] void fail(CorpusError::Kind kind, const std::string& what) {
  throw CorpusError(kind, what);
}

double require_time(const Json& j, const char* key, double fallback,
                    const std::string& id) {
  double v = j.value(key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) {
    fail(CorpusError::Kind::Validation,
         id + ": " + key + " must be a finite non-negative number");
  }
  return v;
}

std::string format_general(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string cell(const std::optional<double>& v, int digits) {
  return v ? format_general(*v, digits) : std::string();
}

}  // namespace

const TheoremProfile* Corpus::find(const std::string& id) const {
  for (const auto& p : problems) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(CorpusError::Kind::Io, "cannot open corpus: " + path.string());
  }
  Json root;
  try {
    root = Json::parse(in, nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const Json::exception& e) {
    fail(CorpusError::Kind::Parse, std::string("corpus parse: ") + e.what());
  }
  if (!root.is_object() || !root.contains("version") ||
      !root.at("version").is_number_integer()) {
    fail(CorpusError::Kind::Parse, "corpus must carry an integer version");
  }

  Corpus corpus;
  corpus.version = root.at("version").get<int>();

  if (root.contains("defaults")) {
    const Json& d = root.at("defaults");
    CorpusDefaults& def = corpus.defaults;
    def.batch_latency_seconds =
        d.value("batchLatencySeconds", def.batch_latency_seconds);
    def.dispatch_overhead_factor =
        d.value("dispatchOverheadFactor", def.dispatch_overhead_factor);
    def.fallback_worker_gb = d.value("fallbackWorkerGB", def.fallback_worker_gb);
    def.env_gb = d.value("envGB", def.env_gb);
    def.mctx_kb = d.value("mctxKB", def.mctx_kb);
    if (d.contains("fit")) {
      const Json& f = d.at("fit");
      def.fit.native_base = f.value("nativeBase", def.fit.native_base);
      def.fit.native_per_branch =
          f.value("nativePerBranch", def.fit.native_per_branch);
      def.fit.fallback_per_branch =
          f.value("fallbackPerBranch", def.fit.fallback_per_branch);
    }
    if (d.contains("cost")) {
      const Json& c = d.at("cost");
      def.cost.t_elab = c.value("tElab", def.cost.t_elab);
      def.cost.t_tactic = c.value("tTactic", def.cost.t_tactic);
      def.cost.t_load = c.value("tLoad", def.cost.t_load);
      def.cost.t_import = c.value("tImport", def.cost.t_import);
      def.cost.t_body = c.value("tBody", def.cost.t_body);
    }
  }

  if (!root.contains("problems") || !root.at("problems").is_array()) {
    fail(CorpusError::Kind::Parse, "corpus must carry a problems array");
  }

  for (const Json& pj : root.at("problems")) {
    TheoremProfile p;
    if (!pj.is_object() || !pj.contains("id") || !pj.at("id").is_string()) {
      fail(CorpusError::Kind::Parse, "every problem needs a string id");
    }
    p.id = pj.at("id").get<std::string>();
    if (corpus.find(p.id) != nullptr) {
      fail(CorpusError::Kind::DuplicateId, "duplicate theorem id: " + p.id);
    }
    p.kind = pj.value("kind", std::string("handcrafted"));
    p.synthetic = pj.value("synthetic", false);

    if (pj.contains("sketch")) {
      p.sketch_text = pj.at("sketch").get<std::string>();
    } else if (pj.contains("sketchFile")) {
      std::filesystem::path sp =
          path.parent_path() / pj.at("sketchFile").get<std::string>();
      std::ifstream sf(sp);
      if (!sf) {
        fail(CorpusError::Kind::Io,
             p.id + ": cannot open sketch file " + sp.string());
      }
      std::ostringstream ss;
      ss << sf.rdbuf();
      p.sketch_text = ss.str();
    } else {
      fail(CorpusError::Kind::Validation,
           p.id + ": needs an embedded sketch or a sketchFile");
    }

    p.import_seconds = require_time(pj, "importSeconds", 60.0, p.id);
    p.body_seconds = require_time(pj, "bodySeconds", 15.0, p.id);
    p.session_overhead_seconds =
        require_time(pj, "sessionOverheadSeconds", 0.0, p.id);
    p.fallback_branch_seconds =
        require_time(pj, "fallbackBranchSeconds", 75.0, p.id);
    p.env_gb = pj.value("envGB", corpus.defaults.env_gb);
    p.mctx_kb = pj.value("mctxKB", corpus.defaults.mctx_kb);
    if (p.fallback_branch_seconds < p.import_seconds) {
      fail(CorpusError::Kind::Validation,
           p.id + ": fallbackBranchSeconds " +
               std::to_string(p.fallback_branch_seconds) +
               " below importSeconds " + std::to_string(p.import_seconds) +
               " (a rebuild includes the import)");
    }

    if (!pj.contains("holes") || !pj.at("holes").is_array() ||
        pj.at("holes").empty()) {
      fail(CorpusError::Kind::Validation,
           p.id + ": holes must be a non-empty array");
    }
    for (const Json& hj : pj.at("holes")) {
      HoleSpec hole;
      hole.line = hj.at("line").get<int>();
      hole.character = hj.at("character").get<int>();
      if (hj.contains("tactics")) {
        for (auto it = hj.at("tactics").begin(); it != hj.at("tactics").end();
             ++it) {
          TacticOutcome out;
          out.closes = it.value().value("closes", false);
          out.cpu_ms = it.value().value("cpuMs", 0.0);
          if (!(out.cpu_ms >= 0.0) || !std::isfinite(out.cpu_ms)) {
            fail(CorpusError::Kind::Validation,
                 p.id + ": cpuMs must be finite and non-negative");
          }
          hole.tactics.emplace(it.key(), out);
        }
      }
      if (!p.holes.empty()) {
        const HoleSpec& prev = p.holes.back();
        if (std::pair(hole.line, hole.character) <=
            std::pair(prev.line, prev.character)) {
          fail(CorpusError::Kind::Validation,
               p.id + ": hole positions must be strictly increasing");
        }
      }
      p.holes.push_back(std::move(hole));
    }

    // The declared positions must be exactly what the scanner finds.
    auto sites = sketch::find_sorry_positions(p.sketch_text);
    bool match = sites.size() == p.holes.size();
    for (std::size_t i = 0; match && i < sites.size(); ++i) {
      match = sites[i].line == p.holes[i].line &&
              sites[i].character == p.holes[i].character;
    }
    if (!match) {
      std::string found;
      for (const auto& s : sites) {
        found += " (" + std::to_string(s.line) + "," +
                 std::to_string(s.character) + ")";
      }
      fail(CorpusError::Kind::HoleMismatch,
           p.id + ": declared holes do not match the sketch; scanner found" +
               (found.empty() ? " none" : found));
    }

    corpus.problems.push_back(std::move(p));
  }
  return corpus;
}

std::vector<ReportRow> run_suite(const Corpus& corpus,
                                 const RunOptions& options) {
  const orch::Portfolio& portfolio = options.portfolio.tactics.empty()
                                         ? orch::Portfolio::standard()
                                         : options.portfolio;
  const CorpusDefaults& def = corpus.defaults;

  orch::FallbackPlan plan;
  if (options.workers > 0) {
    plan.workers = options.workers;
    plan.ram_gb = options.ram_gb;
    plan.worker_gb = def.fallback_worker_gb;
  } else {
    plan = orch::FallbackPlan::from_ram(options.ram_gb, def.fallback_worker_gb);
  }
  plan.jitter_sigma = options.jitter_sigma;
  plan.seed = options.seed;

  std::vector<ReportRow> rows;
  rows.reserve(corpus.problems.size());
  for (const TheoremProfile& p : corpus.problems) {
    ReportRow row;
    row.theorem = p.id;
    row.holes = p.hole_count();
    row.branches = p.hole_count() * portfolio.size();
    try {
      double cpu_total = 0.0;
      bool have_cpu = false;

      if (options.mode != RunMode::Fallback) {
        sim::SimOptions so;
        so.level = sim::ServerLevel::Level2;
        so.batch_latency_seconds = def.batch_latency_seconds;
        so.dispatch_overhead_factor = def.dispatch_overhead_factor;
        so.jitter_sigma = options.jitter_sigma;
        so.seed = options.seed;
        sim::SimSession session(so);
        session.register_profile(p);
        sim::SimServer server(session);
        transport::ServedStream link(
            [&server](const wire::RpcEnvelope& e) { return server.handle(e); });
        client::SnapshotClient cl(link);
        auto outcome =
            orch::run_prove_phase(&cl, p, portfolio, plan, std::nullopt);
        session.run_until_idle();
        row.native_s = outcome.wall_seconds;
        row.mem_native_gb = session.memory_peak_gb();
        cpu_total = outcome.tactic_cpu_seconds;
        have_cpu = true;
      }
      if (options.mode != RunMode::Native) {
        auto outcome = orch::prove_fallback(p, portfolio, plan);
        row.fallback_s = outcome.wall_seconds;
        row.mem_fallback_gb = outcome.peak_mem_gb;
        if (!have_cpu) cpu_total = outcome.tactic_cpu_seconds;
        have_cpu = true;
      }
      if (have_cpu && row.branches > 0) {
        row.mean_cpu_s = cpu_total / row.branches;
      }
      if (row.native_s && row.fallback_s) {
        row.speedup = *row.fallback_s / *row.native_s;
      }
      row.overhead_frac = model::overhead_fraction(
          p.fallback_branch_seconds + row.mean_cpu_s, row.mean_cpu_s);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const ReportRow& r : rows) {
    out += r.theorem;
    out += ',';
    out += std::to_string(r.holes);
    out += ',';
    out += std::to_string(r.branches);
    out += ',';
    out += cell(r.native_s, 6);
    out += ',';
    out += cell(r.fallback_s, 6);
    out += ',';
    out += cell(r.speedup, 3);
    out += ',';
    out += cell(r.overhead_frac, 6);
    out += ',';
    out += cell(r.mem_native_gb, 6);
    out += ',';
    out += cell(r.mem_fallback_gb, 6);
    out += '\n';
  }
  return out;
}

std::string report_text(const std::vector<ReportRow>& rows) {
  static const char* const names[] = {"theorem",       "H",
                                      "B",             "native_s",
                                      "fallback_s",    "speedup",
                                      "overhead_frac", "mem_native_gb",
                                      "mem_fallback_gb"};
  constexpr int kCols = 9;
  std::vector<std::array<std::string, kCols>> table;
  for (const ReportRow& r : rows) {
    table.push_back({r.theorem, std::to_string(r.holes),
                     std::to_string(r.branches), cell(r.native_s, 6),
                     cell(r.fallback_s, 6), cell(r.speedup, 3),
                     cell(r.overhead_frac, 6), cell(r.mem_native_gb, 6),
                     cell(r.mem_fallback_gb, 6)});
  }
  std::array<std::size_t, kCols> width{};
  for (int c = 0; c < kCols; ++c) width[c] = std::string(names[c]).size();
  for (const auto& row : table) {
    for (int c = 0; c < kCols; ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (int c = 0; c < kCols; ++c) {
    if (c) out << "  ";
    out << (c == 0 ? std::left : std::right) << std::setw(static_cast<int>(width[c]))
        << names[c];
  }
  out << '\n';
  for (const auto& row : table) {
    for (int c = 0; c < kCols; ++c) {
      if (c) out << "  ";
      out << (c == 0 ? std::left : std::right)
          << std::setw(static_cast<int>(width[c])) << row[c];
    }
    out << '\n';
  }
  return out.str();
}

SuiteStats summarize(const std::vector<ReportRow>& rows,
                     const Corpus& corpus) {
  SuiteStats stats;
  std::map<int, std::vector<const ReportRow*>> by_holes;
  std::vector<double> ratios;
  for (const ReportRow& r : rows) {
    const TheoremProfile* p = corpus.find(r.theorem);
    if (p == nullptr || p->kind == "end_to_end" || r.error) continue;
    by_holes[r.holes].push_back(&r);
    ++stats.grouped_count;
    stats.total_branches += r.branches;
    stats.holes_mean += r.holes;
    stats.branches_mean += r.branches;
    if (r.native_s) stats.native_mean += *r.native_s;
    if (r.fallback_s) stats.fallback_mean += *r.fallback_s;
    if (r.speedup) {
      stats.speedup_mean += *r.speedup;
      ratios.push_back(*r.speedup);
    }
  }
  if (stats.grouped_count > 0) {
    stats.holes_mean /= stats.grouped_count;
    stats.branches_mean /= stats.grouped_count;
    stats.native_mean /= stats.grouped_count;
    stats.fallback_mean /= stats.grouped_count;
  }
  if (!ratios.empty()) {
    stats.speedup_mean /= static_cast<double>(ratios.size());
    std::sort(ratios.begin(), ratios.end());
    std::size_t n = ratios.size();
    stats.speedup_median = n % 2 == 1
                               ? ratios[n / 2]
                               : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  }
  for (const auto& [h, group] : by_holes) {
    GroupStats g;
    g.holes = h;
    g.count = static_cast<int>(group.size());
    bool first = true;
    for (const ReportRow* r : group) {
      if (r->native_s) g.native_mean += *r->native_s;
      if (r->fallback_s) g.fallback_mean += *r->fallback_s;
      if (r->speedup) {
        g.speedup_mean += *r->speedup;
        g.speedup_min = first ? *r->speedup : std::min(g.speedup_min, *r->speedup);
        g.speedup_max = first ? *r->speedup : std::max(g.speedup_max, *r->speedup);
        first = false;
      }
    }
    g.native_mean /= g.count;
    g.fallback_mean /= g.count;
    g.speedup_mean /= g.count;
    stats.groups.push_back(g);
  }
  return stats;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::optional<double> row_value(const ReportRow& r, const std::string& col) {
  if (col == "H") return static_cast<double>(r.holes);
  if (col == "B") return static_cast<double>(r.branches);
  if (col == "native_s") return r.native_s;
  if (col == "fallback_s") return r.fallback_s;
  if (col == "speedup") return r.speedup;
  if (col == "overhead_frac") return r.overhead_frac;
  if (col == "mem_native_gb") return r.mem_native_gb;
  if (col == "mem_fallback_gb") return r.mem_fallback_gb;
  return std::nullopt;
}

bool is_known_column(const std::string& col) {
  static const char* const kKnown[] = {
      "H",             "B",             "native_s",        "fallback_s",
      "speedup",       "overhead_frac", "mem_native_gb",   "mem_fallback_gb"};
  for (const char* k : kKnown) {
    if (col == k) return true;
  }
  return false;
}

}  // namespace

VerifyOutcome verify_against_expected(const std::vector<ReportRow>& rows,
                                      const std::filesystem::path& expected_csv,
                                      double tolerance) {
  std::ifstream in(expected_csv);
  if (!in) {
    fail(CorpusError::Kind::Io,
         "cannot open expected table: " + expected_csv.string());
  }
  std::string line;
  std::vector<std::string> columns;
  VerifyOutcome outcome;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (cells.empty() || cells[0] != "theorem") {
        fail(CorpusError::Kind::Parse,
             "expected table must start with a theorem column");
      }
      columns.assign(cells.begin() + 1, cells.end());
      for (const auto& c : columns) {
        if (!is_known_column(c)) {
          fail(CorpusError::Kind::Parse, "unknown expected column: " + c);
        }
      }
      continue;
    }
    if (cells.size() != columns.size() + 1) {
      fail(CorpusError::Kind::Parse,
           "expected table row has wrong cell count: " + line);
    }
    const std::string& id = cells[0];
    const ReportRow* found = nullptr;
    for (const ReportRow& r : rows) {
      if (r.theorem == id) {
        found = &r;
        break;
      }
    }
    if (found == nullptr) {
      fail(CorpusError::Kind::Validation, "MissingRow: " + id);
    }
    ++outcome.rows_checked;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (cells[i + 1].empty()) continue;
      double expected = std::stod(cells[i + 1]);
      auto actual = row_value(*found, columns[i]);
      if (!actual) {
        outcome.failures.push_back(id + "." + columns[i] + ": no run value");
        continue;
      }
      double denom = std::abs(expected);
      double err = denom > 0 ? std::abs(*actual - expected) / denom
                             : std::abs(*actual - expected);
      if (err > tolerance) {
        outcome.failures.push_back(
            id + "." + columns[i] + ": expected " + cells[i + 1] + ", got " +
            format_general(*actual, 6) + " (rel err " +
            format_general(err, 3) + ")");
      }
    }
  }
  if (!header_seen) {
    fail(CorpusError::Kind::Parse, "expected table is empty");
  }
  outcome.ok = outcome.failures.empty();
  return outcome;
}

}  // namespace leansnap::bench
