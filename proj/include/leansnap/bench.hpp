#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leansnap/model.hpp"
#include "leansnap/orchestrator.hpp"
#include "leansnap/profile.hpp"

namespace leansnap::bench {

// Per-corpus defaults: simulator knobs plus the fitted model constants used
// by projections. Individual profiles may override the memory figures.
struct CorpusDefaults {
  double batch_latency_seconds = 1.0;
  double dispatch_overhead_factor = 1.20;
  double fallback_worker_gb = 3.0;
  double env_gb = 3.2;
  double mctx_kb = 8.0;
  model::FitParams fit;
  model::CostParams cost;
};

struct Corpus {
  int version = 1;
  CorpusDefaults defaults;
  std::vector<TheoremProfile> problems;

  const TheoremProfile* find(const std::string& id) const;
};

class CorpusError : public std::runtime_error {
 public:
  enum class Kind { Io, Parse, Validation, DuplicateId, HoleMismatch };

  CorpusError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Loads and validates a corpus file (JSON with comments). Sketches may be
// embedded (`sketch`) or referenced (`sketchFile`, relative to the corpus).
// Declared hole positions are cross-checked against the sketch scanner.
Corpus load_corpus(const std::filesystem::path& path);

enum class RunMode { Native, Fallback, Both };

struct RunOptions {
  RunMode mode = RunMode::Both;
  int workers = 0;       // 0: derive from ram_gb
  double ram_gb = 8.0;
  std::uint64_t seed = 0;
  double jitter_sigma = 0.0;
  orch::Portfolio portfolio;  // empty: the standard 7
};

struct ReportRow {
  std::string theorem;
  int holes = 0;
  int branches = 0;
  std::optional<double> native_s;
  std::optional<double> fallback_s;
  std::optional<double> speedup;
  std::optional<double> overhead_frac;
  std::optional<double> mem_native_gb;
  std::optional<double> mem_fallback_gb;
  // Not part of the CSV schema; kept for aggregation checks.
  double mean_cpu_s = 0.0;
  std::optional<std::string> error;
};

// Runs every problem through the requested paths. The native path goes over
// the framed wire protocol against a fresh Level-2 simulator session per
// theorem; the fallback path runs the analytic worker pool. Errors are
// reported per row without aborting the suite.
std::vector<ReportRow> run_suite(const Corpus& corpus,
                                 const RunOptions& options);

extern const char* const kCsvHeader;  // fixed CSV column set

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_text(const std::vector<ReportRow>& rows);

// Per-hole-count aggregates over the grouped (handcrafted) problems.
struct GroupStats {
  int holes = 0;
  int count = 0;
  double native_mean = 0, fallback_mean = 0;
  double speedup_mean = 0, speedup_min = 0, speedup_max = 0;
};

struct SuiteStats {
  std::vector<GroupStats> groups;  // ascending hole count
  int grouped_count = 0;
  long total_branches = 0;
  double holes_mean = 0, branches_mean = 0;
  double native_mean = 0, fallback_mean = 0, speedup_mean = 0;
  double speedup_median = 0;
};

SuiteStats summarize(const std::vector<ReportRow>& rows, const Corpus& corpus);

struct VerifyOutcome {
  bool ok = false;
  int rows_checked = 0;
  std::vector<std::string> failures;
};

// Compares suite rows against an expected CSV (theorem keyed; any subset of
// the numeric columns). Relative tolerance per cell. A row named in the
// expected table but absent from the run is MissingRow.
VerifyOutcome verify_against_expected(const std::vector<ReportRow>& rows,
                                      const std::filesystem::path& expected_csv,
                                      double tolerance);

}  // namespace leansnap::bench
