#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace leansnap::model {

// Closed-form cost model of the two proving paths. Branch count B = H*C is
// always derived, never stored.
struct CostParams {
  double t_elab = 120.0;    // once-per-theorem native elaboration cost
  double t_tactic = 0.045;  // per-branch tactic cost
  double t_load = 75.0;     // per-branch fallback rebuild cost
  double t_import = 60.0;
  double t_body = 15.0;
  int workers = 1;
  int holes = 1;
  int configs = 7;

  long branches() const { return static_cast<long>(holes) * configs; }
};

// t_elab + B * t_tactic
double t_native(const CostParams& p);

// ceil(B / W) * (t_load + t_tactic); W = 1 gives the plain per-branch form.
double t_fallback(const CostParams& p);

// t_fallback / t_native
double speedup(const CostParams& p);

// Smallest integer B with t_native < t_fallback at W = 1, i.e. the first B
// strictly above t_elab / (t_load - t_tactic). nullopt when the rebuild cost
// does not exceed the per-branch tactic cost (no crossover exists).
std::optional<long> crossover_branches(double t_elab, double t_load,
                                       double t_tactic);

// (fallbackPerBranch - tacticCpu) / fallbackPerBranch
double overhead_fraction(double fallback_per_branch, double tactic_cpu);

// Caching-tier comparison. L0 rebuilds per branch, L1 reuses imports across
// branches, L2 snapshots within the theorem, L1+2 additionally amortizes the
// import across many theorems.
struct LevelParams {
  double t_import = 60.0;
  double t_body = 15.0;
  double t_tactic = 0.045;
  double fallback_per_branch = 75.0;  // measured per-branch rebuild cost
  double session_overhead = 0.0;      // explicit input (not derivable)
  int branches = 35;
  int workers_l0 = 1;
  int workers_l1 = 2;
};

struct LevelTimes {
  double l0 = 0, l1 = 0, l2 = 0, l12 = 0;     // seconds per theorem
  double r1 = 0, r2 = 0, r12 = 0;             // speedup of each vs L0
};

LevelTimes level_comparison(const LevelParams& p);

// Fitted constants for the scaling table.
struct FitParams {
  double native_base = 120.0;
  double native_per_branch = 0.045;
  double fallback_per_branch = 75.0;
};

struct ProjectionRow {
  int branches = 0;
  double native_s = 0, fallback_s = 0, speedup = 0;
  bool measured = false;  // false: projected from the fitted model
};

// One row per branch count; rows present in `measured` carry those wall
// times, the rest come from the fitted model (W = 1).
std::vector<ProjectionRow> projection_table(
    const std::vector<int>& branch_counts, const FitParams& fit,
    const std::map<int, std::pair<double, double>>& measured = {});

// Sweep-scale projection: a full benchmark campaign of `drafts` theorems,
// each with `branches_per_draft` branches.
struct SweepParams {
  int drafts = 100;
  int branches_per_draft = 28;
  int workers = 2;
  double t_load = 75.0;
  double t_elab = 120.0;
  double t_tactic = 0.045;
};

struct SweepProjection {
  long total_branches = 0;
  double fallback_hours = 0;  // ceil(total/W) * t_load
  double native_hours = 0;    // drafts * (t_elab + per-draft B * t_tactic)
};

SweepProjection sweep_projection(const SweepParams& p);

// Cross-check of the whole-file rebuild route: ceil(B/W) rounds, each paying
// one import plus one full-file body elaboration. Compared against the
// measured campaign total.
struct RebuildCheck {
  int branches = 28;
  int workers = 2;
  double t_import = 60.0;
  double t_file_body = 735.0;
  double measured_seconds = 11127.0;
};

double rebuild_estimate(const RebuildCheck& p);

}  // namespace leansnap::model
