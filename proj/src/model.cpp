#include "leansnap/model.hpp"

#include <cmath>
#include <stdexcept>

namespace leansnap::model {

namespace {

long ceil_div(long a, long b) { return (a + b - 1) / b; }

}  // namespace

double t_native(const CostParams& p) {
  return p.t_elab + static_cast<double>(p.branches()) * p.t_tactic;
}

double t_fallback(const CostParams& p) {
  if (p.workers < 1) throw std::invalid_argument("workers must be >= 1");
  long batches = ceil_div(p.branches(), p.workers);
  return static_cast<double>(batches) * (p.t_load + p.t_tactic);
}

double speedup(const CostParams& p) {
  double native = t_native(p);
  if (native <= 0) throw std::invalid_argument("t_native must be positive");
  return t_fallback(p) / native;
}

std::optional<long> crossover_branches(double t_elab, double t_load,
                                       double t_tactic) {
  if (t_load <= t_tactic) return std::nullopt;
  double threshold = t_elab / (t_load - t_tactic);
  return static_cast<long>(std::floor(threshold)) + 1;
}

double overhead_fraction(double fallback_per_branch, double tactic_cpu) {
  if (fallback_per_branch <= 0) {
    throw std::invalid_argument("fallback per-branch cost must be positive");
  }
  return (fallback_per_branch - tactic_cpu) / fallback_per_branch;
}

LevelTimes level_comparison(const LevelParams& p) {
  long b = p.branches;
  LevelTimes t;
  t.l0 = static_cast<double>(ceil_div(b, p.workers_l0)) * p.fallback_per_branch;
  t.l1 = p.t_import +
         static_cast<double>(ceil_div(b, p.workers_l1)) * p.t_body;
  t.l2 = p.session_overhead + p.t_import + p.t_body +
         static_cast<double>(b) * p.t_tactic;
  t.l12 = p.t_body + static_cast<double>(b) * p.t_tactic;
  t.r1 = t.l0 / t.l1;
  t.r2 = t.l0 / t.l2;
  t.r12 = t.l0 / t.l12;
  return t;
}

std::vector<ProjectionRow> projection_table(
    const std::vector<int>& branch_counts, const FitParams& fit,
    const std::map<int, std::pair<double, double>>& measured) {
  std::vector<ProjectionRow> rows;
  rows.reserve(branch_counts.size());
  for (int b : branch_counts) {
    ProjectionRow row;
    row.branches = b;
    if (auto it = measured.find(b); it != measured.end()) {
      row.measured = true;
      row.native_s = it->second.first;
      row.fallback_s = it->second.second;
    } else {
      row.native_s = fit.native_base + fit.native_per_branch * b;
      row.fallback_s = fit.fallback_per_branch * b;
    }
    row.speedup = row.fallback_s / row.native_s;
    rows.push_back(row);
  }
  return rows;
}

double rebuild_estimate(const RebuildCheck& p) {
  return static_cast<double>(ceil_div(p.branches, p.workers)) *
         (p.t_import + p.t_file_body);
}

SweepProjection sweep_projection(const SweepParams& p) {
  SweepProjection out;
  out.total_branches =
      static_cast<long>(p.drafts) * p.branches_per_draft;
  out.fallback_hours =
      static_cast<double>(ceil_div(out.total_branches, p.workers)) * p.t_load /
      3600.0;
  out.native_hours = p.drafts *
                     (p.t_elab + p.branches_per_draft * p.t_tactic) / 3600.0;
  return out;
}

}  // namespace leansnap::model
