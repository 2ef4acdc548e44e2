#include "leansnap/orchestrator.hpp"

#include <algorithm>
#include <limits>

#include "leansnap/sim_server.hpp"

namespace leansnap::orch {

namespace {

// One retry per RPC, then ServerError.
template <typename Fn>
auto with_retry(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception&) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw ServerError(e.what());
    }
  }
}

}  // namespace

const Portfolio& Portfolio::standard() {
  static const Portfolio p{
      {"aesop", "norm_num", "omega", "ring", "linarith", "decide", "simp"}};
  return p;
}

FallbackPlan FallbackPlan::from_ram(double ram_gb, double worker_gb) {
  FallbackPlan plan;
  plan.ram_gb = ram_gb;
  plan.worker_gb = worker_gb;
  plan.workers = std::max(1, static_cast<int>(std::floor(ram_gb / worker_gb)));
  return plan;
}

ProveMode detect_mode(client::SnapshotClient* connection) {
  if (connection == nullptr) return ProveMode::Fallback;
  try {
    return connection->ping() ? ProveMode::Native : ProveMode::Fallback;
  } catch (const std::exception&) {
    return ProveMode::Fallback;
  }
}

ProveOutcome prove_native(client::SnapshotClient& connection,
                          const TheoremProfile& profile,
                          const Portfolio& portfolio) {
  if (portfolio.tactics.empty()) {
    throw std::invalid_argument("portfolio must be non-empty");
  }
  ProveOutcome outcome;
  outcome.theorem_id = profile.id;
  outcome.mode = ProveMode::Native;
  outcome.branch_count = profile.hole_count() * portfolio.size();

  connection.open_document(profile.uri(), profile.sketch_text);

  double wall = 0.0;
  bool all_closed = true;
  for (int k = 0; k < profile.hole_count(); ++k) {
    const HoleSpec& hole = profile.holes[static_cast<std::size_t>(k)];
    auto cap = with_retry([&] {
      return connection.capture(profile.uri(), hole.line, hole.character);
    });
    auto batch = with_retry(
        [&] { return connection.branch(cap.snapshot_id, portfolio.tactics); });

    HoleReport report;
    report.hole_index = k;
    for (std::size_t i = 0; i < batch.results.size(); ++i) {
      const auto& r = batch.results[i];
      outcome.tactic_cpu_seconds += r.cpu_seconds;
      if (r.ok) report.closed_by.push_back(portfolio.tactics[i]);
    }
    if (report.closed_by.empty()) all_closed = false;
    outcome.holes.push_back(std::move(report));
    wall = std::max(wall, batch.virtual_now);
  }
  outcome.proved = profile.hole_count() > 0 && all_closed;
  outcome.wall_seconds = wall;
  return outcome;
}

ProveOutcome prove_fallback(const TheoremProfile& profile,
                            const Portfolio& portfolio,
                            const FallbackPlan& plan) {
  if (portfolio.tactics.empty()) {
    throw std::invalid_argument("portfolio must be non-empty");
  }
  if (plan.workers < 1) {
    throw std::invalid_argument("fallback plan needs at least one worker");
  }

  ProveOutcome outcome;
  outcome.theorem_id = profile.id;
  outcome.mode = ProveMode::Fallback;
  int holes = profile.hole_count();
  int configs = portfolio.size();
  outcome.branch_count = holes * configs;
  outcome.holes.resize(static_cast<std::size_t>(holes));
  for (int k = 0; k < holes; ++k) {
    outcome.holes[static_cast<std::size_t>(k)].hole_index = k;
  }

  double per_branch = plan.per_branch_seconds > 0.0
                          ? plan.per_branch_seconds
                          : profile.fallback_branch_seconds;

  // W-wide FIFO pool in virtual time: branch i goes to the earliest-free
  // worker, lowest index on ties. Hole-major, portfolio order.
  std::vector<double> free_at(static_cast<std::size_t>(plan.workers), 0.0);
  // close_at[k]: earliest completion of a successful branch for hole k.
  std::vector<double> close_at(static_cast<std::size_t>(holes),
                               std::numeric_limits<double>::infinity());
  struct Done {
    double at;
    int hole;
    int config;
    bool ok;
    double cpu;
  };
  std::vector<Done> completed;

  double makespan = 0.0;
  for (int k = 0; k < holes; ++k) {
    const HoleSpec& hole = profile.holes[static_cast<std::size_t>(k)];
    for (int c = 0; c < configs; ++c) {
      const std::string& tactic = portfolio.tactics[static_cast<std::size_t>(c)];
      auto wit = std::min_element(free_at.begin(), free_at.end());
      double start = *wit;
      if (plan.cancel_on_success &&
          close_at[static_cast<std::size_t>(k)] <= start) {
        ++outcome.branches_skipped;
        continue;
      }
      auto oit = hole.tactics.find(tactic);
      double cpu_ms = oit == hole.tactics.end() ? 0.0 : oit->second.cpu_ms;
      double cpu = cpu_ms / 1000.0 *
                   sim::jitter_factor(plan.seed, profile.id, k, tactic,
                                      plan.jitter_sigma);
      bool ok = oit != hole.tactics.end() && oit->second.closes;
      double end = start + per_branch + cpu;
      *wit = end;
      makespan = std::max(makespan, end);
      outcome.tactic_cpu_seconds += cpu;
      if (ok) {
        close_at[static_cast<std::size_t>(k)] =
            std::min(close_at[static_cast<std::size_t>(k)], end);
      }
      completed.push_back({end, k, c, ok, cpu});
    }
  }

  for (const Done& d : completed) {
    if (d.ok) {
      outcome.holes[static_cast<std::size_t>(d.hole)].closed_by.push_back(
          portfolio.tactics[static_cast<std::size_t>(d.config)]);
    }
  }
  bool all_closed = holes > 0;
  for (const auto& h : outcome.holes) {
    if (h.closed_by.empty()) all_closed = false;
  }
  outcome.proved = all_closed;
  outcome.wall_seconds = makespan;
  outcome.peak_mem_gb =
      std::min(plan.workers, outcome.branch_count) * plan.worker_gb;
  return outcome;
}

ProveOutcome run_prove_phase(client::SnapshotClient* connection,
                             const TheoremProfile& profile,
                             const Portfolio& portfolio,
                             const FallbackPlan& plan,
                             std::optional<ProveMode> mode_override) {
  ProveMode mode = mode_override ? *mode_override : detect_mode(connection);
  if (mode == ProveMode::Native) {
    if (connection == nullptr) {
      throw std::invalid_argument("native mode requires a server connection");
    }
    return prove_native(*connection, profile, portfolio);
  }
  return prove_fallback(profile, portfolio, plan);
}

}  // namespace leansnap::orch
