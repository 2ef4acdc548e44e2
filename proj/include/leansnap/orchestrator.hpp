#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leansnap/client.hpp"
#include "leansnap/profile.hpp"

namespace leansnap::orch {

enum class ProveMode { Native, Fallback };

struct Portfolio {
  std::vector<std::string> tactics;

  // The default 7-tactic portfolio, in dispatch order.
  static const Portfolio& standard();
  int size() const { return static_cast<int>(tactics.size()); }
};

// Parameters of the rebuild-per-branch path.
struct FallbackPlan {
  int workers = 1;
  double ram_gb = 0.0;       // informational when workers given directly
  double worker_gb = 3.0;    // memory per concurrent rebuild
  // When > 0, replaces the profile's fallbackBranchSeconds (used by
  // projections; normal runs take the profile value).
  double per_branch_seconds = 0.0;
  // Behind-a-flag mode: stop scheduling branches for a hole once one closed.
  // Excluded from benchmark runs, which execute the complete branch set.
  bool cancel_on_success = false;
  double jitter_sigma = 0.0;
  std::uint64_t seed = 0;

  // W = max(1, floor(ram / worker_gb)).
  static FallbackPlan from_ram(double ram_gb, double worker_gb = 3.0);
};

struct HoleReport {
  int hole_index = 0;
  std::vector<std::string> closed_by;  // portfolio order
};

struct ProveOutcome {
  std::string theorem_id;
  ProveMode mode = ProveMode::Native;
  bool proved = false;
  int branch_count = 0;  // H x C, the enumerated set
  int branches_skipped = 0;  // only under cancel_on_success
  double wall_seconds = 0.0;
  double peak_mem_gb = std::numeric_limits<double>::quiet_NaN();
  double tactic_cpu_seconds = 0.0;  // total cpu across executed branches
  std::vector<HoleReport> holes;
};

// RPC failure that survived the retry budget.
class ServerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probe the server for snapshot support. Any failure (method-not-found,
// transport fault, no connection at all) selects the fallback path.
ProveMode detect_mode(client::SnapshotClient* connection);

// Native path: open the document, then for each hole one capture followed by
// one branch call carrying the whole portfolio. Batches for different holes
// overlap in virtual time. peak_mem_gb is left NaN; the caller owning the
// simulator fills it from the session ledger.
ProveOutcome prove_native(client::SnapshotClient& connection,
                          const TheoremProfile& profile,
                          const Portfolio& portfolio);

// Fallback path: every (hole, tactic) branch is an independent rebuild of
// duration fallbackBranchSeconds + tactic cpu, scheduled FIFO on a W-wide
// pool in virtual time. Proved-set matches prove_native on the same profile.
ProveOutcome prove_fallback(const TheoremProfile& profile,
                            const Portfolio& portfolio,
                            const FallbackPlan& plan);

// Full phase: detect or obey the override, then dispatch. `connection` may
// be null when the fallback path is forced or no server exists.
ProveOutcome run_prove_phase(client::SnapshotClient* connection,
                             const TheoremProfile& profile,
                             const Portfolio& portfolio,
                             const FallbackPlan& plan,
                             std::optional<ProveMode> mode_override = {});

}  // namespace leansnap::orch
