#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leansnap/profile.hpp"
#include "leansnap/wire.hpp"

namespace leansnap::sim {

// Capability tiers of the simulated server. Level0 rebuilds everything and
// has no snapshot RPCs; Level1 keeps a warm import cache across theorems but
// still lacks the snapshot RPCs; Level2 serves all three.
enum class ServerLevel { Level0, Level1, Level2 };

struct SimOptions {
  ServerLevel level = ServerLevel::Level2;
  double batch_latency_seconds = 1.0;
  double dispatch_overhead_factor = 1.20;
  // Log-normal multiplier on reported cpu, sigma in log space; 0 disables.
  double jitter_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct TraceEvent {
  double time = 0.0;
  std::uint64_t seq = 0;
  std::string what;

  bool operator==(const TraceEvent&) const = default;
};

// Event queue plus current virtual time. Ties are broken by insertion
// sequence, so identical schedules drain identically.
class VirtualClock {
 public:
  double now() const { return now_; }
  bool idle() const { return pending_.empty(); }

  std::uint64_t schedule(double time, std::function<void(double)> fn);

  // Runs the earliest pending event; returns false when the queue is empty.
  bool step();

  double run_until_idle();

 private:
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::map<std::pair<double, std::uint64_t>, std::function<void(double)>>
      pending_;
};

// Memory accounting for one session. The shared environment is counted once;
// each in-flight branch adds one KB-scale context copy. The fallback side is
// computed analytically by the orchestrator's pool instead.
struct MemoryLedger {
  double shared_env_gb = 0.0;
  double per_branch_kb = 0.0;
  int active_branches = 0;
  double fallback_worker_gb = 3.0;
  double peak_gb = 0.0;

  double current_gb() const {
    return shared_env_gb + active_branches * per_branch_kb * 1e-6;
  }
  void note_peak() {
    if (current_gb() > peak_gb) peak_gb = current_gb();
  }
};

// Deterministic per-branch cpu multiplier, log-normal in sigma. Keyed by
// (seed, theorem, hole, tactic) so runs with one seed always agree.
double jitter_factor(std::uint64_t seed, const std::string& theorem_id,
                     int hole_index, const std::string& tactic, double sigma);

// One simulated server session: a single logical timeline serving the three
// snapshot RPCs plus document-open for registered theorem profiles.
class SimSession {
 public:
  explicit SimSession(SimOptions options = {});

  void register_profile(TheoremProfile profile);
  const SimOptions& options() const { return options_; }

  struct OpenAck {
    double ack_time = 0.0;  // arrival + sessionOverheadSeconds
    bool warm_import = false;
  };
  OpenAck handle_open_document(const std::string& uri, const std::string& text);

  bool handle_ping() const;  // throws method-not-found below Level2

  struct CaptureReply {
    std::string snapshot_id;
    double time = 0.0;
  };
  CaptureReply handle_capture(const std::string& uri, int line, int character);

  struct BranchOutcome {
    bool ok = false;
    std::string error;  // empty iff ok
    double cpu_seconds = 0.0;
  };
  struct BranchReply {
    std::vector<BranchOutcome> results;
    double time = 0.0;  // batch completion
  };
  BranchReply handle_branch(const std::string& snapshot_id,
                            const std::vector<std::string>& tactics);

  double run_until_idle();
  double now() const { return clock_.now(); }
  double memory_peak_gb() const { return ledger_.peak_gb; }
  const MemoryLedger& ledger() const { return ledger_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  struct OpenDoc {
    const TheoremProfile* profile = nullptr;
    double ack_time = 0.0;
    double imports_done = 0.0;
    std::vector<double> hole_ready;
  };
  struct Snapshot {
    std::string uri;
    int hole_index = 0;
    double captured_at = 0.0;
  };

  void record_(double time, const std::string& what);
  [[noreturn]] void fail_(int code, const std::string& message) const;

  SimOptions options_;
  VirtualClock clock_;
  MemoryLedger ledger_;
  std::map<std::string, TheoremProfile> profiles_;  // by uri
  std::map<std::string, OpenDoc> open_docs_;
  std::map<std::string, Snapshot> snapshots_;
  std::optional<std::string> warm_header_;  // Level1 LRU of size 1
  std::vector<TraceEvent> trace_;
  std::uint64_t trace_seq_ = 0;
  int next_snapshot_ = 0;
};

// Leading lines of a document that form its import header: the maximal run
// of blank, comment-only, and `import` lines. Level1 cache key.
std::string import_header(const std::string& text);

// Wire adapter: decodes request envelopes, dispatches to a session, and
// builds response envelopes (with virtual-time metadata on success).
class SimServer {
 public:
  explicit SimServer(SimSession& session) : session_(&session) {}

  // Returns the response for requests, nullopt for notifications.
  std::optional<wire::RpcEnvelope> handle(const wire::RpcEnvelope& request);

 private:
  SimSession* session_;
};

}  // namespace leansnap::sim
