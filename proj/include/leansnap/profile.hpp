#pragma once

#include <map>
#include <string>
#include <vector>

namespace leansnap {

// What a tactic does at one hole, per the profile's oracle.
struct TacticOutcome {
  bool closes = false;
  double cpu_ms = 0.0;
};

// One sorry hole: its position plus the oracle of tactic outcomes.
struct HoleSpec {
  int line = 0;
  int character = 0;
  std::map<std::string, TacticOutcome> tactics;
};

// Timing and memory profile of one theorem as the simulated server runs it.
// sessionOverheadSeconds carries the per-problem residual between the raw
// import/body components and the measured end-to-end wall time; it is a
// calibration input, not a derived quantity.
struct TheoremProfile {
  std::string id;
  std::string kind = "handcrafted";  // "end_to_end" | "handcrafted"
  bool synthetic = false;
  std::string sketch_text;

  double import_seconds = 60.0;
  double body_seconds = 15.0;
  double session_overhead_seconds = 0.0;
  double fallback_branch_seconds = 75.0;
  double env_gb = 3.2;   // shared environment, resident once per session
  double mctx_kb = 8.0;  // per-branch metavariable context copy

  std::vector<HoleSpec> holes;

  std::string uri() const { return "file:///" + id + ".lean"; }
  int hole_count() const { return static_cast<int>(holes.size()); }
};

}  // namespace leansnap
