#include "leansnap/sim_server.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace leansnap::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_string(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) h = splitmix64(h ^ c);
  return h;
}

double unit_double(std::uint64_t h) {
  // 53 high bits -> [0, 1)
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t VirtualClock::schedule(double time,
                                     std::function<void(double)> fn) {
  if (time < now_) {
    throw std::logic_error("event scheduled in the past");
  }
  std::uint64_t seq = next_seq_++;
  pending_.emplace(std::make_pair(time, seq), std::move(fn));
  return seq;
}

bool VirtualClock::step() {
  if (pending_.empty()) return false;
  auto it = pending_.begin();
  now_ = it->first.first;
  auto fn = std::move(it->second);
  pending_.erase(it);
  fn(now_);
  return true;
}

double VirtualClock::run_until_idle() {
  while (step()) {
  }
  return now_;
}

double jitter_factor(std::uint64_t seed, const std::string& theorem_id,
                     int hole_index, const std::string& tactic, double sigma) {
  if (sigma <= 0.0) return 1.0;
  std::uint64_t h = splitmix64(seed);
  h = mix_string(h, theorem_id);
  h = splitmix64(h ^ static_cast<std::uint64_t>(hole_index));
  h = mix_string(h, tactic);
  double u1 = unit_double(h);
  double u2 = unit_double(splitmix64(h));
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return std::exp(sigma * z);
}

std::string import_header(const std::string& text) {
  std::string header;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::size_t end = eol == std::string::npos ? text.size() : eol + 1;
    std::string_view line(text.data() + pos, end - pos);
    std::size_t first = line.find_first_not_of(" \t\r\n");
    bool qualifies =
        first == std::string_view::npos ||
        line.substr(first, 2) == "--" ||
        line.substr(first, 6) == "import";
    if (!qualifies) break;
    header.append(line);
    if (eol == std::string::npos) break;
    pos = end;
  }
  return header;
}

SimSession::SimSession(SimOptions options) : options_(options) {}

void SimSession::register_profile(TheoremProfile profile) {
  std::string uri = profile.uri();
  profiles_.insert_or_assign(uri, std::move(profile));
}

void SimSession::record_(double time, const std::string& what) {
  trace_.push_back({time, trace_seq_++, what});
}

void SimSession::fail_(int code, const std::string& message) const {
  throw wire::RpcFailure({code, message});
}

SimSession::OpenAck SimSession::handle_open_document(const std::string& uri,
                                                     const std::string& text) {
  auto pit = profiles_.find(uri);
  if (pit == profiles_.end()) {
    fail_(wire::kErrUnknownDocument, "no profile registered for " + uri);
  }
  const TheoremProfile& p = pit->second;

  double arrival = clock_.now();
  double t0 = arrival + p.session_overhead_seconds;

  bool warm = false;
  if (options_.level == ServerLevel::Level1) {
    std::string header = import_header(text);
    warm = warm_header_.has_value() && *warm_header_ == header;
    warm_header_ = header;
  }
  double imports_done = t0 + (warm ? 0.0 : p.import_seconds);

  OpenDoc doc;
  doc.profile = &pit->second;
  doc.ack_time = t0;
  doc.imports_done = imports_done;
  int h = p.hole_count();
  for (int k = 0; k < h; ++k) {
    doc.hole_ready.push_back(imports_done +
                             p.body_seconds * (k + 1) / static_cast<double>(h));
  }

  ledger_.shared_env_gb = std::max(ledger_.shared_env_gb, p.env_gb);
  ledger_.per_branch_kb = std::max(ledger_.per_branch_kb, p.mctx_kb);
  ledger_.note_peak();

  clock_.schedule(t0, [this, uri](double t) { record_(t, "open " + uri); });
  clock_.schedule(imports_done,
                  [this, uri](double t) { record_(t, "imports " + uri); });
  for (int k = 0; k < h; ++k) {
    clock_.schedule(doc.hole_ready[static_cast<std::size_t>(k)],
                    [this, uri, k](double t) {
                      record_(t, "hole " + std::to_string(k) + " " + uri);
                    });
  }
  if (h == 0) {
    clock_.schedule(imports_done + p.body_seconds,
                    [this, uri](double t) { record_(t, "body " + uri); });
  }

  open_docs_.insert_or_assign(uri, std::move(doc));
  return {t0, warm};
}

bool SimSession::handle_ping() const {
  if (options_.level != ServerLevel::Level2) {
    fail_(wire::kErrMethodNotFound,
          "method not found: " + std::string(wire::kMethodPing));
  }
  return true;
}

SimSession::CaptureReply SimSession::handle_capture(const std::string& uri,
                                                    int line, int character) {
  if (options_.level != ServerLevel::Level2) {
    fail_(wire::kErrMethodNotFound,
          "method not found: " + std::string(wire::kMethodCapture));
  }
  auto dit = open_docs_.find(uri);
  if (dit == open_docs_.end()) {
    fail_(wire::kErrDocumentNotOpen, "document not open: " + uri);
  }
  OpenDoc& doc = dit->second;
  const auto& holes = doc.profile->holes;
  int hole = -1;
  for (std::size_t k = 0; k < holes.size(); ++k) {
    if (holes[k].line == line && holes[k].character == character) {
      hole = static_cast<int>(k);
      break;
    }
  }
  if (hole < 0) {
    fail_(wire::kErrPositionNotASorry,
          "no sorry at " + std::to_string(line) + ":" +
              std::to_string(character));
  }

  double issue = std::max(doc.ack_time, clock_.now());
  double ready = doc.hole_ready[static_cast<std::size_t>(hole)];
  double at = std::max(issue, ready);

  std::string id = "snap-" + std::to_string(next_snapshot_++);
  snapshots_.emplace(id, Snapshot{uri, hole, at});
  clock_.schedule(at, [this, id, hole](double t) {
    record_(t, "capture " + id + " hole " + std::to_string(hole));
  });
  return {id, at};
}

SimSession::BranchReply SimSession::handle_branch(
    const std::string& snapshot_id, const std::vector<std::string>& tactics) {
  if (options_.level != ServerLevel::Level2) {
    fail_(wire::kErrMethodNotFound,
          "method not found: " + std::string(wire::kMethodBranch));
  }
  if (tactics.empty()) {
    fail_(wire::kErrInvalidParams, "configs must be non-empty");
  }
  auto sit = snapshots_.find(snapshot_id);
  if (sit == snapshots_.end()) {
    fail_(wire::kErrUnknownSnapshot, "unknown snapshot: " + snapshot_id);
  }
  const Snapshot& snap = sit->second;
  const OpenDoc& doc = open_docs_.at(snap.uri);
  const TheoremProfile& p = *doc.profile;
  const HoleSpec& hole = p.holes[static_cast<std::size_t>(snap.hole_index)];

  BranchReply reply;
  double max_cpu = 0.0;
  for (const std::string& tactic : tactics) {
    BranchOutcome out;
    auto it = hole.tactics.find(tactic);
    double cpu_ms = it == hole.tactics.end() ? 0.0 : it->second.cpu_ms;
    out.cpu_seconds = cpu_ms / 1000.0 *
                      jitter_factor(options_.seed, p.id, snap.hole_index,
                                    tactic, options_.jitter_sigma);
    if (it != hole.tactics.end() && it->second.closes) {
      out.ok = true;
    } else {
      out.ok = false;
      out.error = "tactic '" + tactic + "' failed";
    }
    max_cpu = std::max(max_cpu, out.cpu_seconds);
    reply.results.push_back(std::move(out));
  }

  double dispatch = std::max(snap.captured_at, clock_.now());
  double duration = options_.batch_latency_seconds +
                    options_.dispatch_overhead_factor * max_cpu;
  reply.time = dispatch + duration;

  int n = static_cast<int>(tactics.size());
  std::string id = snapshot_id;
  clock_.schedule(dispatch, [this, id, n](double t) {
    ledger_.active_branches += n;
    ledger_.note_peak();
    record_(t, "batch+" + std::to_string(n) + " " + id);
  });
  clock_.schedule(reply.time, [this, id, n](double t) {
    ledger_.active_branches -= n;
    record_(t, "batch-" + std::to_string(n) + " " + id);
  });
  return reply;
}

double SimSession::run_until_idle() { return clock_.run_until_idle(); }

std::optional<wire::RpcEnvelope> SimServer::handle(
    const wire::RpcEnvelope& request) {
  using wire::Json;
  const std::string& method = request.method;
  bool is_notification = request.is_notification();

  auto error_out = [&](const wire::RpcError& err)
      -> std::optional<wire::RpcEnvelope> {
    if (is_notification) return std::nullopt;
    return wire::make_error_response(request.id, err);
  };

  try {
    if (method == wire::kMethodDidOpen) {
      const Json& params = request.params;
      const Json& td = params.contains("textDocument")
                           ? params.at("textDocument")
                           : params;
      std::string uri = td.at("uri").get<std::string>();
      std::string text = td.value("text", std::string());
      auto ack = session_->handle_open_document(uri, text);
      if (is_notification) return std::nullopt;
      return wire::make_result_response(request.id, Json{{"ok", true}},
                                        ack.ack_time);
    }
    if (method == wire::kMethodPing) {
      bool ok = session_->handle_ping();
      return wire::make_result_response(request.id, Json{{"ok", ok}},
                                        session_->now());
    }
    if (method == wire::kMethodCapture) {
      const Json& params = request.params;
      if (!params.is_object() || !params.contains("uri") ||
          !params.contains("line") || !params.contains("character") ||
          !params.at("line").is_number_integer() ||
          !params.at("character").is_number_integer()) {
        return error_out({wire::kErrInvalidParams,
                          "capture params must be {uri, line, character}"});
      }
      auto reply = session_->handle_capture(
          params.at("uri").get<std::string>(), params.at("line").get<int>(),
          params.at("character").get<int>());
      return wire::make_result_response(
          request.id, Json{{"snapshotId", reply.snapshot_id}}, reply.time);
    }
    if (method == wire::kMethodBranch) {
      const Json& params = request.params;
      if (!params.is_object() || !params.contains("snapshotId") ||
          !params.contains("configs") || !params.at("configs").is_array()) {
        return error_out({wire::kErrInvalidParams,
                          "branch params must be {snapshotId, configs}"});
      }
      std::vector<std::string> tactics;
      for (const Json& cfg : params.at("configs")) {
        if (!cfg.is_object() || !cfg.contains("tactic") ||
            !cfg.at("tactic").is_string() ||
            cfg.at("tactic").get<std::string>().empty()) {
          return error_out({wire::kErrInvalidParams,
                            "each config must carry a non-empty tactic"});
        }
        tactics.push_back(cfg.at("tactic").get<std::string>());
      }
      auto reply = session_->handle_branch(
          params.at("snapshotId").get<std::string>(), tactics);
      Json results = Json::array();
      for (const auto& r : reply.results) {
        Json item;
        item["ok"] = r.ok;
        item["error"] = r.ok ? Json(nullptr) : Json(r.error);
        item["cpuSeconds"] = r.cpu_seconds;
        results.push_back(std::move(item));
      }
      return wire::make_result_response(request.id, std::move(results),
                                        reply.time);
    }
    // Anything else is outside the served surface.
    if (is_notification) return std::nullopt;
    return wire::make_method_not_found(request.id, method);
  } catch (const wire::RpcFailure& e) {
    return error_out(e.error());
  } catch (const Json::exception& e) {
    return error_out({wire::kErrInvalidParams, e.what()});
  } catch (const std::exception& e) {
    return error_out({wire::kErrInternal, e.what()});
  }
}

}  // namespace leansnap::sim
