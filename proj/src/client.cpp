#include "leansnap/client.hpp"

namespace leansnap::client {

using wire::Json;

wire::RpcEnvelope SnapshotClient::call_(std::string_view method, Json params) {
  std::int64_t id = next_id_++;
  transport::write_envelope(*stream_,
                            wire::make_request(method, std::move(params), id));
  if (auto hit = stashed_.find(id); hit != stashed_.end()) {
    auto env = std::move(hit->second);
    stashed_.erase(hit);
    return env;
  }
  for (;;) {
    auto env = transport::read_envelope(*stream_);
    if (!env) {
      throw TransportError("connection closed while awaiting response " +
                           std::to_string(id));
    }
    if (!env->is_response()) continue;  // server-initiated traffic: ignore
    if (env->id.is_number_integer() &&
        env->id.get<std::int64_t>() == id) {
      if (env->error) throw wire::RpcFailure(*env->error);
      return *env;
    }
    if (env->id.is_number_integer()) {
      stashed_.emplace(env->id.get<std::int64_t>(), std::move(*env));
    }
  }
}

bool SnapshotClient::ping() {
  try {
    auto env = call_(wire::kMethodPing, Json::object());
    return env.result.is_object() && env.result.value("ok", false);
  } catch (const wire::RpcFailure& e) {
    if (e.code() == wire::kErrMethodNotFound) return false;
    throw;
  }
}

void SnapshotClient::open_document(const std::string& uri,
                                   const std::string& text) {
  Json params{{"textDocument",
               {{"uri", uri}, {"languageId", "lean"}, {"version", 1},
                {"text", text}}}};
  transport::write_envelope(
      *stream_, wire::make_notification(wire::kMethodDidOpen, params));
}

CaptureReply SnapshotClient::capture(const std::string& uri, int line,
                                     int character) {
  Json params{{"uri", uri}, {"line", line}, {"character", character}};
  auto env = call_(wire::kMethodCapture, std::move(params));
  CaptureReply reply;
  reply.snapshot_id = env.result.at("snapshotId").get<std::string>();
  reply.virtual_now = env.virtual_now.value_or(0.0);
  return reply;
}

BranchReply SnapshotClient::branch(const std::string& snapshot_id,
                                   const std::vector<std::string>& tactics) {
  Json configs = Json::array();
  for (const auto& t : tactics) configs.push_back({{"tactic", t}});
  Json params{{"snapshotId", snapshot_id}, {"configs", std::move(configs)}};
  auto env = call_(wire::kMethodBranch, std::move(params));
  BranchReply reply;
  reply.virtual_now = env.virtual_now.value_or(0.0);
  for (const Json& item : env.result) {
    TacticResult r;
    r.ok = item.value("ok", false);
    if (item.contains("error") && item.at("error").is_string()) {
      r.error = item.at("error").get<std::string>();
    }
    r.cpu_seconds = item.value("cpuSeconds", 0.0);
    reply.results.push_back(std::move(r));
  }
  return reply;
}

}  // namespace leansnap::client
