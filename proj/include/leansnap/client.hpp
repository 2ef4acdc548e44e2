#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "leansnap/transport.hpp"
#include "leansnap/wire.hpp"

namespace leansnap::client {

struct CaptureReply {
  std::string snapshot_id;
  double virtual_now = 0.0;
};

struct TacticResult {
  bool ok = false;
  std::string error;  // empty iff ok
  double cpu_seconds = 0.0;
};

struct BranchReply {
  std::vector<TacticResult> results;
  double virtual_now = 0.0;
};

// Client half of the snapshot protocol over any byte stream. Synchronous:
// each call writes one request and reads until its response arrives.
// Server errors surface as wire::RpcFailure; a dead stream as
// TransportError.
class SnapshotClient {
 public:
  explicit SnapshotClient(transport::ByteStream& stream) : stream_(&stream) {}

  class TransportError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  // Capability probe. True when the server answers {ok: true}; false when it
  // reports the method as unknown. Transport errors propagate.
  bool ping();

  void open_document(const std::string& uri, const std::string& text);

  CaptureReply capture(const std::string& uri, int line, int character);

  BranchReply branch(const std::string& snapshot_id,
                     const std::vector<std::string>& tactics);

 private:
  wire::RpcEnvelope call_(std::string_view method, wire::Json params);

  transport::ByteStream* stream_;
  std::int64_t next_id_ = 1;
  // Responses read while waiting for a different id (interleaving allowed).
  std::map<std::int64_t, wire::RpcEnvelope> stashed_;
};

}  // namespace leansnap::client
