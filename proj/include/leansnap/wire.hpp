#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace leansnap::wire {

using Json = nlohmann::json;

// Methods understood by the snapshot-capable server. The strings are part of
// the protocol; clients probe kMethodPing and fall back when the server
// answers with method-not-found.
inline constexpr std::string_view kMethodPing = "$/lean/dspSnapshotPing";
inline constexpr std::string_view kMethodCapture = "$/lean/dspSnapshotCapture";
inline constexpr std::string_view kMethodBranch = "$/lean/dspSnapshotBranch";
inline constexpr std::string_view kMethodDidOpen = "textDocument/didOpen";

// JSON-RPC error codes. -32601/-32602/-32603 are the standard ones; the
// -320xx range is server-defined.
inline constexpr int kErrMethodNotFound = -32601;
inline constexpr int kErrInvalidParams = -32602;
inline constexpr int kErrInternal = -32603;
inline constexpr int kErrDocumentNotOpen = -32001;
inline constexpr int kErrPositionNotASorry = -32002;
inline constexpr int kErrUnknownSnapshot = -32003;
inline constexpr int kErrUnknownDocument = -32004;

enum class FrameError {
  MalformedHeader,  // header section is not "Content-Length: <n>\r\n\r\n"
  TruncatedBody,    // stream ended before <n> body bytes arrived
  DecodeError,      // body is not a JSON object
};

class FramingError : public std::runtime_error {
 public:
  FramingError(FrameError kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  FrameError kind() const { return kind_; }

 private:
  FrameError kind_;
};

class UnknownMethodError : public std::runtime_error {
 public:
  explicit UnknownMethodError(const std::string& method)
      : std::runtime_error("unknown method: " + method) {}
};

struct RpcError {
  int code = 0;
  std::string message;
};

// A JSON-RPC level failure: thrown by server handlers to produce an error
// response, and by clients when a call comes back with one.
class RpcFailure : public std::runtime_error {
 public:
  explicit RpcFailure(RpcError err)
      : std::runtime_error(err.message.empty()
                               ? "rpc error " + std::to_string(err.code)
                               : err.message),
        error_(std::move(err)) {}
  const RpcError& error() const { return error_; }
  int code() const { return error_.code; }

 private:
  RpcError error_;
};

// One decoded JSON-RPC message. Exactly one of the three shapes:
//   request       method != "", id != null
//   notification  method != "", id == null
//   response      method == "", result or error set
struct RpcEnvelope {
  Json id = nullptr;
  std::string method;
  Json params = nullptr;
  Json result = nullptr;
  std::optional<RpcError> error;
  // Simulator timing metadata carried next to result/error. Optional;
  // receivers that do not know the field ignore it.
  std::optional<double> virtual_now;

  bool is_request() const { return !method.empty() && !id.is_null(); }
  bool is_notification() const { return !method.empty() && id.is_null(); }
  bool is_response() const { return method.empty(); }
};

// Byte-level framing -------------------------------------------------------

// Wraps a payload as "Content-Length: <n>\r\n\r\n<payload>". <n> counts
// payload bytes, not characters.
std::string frame_message(std::string_view payload);

// Consumes one framed payload from buffer starting at pos, advancing pos past
// it. Throws FramingError. Returns the raw payload bytes.
std::string read_framed_payload(std::string_view buffer, std::size_t& pos);

// Envelope <-> JSON --------------------------------------------------------

Json envelope_to_json(const RpcEnvelope& env);
RpcEnvelope envelope_from_json(const Json& j);

// Convenience constructors. encode_request / encode_notification validate the
// method name against the protocol surface above and throw UnknownMethodError
// for anything else.
RpcEnvelope make_request(std::string_view method, Json params, std::int64_t id);
RpcEnvelope make_notification(std::string_view method, Json params);
RpcEnvelope make_result_response(Json id, Json result,
                                 std::optional<double> virtual_now = {});
RpcEnvelope make_error_response(Json id, RpcError error,
                                std::optional<double> virtual_now = {});
RpcEnvelope make_method_not_found(Json id, std::string_view method);

// Full encode: envelope -> framed wire bytes.
std::string encode_envelope(const RpcEnvelope& env);

// Full decode: one framed message -> envelope. Throws FramingError.
RpcEnvelope decode_envelope(std::string_view buffer, std::size_t& pos);

}  // namespace leansnap::wire
