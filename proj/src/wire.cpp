#include "leansnap/wire.hpp"

#include <charconv>

namespace leansnap::wire {

namespace {

constexpr std::string_view kHeaderPrefix = "Content-Length: ";
constexpr std::string_view kHeaderTerminator = "\r\n\r\n";

bool known_method(std::string_view method) {
  return method == kMethodPing || method == kMethodCapture ||
         method == kMethodBranch || method == kMethodDidOpen;
}

}  // namespace

std::string frame_message(std::string_view payload) {
  std::string out;
  out.reserve(kHeaderPrefix.size() + 24 + payload.size());
  out += kHeaderPrefix;
  out += std::to_string(payload.size());
  out += kHeaderTerminator;
  out += payload;
  return out;
}

std::string read_framed_payload(std::string_view buffer, std::size_t& pos) {
  std::string_view rest = buffer.substr(pos);
  std::size_t term = rest.find(kHeaderTerminator);
  if (term == std::string_view::npos) {
    throw FramingError(FrameError::MalformedHeader,
                       "no header terminator before end of input");
  }
  std::string_view header = rest.substr(0, term);
  if (header.substr(0, kHeaderPrefix.size()) != kHeaderPrefix) {
    throw FramingError(FrameError::MalformedHeader,
                       "expected Content-Length header, got: " +
                           std::string(header.substr(0, 40)));
  }
  std::string_view digits = header.substr(kHeaderPrefix.size());
  std::size_t length = 0;
  const char* first = digits.data();
  const char* last = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, length);
  if (ec != std::errc() || ptr != last || digits.empty()) {
    throw FramingError(FrameError::MalformedHeader,
                       "Content-Length value is not a plain integer: " +
                           std::string(digits));
  }
  std::size_t body_start = term + kHeaderTerminator.size();
  if (rest.size() - body_start < length) {
    throw FramingError(
        FrameError::TruncatedBody,
        "body truncated: expected " + std::to_string(length) + " bytes, have " +
            std::to_string(rest.size() - body_start));
  }
  pos += body_start + length;
  return std::string(rest.substr(body_start, length));
}

Json envelope_to_json(const RpcEnvelope& env) {
  Json j;
  j["jsonrpc"] = "2.0";
  if (!env.method.empty()) {
    j["method"] = env.method;
    if (!env.params.is_null()) j["params"] = env.params;
    if (!env.id.is_null()) j["id"] = env.id;
    return j;
  }
  j["id"] = env.id;
  if (env.error) {
    j["error"] = {{"code", env.error->code}, {"message", env.error->message}};
  } else {
    j["result"] = env.result;
  }
  if (env.virtual_now) j["virtualNow"] = *env.virtual_now;
  return j;
}

RpcEnvelope envelope_from_json(const Json& j) {
  if (!j.is_object()) {
    throw FramingError(FrameError::DecodeError, "payload is not a JSON object");
  }
  RpcEnvelope env;
  if (j.contains("id")) env.id = j.at("id");
  if (j.contains("method")) env.method = j.at("method").get<std::string>();
  if (j.contains("params")) env.params = j.at("params");
  if (j.contains("result")) env.result = j.at("result");
  if (j.contains("error")) {
    const Json& e = j.at("error");
    RpcError err;
    err.code = e.value("code", 0);
    err.message = e.value("message", std::string());
    env.error = err;
  }
  if (j.contains("virtualNow") && j.at("virtualNow").is_number()) {
    env.virtual_now = j.at("virtualNow").get<double>();
  }
  return env;
}

RpcEnvelope make_request(std::string_view method, Json params,
                         std::int64_t id) {
  if (!known_method(method)) throw UnknownMethodError(std::string(method));
  RpcEnvelope env;
  env.method = std::string(method);
  env.params = std::move(params);
  env.id = id;
  return env;
}

RpcEnvelope make_notification(std::string_view method, Json params) {
  if (!known_method(method)) throw UnknownMethodError(std::string(method));
  RpcEnvelope env;
  env.method = std::string(method);
  env.params = std::move(params);
  return env;
}

RpcEnvelope make_result_response(Json id, Json result,
                                 std::optional<double> virtual_now) {
  RpcEnvelope env;
  env.id = std::move(id);
  env.result = std::move(result);
  env.virtual_now = virtual_now;
  return env;
}

RpcEnvelope make_error_response(Json id, RpcError error,
                                std::optional<double> virtual_now) {
  RpcEnvelope env;
  env.id = std::move(id);
  env.error = std::move(error);
  env.virtual_now = virtual_now;
  return env;
}

RpcEnvelope make_method_not_found(Json id, std::string_view method) {
  return make_error_response(
      std::move(id),
      RpcError{kErrMethodNotFound,
               "method not found: " + std::string(method)});
}

std::string encode_envelope(const RpcEnvelope& env) {
  return frame_message(envelope_to_json(env).dump());
}

RpcEnvelope decode_envelope(std::string_view buffer, std::size_t& pos) {
  std::string payload = read_framed_payload(buffer, pos);
  Json j = Json::parse(payload, nullptr, false);
  if (j.is_discarded()) {
    throw FramingError(FrameError::DecodeError, "body is not valid JSON");
  }
  return envelope_from_json(j);
}

}  // namespace leansnap::wire
