#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "leansnap/wire.hpp"

namespace leansnap::transport {

// Minimal duplex byte stream. read_some returning 0 means end of stream.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write(std::string_view bytes) = 0;
  virtual std::size_t read_some(char* buf, std::size_t max) = 0;
};

// Reads one framed envelope. Returns nullopt on clean end-of-stream at a
// frame boundary; throws wire::FramingError when the stream dies mid-frame
// or the header is malformed.
std::optional<wire::RpcEnvelope> read_envelope(ByteStream& stream);

void write_envelope(ByteStream& stream, const wire::RpcEnvelope& env);

// Growable in-memory stream; writes append, reads consume. Used in tests and
// as the building block for the in-process link.
class MemoryStream : public ByteStream {
 public:
  void write(std::string_view bytes) override;
  std::size_t read_some(char* buf, std::size_t max) override;
  bool drained() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

// Client-side stream wired directly to a server-side frame handler. Bytes
// written by the client are decoded eagerly; each complete request is handed
// to the handler and any response is queued for the next read. Runs the real
// codec end to end without sockets, single-threaded and deterministic.
class ServedStream : public ByteStream {
 public:
  using Handler =
      std::function<std::optional<wire::RpcEnvelope>(const wire::RpcEnvelope&)>;

  explicit ServedStream(Handler handler) : handler_(std::move(handler)) {}

  void write(std::string_view bytes) override;
  std::size_t read_some(char* buf, std::size_t max) override;

 private:
  void pump_();

  Handler handler_;
  std::string inbox_;
  std::size_t inbox_pos_ = 0;
  std::string outbox_;
  std::size_t outbox_pos_ = 0;
};

}  // namespace leansnap::transport
