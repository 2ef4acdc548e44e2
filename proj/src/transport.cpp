#include "leansnap/transport.hpp"

#include <algorithm>
#include <cstring>

namespace leansnap::transport {

using wire::FrameError;
using wire::FramingError;

std::optional<wire::RpcEnvelope> read_envelope(ByteStream& stream) {
  // Header first, byte by byte until the blank line. Headers are tiny, so
  // per-byte reads cost nothing that matters here.
  std::string header;
  char c;
  while (header.size() < 4 ||
         header.compare(header.size() - 4, 4, "\r\n\r\n") != 0) {
    std::size_t n = stream.read_some(&c, 1);
    if (n == 0) {
      if (header.empty()) return std::nullopt;
      throw FramingError(FrameError::MalformedHeader,
                         "stream ended inside a frame header");
    }
    header.push_back(c);
    if (header.size() > 4096) {
      throw FramingError(FrameError::MalformedHeader,
                         "frame header exceeds 4096 bytes");
    }
  }
  std::string_view sv(header);
  constexpr std::string_view prefix = "Content-Length: ";
  if (sv.substr(0, prefix.size()) != prefix) {
    throw FramingError(FrameError::MalformedHeader,
                       "expected Content-Length header");
  }
  std::string_view digits = sv.substr(prefix.size(), sv.size() - prefix.size() - 4);
  std::size_t length = 0;
  for (char d : digits) {
    if (d < '0' || d > '9') {
      throw FramingError(FrameError::MalformedHeader,
                         "Content-Length value is not a plain integer");
    }
    length = length * 10 + static_cast<std::size_t>(d - '0');
  }
  if (digits.empty()) {
    throw FramingError(FrameError::MalformedHeader, "empty Content-Length");
  }

  std::string body(length, '\0');
  std::size_t got = 0;
  while (got < length) {
    std::size_t n = stream.read_some(body.data() + got, length - got);
    if (n == 0) {
      throw FramingError(FrameError::TruncatedBody,
                         "stream ended inside a frame body");
    }
    got += n;
  }
  std::string framed = header + body;
  std::size_t pos = 0;
  return wire::decode_envelope(framed, pos);
}

void write_envelope(ByteStream& stream, const wire::RpcEnvelope& env) {
  stream.write(wire::encode_envelope(env));
}

void MemoryStream::write(std::string_view bytes) { data_.append(bytes); }

std::size_t MemoryStream::read_some(char* buf, std::size_t max) {
  std::size_t n = std::min(max, data_.size() - pos_);
  std::memcpy(buf, data_.data() + pos_, n);
  pos_ += n;
  return n;
}

void ServedStream::write(std::string_view bytes) {
  inbox_.append(bytes);
  pump_();
}

std::size_t ServedStream::read_some(char* buf, std::size_t max) {
  std::size_t n = std::min(max, outbox_.size() - outbox_pos_);
  std::memcpy(buf, outbox_.data() + outbox_pos_, n);
  outbox_pos_ += n;
  if (outbox_pos_ == outbox_.size()) {
    outbox_.clear();
    outbox_pos_ = 0;
  }
  return n;
}

void ServedStream::pump_() {
  for (;;) {
    // An incomplete frame just means more bytes are coming; only decode once
    // the header terminator is present, and treat a short body as "wait".
    if (inbox_.find("\r\n\r\n", inbox_pos_) == std::string::npos) return;
    std::size_t pos = inbox_pos_;
    wire::RpcEnvelope req;
    try {
      req = wire::decode_envelope(inbox_, pos);
    } catch (const FramingError& e) {
      if (e.kind() == FrameError::TruncatedBody) return;
      throw;
    }
    inbox_pos_ = pos;
    if (inbox_pos_ == inbox_.size()) {
      inbox_.clear();
      inbox_pos_ = 0;
    }
    if (auto resp = handler_(req)) {
      outbox_ += wire::encode_envelope(*resp);
    }
  }
}

}  // namespace leansnap::transport
