#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "teleop/error.hpp"

namespace teleop::transport {

enum class ProtocolErrorKind {
  kBadMagic,
  kCrcMismatch,
  kUnknownType,
  kTruncated,
  kPayloadTooLarge,
  kTrailingBytes,
  kMalformedPayload,
};

std::string_view to_string(ProtocolErrorKind k);

/// Envelope or payload decode failure; `offset` is the byte offset into the
/// envelope where decoding stopped.
class ProtocolError : public Error {
 public:
  ProtocolError(ProtocolErrorKind kind, std::size_t offset, const std::string& what)
      : Error(std::string(to_string(kind)) + " at byte " + std::to_string(offset) + ": " + what),
        kind_(kind),
        offset_(offset) {}

  ProtocolErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ProtocolErrorKind kind_;
  std::size_t offset_;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

}  // namespace teleop::transport
