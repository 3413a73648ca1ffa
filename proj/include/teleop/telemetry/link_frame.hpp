#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teleop/error.hpp"

namespace teleop::telemetry {

// Head-tracking radio frame:
//   0x7E | length (u16 big-endian) | payload | checksum
// checksum = 0xFF - (sum of payload bytes mod 256).
inline constexpr std::uint8_t kLinkStartByte = 0x7E;
inline constexpr std::size_t kLinkOverhead = 4;
inline constexpr std::size_t kMaxLinkPayload = 0xFFFF;

enum class LinkErrorKind {
  kBadStartByte,
  kTruncatedFrame,
  kChecksumMismatch,
  kLengthMismatch,  // more bytes than the length field declares
  kPayloadTooLarge,
};

class LinkFrameError : public Error {
 public:
  LinkFrameError(LinkErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  LinkErrorKind kind() const { return kind_; }

 private:
  LinkErrorKind kind_;
};

std::uint8_t link_checksum(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_link_frame(std::span<const std::uint8_t> payload);

/// Decodes exactly one frame. Throws LinkFrameError with a distinct kind for
/// each failure.
std::vector<std::uint8_t> decode_link_frame(std::span<const std::uint8_t> frame);

/// True iff `frame` decodes cleanly.
bool verify_link_frame(std::span<const std::uint8_t> frame);

/// Incremental deframer for a byte stream. Bytes before a start byte and
/// frames failing the checksum are discarded and counted.
class LinkFrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete, verified payload, if any.
  std::optional<std::vector<std::uint8_t>> next();

  std::size_t discarded_bytes() const { return discarded_bytes_; }
  std::size_t bad_frames() const { return bad_frames_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t discarded_bytes_ = 0;
  std::size_t bad_frames_ = 0;
};

/// Reads a replay file of concatenated link frames.
std::vector<std::vector<std::uint8_t>> read_link_replay(const std::string& path);
void write_link_replay(const std::string& path, const std::vector<std::vector<std::uint8_t>>& payloads);

}  // namespace teleop::telemetry
