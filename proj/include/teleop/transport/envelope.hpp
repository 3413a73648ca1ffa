#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "teleop/transport/messages.hpp"

namespace teleop::transport {

// Wire layout, all integers big-endian:
//   "TSP1" | type u8 | flags u8 | sequence u32 | timestamp_us u64 | payload_len u32 | payload | crc32 u32
// The CRC covers everything after the magic up to the end of the payload.
inline constexpr std::array<std::uint8_t, 4> kMagic = {'T', 'S', 'P', '1'};
inline constexpr std::size_t kHeaderSize = 22;
inline constexpr std::size_t kTrailerSize = 4;
inline constexpr std::size_t kMaxPayload = 16u << 20;

std::vector<std::uint8_t> encode_envelope(const Message& m);

/// Raw-payload form, for callers that already hold an encoded body.
std::vector<std::uint8_t> encode_envelope(std::uint8_t type, std::uint8_t flags, std::uint32_t seq,
                                          std::uint64_t ts, std::span<const std::uint8_t> payload);

/// Checks, in order: magic, length cap, truncation, trailing bytes, CRC, type,
/// payload structure. Throws ProtocolError.
Message decode_envelope(std::span<const std::uint8_t> bytes);

/// Per-type sequence numbers, starting at 1 and wrapping modulo 2^32.
class Sequencer {
 public:
  std::uint32_t next(MessageType t);

 private:
  std::array<std::uint32_t, 6> last_{};
};

/// Reassembles envelopes from a byte stream. Framing errors are fatal for the
/// stream (no resync): next() rethrows them.
class EnvelopeReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Complete envelope bytes, if buffered.
  std::optional<std::vector<std::uint8_t>> next_raw();
  std::optional<Message> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

}  // namespace teleop::transport
