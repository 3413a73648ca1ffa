#include "teleop/transport/envelope.hpp"

#include <algorithm>

#include "teleop/transport/byte_io.hpp"
#include "teleop/transport/crc32.hpp"

namespace teleop::transport {

std::vector<std::uint8_t> encode_envelope(std::uint8_t type, std::uint8_t flags, std::uint32_t seq,
                                          std::uint64_t ts, std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxPayload) throw InvalidParameter("payload exceeds 16 MiB cap");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + payload.size() + kTrailerSize);
  ByteWriter w(out);
  w.bytes(kMagic);
  w.u8(type);
  w.u8(flags);
  w.u32(seq);
  w.u64(ts);
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.bytes(payload);
  w.u32(crc32(std::span<const std::uint8_t>(out).subspan(kMagic.size())));
  return out;
}

std::vector<std::uint8_t> encode_envelope(const Message& m) {
  const auto payload = encode_body(m.body);
  return encode_envelope(static_cast<std::uint8_t>(m.type()), m.flags, m.sequence, m.timestamp_us, payload);
}

namespace {

// Validates framing and returns the payload length. Shared by the stream
// reader so it can reject a bad header before the payload arrives.
std::optional<std::size_t> check_header(std::span<const std::uint8_t> bytes) {
  const std::size_t have_magic = std::min(bytes.size(), kMagic.size());
  for (std::size_t i = 0; i < have_magic; ++i)
    if (bytes[i] != kMagic[i]) throw ProtocolError(ProtocolErrorKind::kBadMagic, i, "envelope magic is not TSP1");
  if (bytes.size() < kHeaderSize) return std::nullopt;
  ByteReader r(bytes.subspan(18, 4), 18);
  const std::uint32_t len = r.u32();
  if (len > kMaxPayload)
    throw ProtocolError(ProtocolErrorKind::kPayloadTooLarge, 18, "declared payload " + std::to_string(len) + " bytes");
  return len;
}

}  // namespace

Message decode_envelope(std::span<const std::uint8_t> bytes) {
  const auto len = check_header(bytes);
  if (!len) throw ProtocolError(ProtocolErrorKind::kTruncated, bytes.size(), "envelope header incomplete");
  const std::size_t total = kHeaderSize + *len + kTrailerSize;
  if (bytes.size() < total)
    throw ProtocolError(ProtocolErrorKind::kTruncated, bytes.size(),
                        "need " + std::to_string(total) + " bytes, have " + std::to_string(bytes.size()));
  if (bytes.size() > total)
    throw ProtocolError(ProtocolErrorKind::kTrailingBytes, total, "bytes after envelope end");

  const std::size_t crc_at = kHeaderSize + *len;
  ByteReader trailer(bytes.subspan(crc_at, 4), crc_at);
  const std::uint32_t want = trailer.u32();
  const std::uint32_t got = crc32(bytes.subspan(kMagic.size(), crc_at - kMagic.size()));
  if (want != got) throw ProtocolError(ProtocolErrorKind::kCrcMismatch, crc_at, "crc32 mismatch");

  ByteReader h(bytes.subspan(4, kHeaderSize - 4), 4);
  const std::uint8_t type = h.u8();
  if (!is_known_type(type))
    throw ProtocolError(ProtocolErrorKind::kUnknownType, 4, "message type " + std::to_string(type));
  Message m;
  m.flags = h.u8();
  m.sequence = h.u32();
  m.timestamp_us = h.u64();
  m.body = decode_body(static_cast<MessageType>(type), bytes.subspan(kHeaderSize, *len), kHeaderSize);
  return m;
}

std::uint32_t Sequencer::next(MessageType t) { return ++last_.at(static_cast<std::size_t>(t)); }

void EnvelopeReader::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  } else if (pos_ > (1u << 20)) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<std::vector<std::uint8_t>> EnvelopeReader::next_raw() {
  const auto view = std::span<const std::uint8_t>(buf_).subspan(pos_);
  const auto len = check_header(view);
  if (!len) return std::nullopt;
  const std::size_t total = kHeaderSize + *len + kTrailerSize;
  if (view.size() < total) return std::nullopt;
  std::vector<std::uint8_t> out(view.begin(), view.begin() + static_cast<std::ptrdiff_t>(total));
  pos_ += total;
  return out;
}

std::optional<Message> EnvelopeReader::next() {
  auto raw = next_raw();
  if (!raw) return std::nullopt;
  return decode_envelope(*raw);
}

}  // namespace teleop::transport
