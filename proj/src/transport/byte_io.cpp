#include "teleop/transport/byte_io.hpp"

namespace teleop::transport {

std::string_view to_string(ProtocolErrorKind k) {
  switch (k) {
    case ProtocolErrorKind::kBadMagic: return "bad-magic";
    case ProtocolErrorKind::kCrcMismatch: return "crc-mismatch";
    case ProtocolErrorKind::kUnknownType: return "unknown-type";
    case ProtocolErrorKind::kTruncated: return "truncated";
    case ProtocolErrorKind::kPayloadTooLarge: return "payload-too-large";
    case ProtocolErrorKind::kTrailingBytes: return "trailing-bytes";
    case ProtocolErrorKind::kMalformedPayload: return "malformed-payload";
  }
  return "unknown";
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) fail("payload ends early");
}

void ByteReader::fail(const std::string& what) const {
  throw ProtocolError(ProtocolErrorKind::kMalformedPayload, offset(), what);
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  const std::uint16_t v = static_cast<std::uint16_t>((data_[pos_] << 8) | data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_ + i];
  pos_ += 8;
  return v;
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  need(n);
  auto s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

void ByteReader::expect_end(const char* what) const {
  if (remaining() != 0) fail(std::string(what) + ": unexpected trailing payload bytes");
}

}  // namespace teleop::transport
