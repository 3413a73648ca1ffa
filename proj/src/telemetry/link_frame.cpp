#include "teleop/telemetry/link_frame.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

namespace teleop::telemetry {

std::uint8_t link_checksum(std::span<const std::uint8_t> payload) {
  unsigned sum = 0;
  for (std::uint8_t b : payload) sum += b;
  return static_cast<std::uint8_t>(0xFF - (sum & 0xFF));
}

std::vector<std::uint8_t> encode_link_frame(std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxLinkPayload)
    throw LinkFrameError(LinkErrorKind::kPayloadTooLarge, "link payload exceeds 65535 bytes");
  std::vector<std::uint8_t> out;
  out.reserve(payload.size() + kLinkOverhead);
  out.push_back(kLinkStartByte);
  out.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(payload.size() & 0xFF));
  out.insert(out.end(), payload.begin(), payload.end());
  out.push_back(link_checksum(payload));
  return out;
}

std::vector<std::uint8_t> decode_link_frame(std::span<const std::uint8_t> frame) {
  if (frame.empty()) throw LinkFrameError(LinkErrorKind::kTruncatedFrame, "empty link frame");
  if (frame[0] != kLinkStartByte) throw LinkFrameError(LinkErrorKind::kBadStartByte, "link frame: bad start byte");
  if (frame.size() < kLinkOverhead) throw LinkFrameError(LinkErrorKind::kTruncatedFrame, "link frame: truncated header");
  const std::size_t len = (static_cast<std::size_t>(frame[1]) << 8) | frame[2];
  if (frame.size() < len + kLinkOverhead)
    throw LinkFrameError(LinkErrorKind::kTruncatedFrame, "link frame: truncated payload");
  if (frame.size() > len + kLinkOverhead)
    throw LinkFrameError(LinkErrorKind::kLengthMismatch, "link frame: trailing bytes after checksum");
  const auto payload = frame.subspan(3, len);
  unsigned sum = frame[3 + len];
  for (std::uint8_t b : payload) sum += b;
  if ((sum & 0xFF) != 0xFF) throw LinkFrameError(LinkErrorKind::kChecksumMismatch, "link frame: checksum mismatch");
  return {payload.begin(), payload.end()};
}

bool verify_link_frame(std::span<const std::uint8_t> frame) {
  try {
    decode_link_frame(frame);
    return true;
  } catch (const LinkFrameError&) {
    return false;
  }
}

void LinkFrameReader::feed(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

std::optional<std::vector<std::uint8_t>> LinkFrameReader::next() {
  for (;;) {
    auto start = std::find(buf_.begin(), buf_.end(), kLinkStartByte);
    discarded_bytes_ += static_cast<std::size_t>(start - buf_.begin());
    buf_.erase(buf_.begin(), start);
    if (buf_.size() < kLinkOverhead) return std::nullopt;
    const std::size_t len = (static_cast<std::size_t>(buf_[1]) << 8) | buf_[2];
    if (buf_.size() < len + kLinkOverhead) return std::nullopt;
    const std::span<const std::uint8_t> frame(buf_.data(), len + kLinkOverhead);
    try {
      auto payload = decode_link_frame(frame);
      buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(frame.size()));
      return payload;
    } catch (const LinkFrameError&) {
      // Resynchronize on the next start byte.
      ++bad_frames_;
      ++discarded_bytes_;
      buf_.erase(buf_.begin());
    }
  }
}

std::vector<std::vector<std::uint8_t>> read_link_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open replay file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  LinkFrameReader reader;
  reader.feed(bytes);
  std::vector<std::vector<std::uint8_t>> out;
  while (auto p = reader.next()) out.push_back(std::move(*p));
  return out;
}

void write_link_replay(const std::string& path, const std::vector<std::vector<std::uint8_t>>& payloads) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write replay file '" + path + "'");
  for (const auto& p : payloads) {
    const auto f = encode_link_frame(p);
    out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size()));
  }
}

}  // namespace teleop::telemetry
