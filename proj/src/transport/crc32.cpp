#include "teleop/transport/crc32.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>

namespace teleop::transport {

std::uint32_t crc32_update(std::uint32_t crc, std::span<const std::uint8_t> bytes) {
  uLong c = crc;
  while (!bytes.empty()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size(), std::numeric_limits<uInt>::max()));
    c = ::crc32(c, bytes.data(), n);
    bytes = bytes.subspan(n);
  }
  return static_cast<std::uint32_t>(c);
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) { return crc32_update(0, bytes); }

}  // namespace teleop::transport
