#include "teleop/transport/gaps.hpp"

namespace teleop::transport {

std::optional<SequenceGap> GapDetector::observe(std::uint32_t seq) {
  ++received_;
  if (!last_) {
    last_ = seq;
    return std::nullopt;
  }
  const std::uint32_t expected = *last_ + 1;
  const std::uint32_t ahead = seq - expected;
  if (ahead == 0) {
    last_ = seq;
    return std::nullopt;
  }
  if (ahead >= 0x80000000u) {
    ++reordered_;
    return std::nullopt;
  }
  SequenceGap g{expected, seq};
  gaps_.push_back(g);
  lost_ += g.lost();
  last_ = seq;
  return g;
}

}  // namespace teleop::transport
