#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace teleop::transport {

struct SequenceGap {
  std::uint32_t expected = 0;
  std::uint32_t received = 0;
  std::uint32_t lost() const { return received - expected; }  // modular

  bool operator==(const SequenceGap&) const = default;
};

/// Tracks one sender's sequence stream. Arithmetic is modulo 2^32; a number
/// less than half the ring ahead of the expected one is treated as a forward
/// jump, anything else as a late or duplicate arrival.
class GapDetector {
 public:
  /// Returns the gap ending at `seq`, if any.
  std::optional<SequenceGap> observe(std::uint32_t seq);

  const std::vector<SequenceGap>& gaps() const { return gaps_; }
  std::uint64_t total_lost() const { return lost_; }
  std::uint64_t reordered() const { return reordered_; }
  std::uint64_t received() const { return received_; }

 private:
  std::optional<std::uint32_t> last_;
  std::vector<SequenceGap> gaps_;
  std::uint64_t lost_ = 0;
  std::uint64_t reordered_ = 0;
  std::uint64_t received_ = 0;
};

}  // namespace teleop::transport
