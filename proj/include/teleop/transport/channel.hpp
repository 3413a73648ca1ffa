#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "teleop/transport/messages.hpp"

namespace teleop::transport {

/// One encoded envelope waiting to be sent.
struct OutboundItem {
  MessageType type = MessageType::kHeartbeat;
  std::uint32_t sequence = 0;
  std::vector<std::uint8_t> bytes;
};

struct ChannelMetrics {
  std::uint64_t media_enqueued = 0;
  std::uint64_t media_dropped = 0;
  std::uint64_t media_sent = 0;
  std::uint64_t control_enqueued = 0;
  std::uint64_t control_sent = 0;
  std::size_t control_high_water = 0;
  std::uint64_t backpressure_faults = 0;  // enqueues that found the control queue at/over watermark
};

/// Bounded FIFO that drops its oldest element when full.
template <typename T>
class LatestWinsQueue {
 public:
  explicit LatestWinsQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw InvalidParameter("queue capacity must be at least 1");
  }

  /// Returns true iff an older element was dropped to make room.
  bool push(T v) {
    bool dropped = false;
    if (q_.size() == capacity_) {
      q_.pop_front();
      dropped = true;
    }
    q_.push_back(std::move(v));
    return dropped;
  }
  std::optional<T> pop() {
    if (q_.empty()) return std::nullopt;
    T v = std::move(q_.front());
    q_.pop_front();
    return v;
  }
  std::size_t size() const { return q_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return q_.empty(); }

 private:
  std::size_t capacity_;
  std::deque<T> q_;
};

enum class PushResult { kQueued, kDroppedOldest, kOverWatermark, kClosed };

/// Two-plane outbound queue. VIDEO_FRAME goes to a latest-wins media queue;
/// everything else to a lossless FIFO that is always drained first.
/// Thread-safe; drop decisions are made under the same lock as the enqueue.
class OutboundChannel {
 public:
  OutboundChannel(std::size_t media_capacity = 2, std::size_t control_watermark = 256);

  PushResult push(OutboundItem item);
  /// Blocks up to `timeout` for an item. Returns nullopt on timeout or after close().
  std::optional<OutboundItem> pop(std::chrono::milliseconds timeout);
  std::optional<OutboundItem> try_pop();
  void close();
  bool closed() const;

  ChannelMetrics metrics() const;

 private:
  std::optional<OutboundItem> take_locked();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  LatestWinsQueue<OutboundItem> media_;
  std::deque<OutboundItem> control_;
  std::size_t watermark_;
  ChannelMetrics metrics_;
  bool closed_ = false;
};

}  // namespace teleop::transport
