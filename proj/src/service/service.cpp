#include "teleop/service/service.hpp"

#include <algorithm>
#include <iostream>

#include "teleop/service/console_gateway.hpp"
#include "teleop/transport/gaps.hpp"

namespace teleop::service {

using namespace std::chrono_literals;
using transport::MessageType;

std::chrono::seconds Backoff::next() {
  const auto d = next_;
  next_ = std::min(cap_, next_ * 2);
  return d;
}

namespace {

void log(const std::string& what) { std::cerr << "inference-service: " << what << std::endl; }

std::uint64_t now_us() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());
}

/// Capacity-1 hand-off. With `latest_wins` a put replaces an unconsumed item
/// (and reports the drop); otherwise put waits for the consumer.
template <typename T>
class Slot {
 public:
  explicit Slot(bool latest_wins) : latest_wins_(latest_wins) {}

  /// Returns true iff an older item was dropped. False also when closed.
  bool put(T v) {
    std::unique_lock lk(mu_);
    bool dropped = false;
    if (latest_wins_) {
      dropped = item_.has_value();
    } else {
      cv_.wait(lk, [&] { return closed_ || !item_; });
    }
    if (closed_) return false;
    item_ = std::move(v);
    lk.unlock();
    cv_.notify_all();
    return dropped;
  }

  std::optional<T> take() {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return closed_ || item_; });
    if (closed_) return std::nullopt;
    std::optional<T> v = std::move(item_);
    item_.reset();
    lk.unlock();
    cv_.notify_all();
    return v;
  }

  void close() {
    {
      std::lock_guard lk(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  bool latest_wins_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::optional<T> item_;
  bool closed_ = false;
};

struct InFrame {
  vision::RgbImage image;
  std::uint64_t timestamp_us = 0;
  StopWatch age;
};

struct DetectedFrame {
  InFrame frame;
  vision::GrayImage luma;
  std::vector<vision::Detection> dets;
};

struct ClassifiedFrame {
  InFrame frame;
  std::vector<overlay::AnnotatedDetection> annotated;
};

}  // namespace

struct InferenceService::Stages {
  Slot<InFrame> ingress{true};
  Slot<DetectedFrame> detected{false};
  Slot<ClassifiedFrame> classified{false};

  void close() {
    ingress.close();
    detected.close();
    classified.close();
  }
};

struct InferenceService::TcpConsole {
  TcpConsole(transport::Socket s, std::shared_ptr<ConsoleSubscription> sub) : conn(std::move(s)), sub(std::move(sub)) {}
  transport::EnvelopeConnection conn;
  std::shared_ptr<ConsoleSubscription> sub;
  std::atomic<bool> alive{true};
  std::thread writer, reader;

  void close() {
    alive = false;
    sub->channel.close();
    conn.shutdown();
    if (writer.joinable()) writer.join();
    if (reader.joinable()) reader.join();
  }
};

InferenceService::InferenceService(ServiceConfig cfg)
    : cfg_(std::move(cfg)),
      pipeline_(cfg_.pipeline, PipelineModels::load(cfg_.pipeline)),
      stages_(std::make_unique<Stages>()) {
  transport::Endpoint::parse(cfg_.robot);
  transport::Endpoint::parse(cfg_.resolved_robot_control());
  transport::Endpoint::parse(cfg_.listen);
  if (!cfg_.http_listen.empty()) transport::Endpoint::parse(cfg_.http_listen);
}

InferenceService::~InferenceService() { stop(); }

void InferenceService::start() {
  if (running_) return;
  console_listener_ = std::make_unique<transport::Listener>(transport::Endpoint::parse(cfg_.listen));
  if (!cfg_.http_listen.empty())
    gateway_ = std::make_unique<ConsoleGateway>(*this, transport::Endpoint::parse(cfg_.http_listen), cfg_.serve_console);
  running_ = true;
  threads_.emplace_back([this] { robot_loop(); });
  threads_.emplace_back([this] { detect_loop(); });
  threads_.emplace_back([this] { classify_loop(); });
  threads_.emplace_back([this] { output_loop(); });
  threads_.emplace_back([this] { console_accept_loop(); });
  threads_.emplace_back([this] { heartbeat_loop(); });
  if (gateway_) gateway_->start();
}

void InferenceService::stop() {
  if (!running_.exchange(false)) return;
  stages_->close();
  sleep_cv_.notify_all();
  if (gateway_) gateway_->stop();
  for (auto& t : threads_)
    if (t.joinable()) t.join();
  threads_.clear();
  {
    std::lock_guard lk(consoles_mu_);
    for (auto& c : consoles_) c->close();
    consoles_.clear();
  }
  console_listener_.reset();
  if (!cfg_.metrics_path.empty()) {
    try {
      metrics_.write(cfg_.metrics_path);
    } catch (const Error& e) {
      log(e.what());
    }
  }
}

std::uint16_t InferenceService::console_port() const { return console_listener_ ? console_listener_->port() : 0; }
std::uint16_t InferenceService::http_port() const { return gateway_ ? gateway_->port() : 0; }

bool InferenceService::sleep_for(std::chrono::milliseconds d) {
  std::unique_lock lk(sleep_mu_);
  sleep_cv_.wait_for(lk, d, [&] { return !running_; });
  return running_;
}

// ---- robot side ----

void InferenceService::robot_loop() {
  Backoff backoff;
  bool first = true;
  while (running_) {
    if (!first) metrics_.update([](Counters& c) { ++c.robot_reconnects; });
    first = false;
    try {
      transport::EnvelopeConnection media(transport::connect_tcp(transport::Endpoint::parse(cfg_.robot)));
      auto control = std::make_shared<transport::EnvelopeConnection>(
          transport::connect_tcp(transport::Endpoint::parse(cfg_.resolved_robot_control())));
      log("connected to robot at " + cfg_.robot);
      backoff.reset();
      robot_session(media, control);
    } catch (const Error& e) {
      log(std::string("robot link: ") + e.what());
    }
    robot_up_ = false;
    metrics_.set_robot_up(false);
    {
      std::lock_guard lk(robot_mu_);
      robot_control_.reset();
      last_status_.reset();
    }
    if (!running_) break;
    const auto wait = backoff.next();
    log("reconnecting in " + std::to_string(wait.count()) + " s");
    sleep_for(wait);
  }
}

void InferenceService::robot_session(transport::EnvelopeConnection& media,
                                     const std::shared_ptr<transport::EnvelopeConnection>& control) {
  using Clock = std::chrono::steady_clock;
  std::atomic<std::int64_t> last_hb{Clock::now().time_since_epoch().count()};
  std::atomic<bool> session_alive{true};
  const auto timeout = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(kMissedHeartbeatsForTimeout / kHeartbeatHz));

  {
    std::lock_guard lk(robot_mu_);
    robot_control_ = control;
  }
  robot_up_ = true;
  metrics_.set_robot_up(true);

  // The control link carries robot heartbeats too; they only refresh liveness.
  std::thread control_reader([&] {
    while (session_alive && running_) {
      try {
        auto env = control->receive(100ms);
        if (env && env->message.type() == MessageType::kHeartbeat)
          last_hb = Clock::now().time_since_epoch().count();
      } catch (const Error&) {
        session_alive = false;
      }
    }
  });

  transport::GapDetector video_gaps;
  try {
    while (session_alive && running_) {
      auto env = media.receive(100ms);
      if (env) {
        auto& m = env->message;
        if (m.type() == MessageType::kVideoFrame) {
          if (video_gaps.observe(m.sequence)) metrics_.update([](Counters& c) { ++c.sequence_gaps; });
          auto& vf = std::get<transport::VideoFrame>(m.body);
          metrics_.mark_input();
          InFrame f{image_of(vf), m.timestamp_us, StopWatch()};
          if (f.image.width() != overlay::kFrameWidth || f.image.height() != overlay::kFrameHeight) {
            metrics_.update([](Counters& c) { ++c.protocol_errors; });
          } else if (stages_->ingress.put(std::move(f))) {
            metrics_.update([](Counters& c) { ++c.frames_dropped; });
          }
        } else if (m.type() == MessageType::kHeartbeat) {
          last_hb = Clock::now().time_since_epoch().count();
          const auto& hb = std::get<transport::Heartbeat>(m.body);
          if (hb.status) {
            {
              std::lock_guard lk(robot_mu_);
              last_status_ = hb.status;
            }
            publish_heartbeat(hb.status);
          }
        }
      }
      if (Clock::now().time_since_epoch().count() - last_hb.load() > timeout.count()) {
        metrics_.update([](Counters& c) { ++c.robot_heartbeat_timeouts; });
        log("robot heartbeat timeout");
        break;
      }
    }
  } catch (const transport::ProtocolError& e) {
    metrics_.update([](Counters& c) { ++c.protocol_errors; });
    log(std::string("robot stream: ") + e.what());
  } catch (const Error& e) {
    log(std::string("robot stream: ") + e.what());
  }
  session_alive = false;
  {
    std::lock_guard lk(robot_mu_);
    robot_control_.reset();
  }
  control->shutdown();
  media.shutdown();
  control_reader.join();
}

bool InferenceService::relay_to_robot(std::span<const std::uint8_t> envelope) {
  try {
    const auto m = transport::decode_envelope(envelope);
    if (m.type() != MessageType::kControl && m.type() != MessageType::kHeadPose) return false;
  } catch (const transport::ProtocolError&) {
    metrics_.update([](Counters& c) { ++c.protocol_errors; });
    return false;
  }
  std::shared_ptr<transport::EnvelopeConnection> control;
  {
    std::lock_guard lk(robot_mu_);
    control = robot_control_;
  }
  if (!control) return false;
  try {
    control->send(envelope);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// ---- pipeline stages ----

void InferenceService::detect_loop() {
  while (auto f = stages_->ingress.take()) {
    StopWatch w;
    auto pre = pipeline_.preprocess(f->image);
    metrics_.record(Stage::kBlur, w.ms());
    w = StopWatch();
    auto dets = pipeline_.detect(pre.internal, f->image.width(), f->image.height());
    metrics_.record(Stage::kDetect, w.ms());
    stages_->detected.put({std::move(*f), std::move(pre.luma), std::move(dets)});
  }
}

void InferenceService::classify_loop() {
  while (auto d = stages_->detected.take()) {
    StopWatch w;
    std::size_t failures = 0;
    auto annotated = pipeline_.classify(d->luma, d->dets, &failures);
    metrics_.record(Stage::kClassify, w.ms());
    const auto calls = d->dets.size();
    metrics_.update([&](Counters& c) {
      c.classifier_calls += calls;
      c.classifier_failures += failures;
      c.detections += calls;
    });
    stages_->classified.put({std::move(d->frame), std::move(annotated)});
  }
}

void InferenceService::output_loop() {
  while (auto c = stages_->classified.take()) {
    std::uint32_t video_seq, det_seq;
    {
      std::lock_guard lk(seq_mu_);
      video_seq = seq_.next(MessageType::kVideoFrame);
      det_seq = seq_.next(MessageType::kDetections);
    }
    StopWatch w;
    auto annotated = overlay::draw_annotations(std::move(c->frame.image), std::move(c->annotated), video_seq,
                                               c->frame.timestamp_us);
    metrics_.record(Stage::kAnnotate, w.ms());
    w = StopWatch();
    const auto sbs = overlay::to_half_sbs(annotated);
    metrics_.record(Stage::kSbs, w.ms());

    w = StopWatch();
    transport::Message video{transport::kFlagSbs, video_seq, c->frame.timestamp_us,
                             video_frame_of(sbs.image, transport::FrameEncoding::kRle)};
    transport::Message dets{0, det_seq, c->frame.timestamp_us, detections_message(annotated)};
    auto video_bytes = transport::encode_envelope(video);
    auto det_bytes = transport::encode_envelope(dets);
    metrics_.record(Stage::kEncode, w.ms());

    publish(MessageType::kVideoFrame, std::move(video_bytes), video_seq);
    publish(MessageType::kDetections, std::move(det_bytes), det_seq);
    metrics_.mark_output();
    metrics_.record(Stage::kEndToEnd, c->frame.age.ms());
  }
}

// ---- console side ----

std::shared_ptr<ConsoleSubscription> InferenceService::subscribe() {
  auto s = std::make_shared<ConsoleSubscription>(cfg_.media_queue, cfg_.control_watermark);
  std::lock_guard lk(subs_mu_);
  subs_.push_back(s);
  metrics_.update([](Counters& c) { ++c.console_connects; });
  metrics_.set_console_up(true);
  return s;
}

void InferenceService::unsubscribe(const std::shared_ptr<ConsoleSubscription>& s) {
  std::lock_guard lk(subs_mu_);
  const auto it = std::find(subs_.begin(), subs_.end(), s);
  if (it == subs_.end()) return;
  subs_.erase(it);
  s->channel.close();
  metrics_.update([](Counters& c) { ++c.console_disconnects; });
  metrics_.set_console_up(!subs_.empty());
}

void InferenceService::publish(MessageType type, std::vector<std::uint8_t> envelope, std::uint32_t seq) {
  std::lock_guard lk(subs_mu_);
  std::uint64_t faults = 0;
  for (auto& s : subs_)
    if (s->channel.push({type, seq, envelope}) == transport::PushResult::kOverWatermark) ++faults;
  if (faults) metrics_.update([&](Counters& c) { c.backpressure_faults += faults; });
}

void InferenceService::publish_heartbeat(const std::optional<transport::RobotStatus>& status) {
  std::uint32_t seq;
  {
    std::lock_guard lk(seq_mu_);
    seq = seq_.next(MessageType::kHeartbeat);
  }
  transport::Message hb{0, seq, now_us(), transport::Heartbeat{status}};
  publish(MessageType::kHeartbeat, transport::encode_envelope(hb), seq);
}

void InferenceService::heartbeat_loop() {
  const auto period = std::chrono::milliseconds(static_cast<int>(1000 / kHeartbeatHz));
  while (sleep_for(period)) {
    std::optional<transport::RobotStatus> status;
    {
      std::lock_guard lk(robot_mu_);
      status = last_status_;
    }
    publish_heartbeat(status);
  }
}

void InferenceService::console_accept_loop() {
  while (running_) {
    auto sock = console_listener_->accept(100ms);
    if (sock) {
      auto con = std::make_shared<TcpConsole>(std::move(*sock), subscribe());
      con->writer = std::thread([this, c = con.get()] {
        while (c->alive) {
          auto item = c->sub->channel.pop(100ms);
          if (!item) {
            if (c->sub->channel.closed()) break;
            continue;
          }
          try {
            c->conn.send(item->bytes);
          } catch (const Error&) {
            c->alive = false;
          }
        }
      });
      con->reader = std::thread([this, c = con.get()] {
        while (c->alive) {
          try {
            auto env = c->conn.receive(100ms);
            if (env) relay_to_robot(env->raw);
          } catch (const transport::ProtocolError&) {
            metrics_.update([](Counters& k) { ++k.protocol_errors; });
            c->alive = false;
          } catch (const Error&) {
            c->alive = false;
          }
        }
      });
      std::lock_guard lk(consoles_mu_);
      consoles_.push_back(con);
    }
    std::vector<std::shared_ptr<TcpConsole>> dead;
    {
      std::lock_guard lk(consoles_mu_);
      for (auto it = consoles_.begin(); it != consoles_.end();) {
        if (!(*it)->alive) {
          dead.push_back(*it);
          it = consoles_.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto& c : dead) {
      unsubscribe(c->sub);
      c->close();
      log("console disconnected");
    }
  }
}

}  // namespace teleop::service
