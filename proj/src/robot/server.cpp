#include "teleop/robot/server.hpp"

#include <chrono>

#include "teleop/transport/envelope.hpp"

namespace teleop::robot {

using namespace std::chrono_literals;
using transport::MessageType;

namespace {

std::uint64_t now_us() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());
}

}  // namespace

RobotServer::RobotServer(Simulator sim, RobotServerOptions opts) : sim_(std::move(sim)), opts_(std::move(opts)) {
  if (!(opts_.fps > 0)) throw InvalidParameter("fps must be positive");
  status_ = sim_.status();
}

RobotServer::~RobotServer() { stop(); }

void RobotServer::start() {
  if (running_) return;
  media_listener_ = std::make_unique<transport::Listener>(opts_.media);
  control_listener_ = std::make_unique<transport::Listener>(opts_.control);
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  step_thread_ = std::thread([this] { step_loop(); });
}

void RobotServer::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  if (step_thread_.joinable()) step_thread_.join();
  std::vector<std::shared_ptr<Subscriber>> all;
  {
    std::lock_guard lk(subs_mu_);
    all = media_subs_;
    all.insert(all.end(), control_subs_.begin(), control_subs_.end());
    media_subs_.clear();
    control_subs_.clear();
  }
  for (auto& s : all) {
    s->alive = false;
    s->queue.close();
    s->conn.shutdown();
    if (s->writer.joinable()) s->writer.join();
    if (s->reader.joinable()) s->reader.join();
  }
  media_listener_.reset();
  control_listener_.reset();
}

std::uint16_t RobotServer::media_port() const { return media_listener_ ? media_listener_->port() : 0; }
std::uint16_t RobotServer::control_port() const { return control_listener_ ? control_listener_->port() : 0; }

RobotServerStats RobotServer::stats() const {
  std::lock_guard lk(state_mu_);
  return stats_;
}

transport::RobotStatus RobotServer::status() const {
  std::lock_guard lk(state_mu_);
  return status_;
}

void RobotServer::accept_loop() {
  while (running_) {
    for (bool media : {true, false}) {
      auto& listener = media ? *media_listener_ : *control_listener_;
      auto sock = listener.accept(media ? 50ms : 0ms);
      if (!sock) continue;
      auto sub = std::make_shared<Subscriber>(std::move(*sock), opts_.media_queue);
      sub->writer = std::thread([this, s = sub.get()] { write_loop(*s); });
      sub->reader = std::thread([this, s = sub.get()] { read_loop(*s); });
      std::lock_guard lk(subs_mu_);
      (media ? media_subs_ : control_subs_).push_back(sub);
    }
    // Reap subscribers whose connection died.
    std::vector<std::shared_ptr<Subscriber>> dead;
    {
      std::lock_guard lk(subs_mu_);
      for (auto* list : {&media_subs_, &control_subs_}) {
        for (auto it = list->begin(); it != list->end();) {
          if (!(*it)->alive) {
            dead.push_back(*it);
            it = list->erase(it);
          } else {
            ++it;
          }
        }
      }
    }
    for (auto& s : dead) {
      s->queue.close();
      s->conn.shutdown();
      if (s->writer.joinable()) s->writer.join();
      if (s->reader.joinable()) s->reader.join();
      std::lock_guard lk(state_mu_);
      stats_.media_dropped += s->queue.metrics().media_dropped;
    }
  }
}

void RobotServer::write_loop(Subscriber& s) {
  while (s.alive) {
    auto item = s.queue.pop(100ms);
    if (!item) continue;
    try {
      s.conn.send(item->bytes);
    } catch (const Error&) {
      s.alive = false;
    }
  }
}

void RobotServer::read_loop(Subscriber& s) {
  while (s.alive) {
    try {
      auto env = s.conn.receive(100ms);
      if (!env) continue;
      const auto type = env->message.type();
      std::lock_guard lk(inbox_mu_);
      if (type == MessageType::kControl)
        inbox_.emplace_back(std::pair{std::get<transport::Control>(env->message.body), env->message.sequence});
      else if (type == MessageType::kHeadPose)
        inbox_.emplace_back(std::get<transport::HeadPoseRelay>(env->message.body).link_frame);
    } catch (const transport::ProtocolError&) {
      std::lock_guard lk(state_mu_);
      ++stats_.protocol_errors;
      s.alive = false;
    } catch (const Error&) {
      s.alive = false;
    }
  }
}

void RobotServer::broadcast(const transport::OutboundItem& item, bool media_only) {
  std::lock_guard lk(subs_mu_);
  for (auto& s : media_subs_) s->queue.push(item);
  if (!media_only)
    for (auto& s : control_subs_) s->queue.push(item);
}

void RobotServer::step_loop() {
  transport::Sequencer seq;
  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / opts_.fps));
  const auto hb_period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / opts_.heartbeat_hz));
  auto next_tick = std::chrono::steady_clock::now();
  auto next_hb = next_tick;

  while (running_) {
    std::deque<Command> cmds;
    {
      std::lock_guard lk(inbox_mu_);
      cmds.swap(inbox_);
    }
    bool controlled = false;
    std::uint64_t n_control = 0, n_pose = 0, n_bad_pose = 0;
    for (auto& c : cmds) {
      if (auto* ctl = std::get_if<0>(&c)) {
        sim_.apply(ctl->first, ctl->second);
        controlled = true;
        ++n_control;
      } else {
        ++n_pose;
        if (!sim_.apply_head_pose_frame(std::get<1>(c))) ++n_bad_pose;
      }
    }

    auto frame = sim_.next_frame();
    transport::VideoFrame vf;
    vf.width = static_cast<std::uint16_t>(frame.image.width());
    vf.height = static_cast<std::uint16_t>(frame.image.height());
    vf.format = transport::PixelFormat::kRgb8;
    vf.encoding = opts_.encoding;
    vf.pixels = std::move(frame.image.data());
    transport::Message m{0, seq.next(MessageType::kVideoFrame), now_us(), std::move(vf)};
    broadcast({MessageType::kVideoFrame, m.sequence, transport::encode_envelope(m)}, true);

    const auto st = sim_.status();
    {
      std::lock_guard lk(state_mu_);
      ++stats_.frames;
      stats_.controls += n_control;
      stats_.head_poses += n_pose;
      stats_.rejected_head_poses += n_bad_pose;
      status_ = st;
    }

    const auto now = std::chrono::steady_clock::now();
    if (controlled || now >= next_hb) {
      transport::Message hb{0, seq.next(MessageType::kHeartbeat), now_us(), transport::Heartbeat{st}};
      broadcast({MessageType::kHeartbeat, hb.sequence, transport::encode_envelope(hb)}, false);
      if (now >= next_hb) next_hb = now + hb_period;
    }

    next_tick += period;
    const auto wake = std::chrono::steady_clock::now();
    if (next_tick > wake)
      std::this_thread::sleep_until(next_tick);
    else
      next_tick = wake;  // running behind: do not try to catch up
  }
}

}  // namespace teleop::robot
