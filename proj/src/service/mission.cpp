#include "teleop/service/mission.hpp"

#include <random>

#include "teleop/robot/render.hpp"
#include "teleop/robot/sim.hpp"
#include "teleop/telemetry/head_pose.hpp"
#include "teleop/telemetry/link_frame.hpp"
#include "teleop/transport/envelope.hpp"

namespace teleop::service {

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t h) {
  for (const auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

double MissionReport::verdict_rate(bool armed) const {
  std::size_t n = 0, ok = 0;
  for (const auto& o : outcomes)
    if (o.armed == armed) {
      ++n;
      ok += o.verdict_ok;
    }
  return n ? static_cast<double>(ok) / n : 0.0;
}

double MissionReport::detection_rate() const {
  if (outcomes.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& o : outcomes) ok += o.detected;
  return static_cast<double>(ok) / outcomes.size();
}

MissionScript default_mission(std::uint64_t seed, std::uint32_t frames) {
  std::mt19937_64 rng(seed);
  auto weapon = [&] { return 1 + static_cast<int>(rng() % 7); };
  auto facing = [&] { return rng() % 2 ? robot::Facing::kLeft : robot::Facing::kRight; };
  MissionScript m;
  m.frames = frames;
  m.scene.seed = rng();
  m.scene.entities = {
      {1, 10.0, 2.0, 0, facing()},
      {2, 10.5, -2.0, weapon(), facing()},
      {3, 8.0, -5.0, weapon(), facing()},
  };
  using K = MissionEvent::Kind;
  m.events = {
      {0, K::kHeadPose, 0.0, 0.0},
      {20, K::kHeadPose, 15.0, 0.0},
      {40, K::kHeadPose, -12.0, 3.0},
      {60, K::kHeadPose, 0.0, 0.0},
      {70, K::kDrive, 0, 0, 40, 40},
      {85, K::kEStop},
      {92, K::kEStopRelease},
  };
  return m;
}

namespace {

transport::Message decode(const std::vector<std::uint8_t>& bytes) { return transport::decode_envelope(bytes); }

}  // namespace

MissionReport run_mission(const MissionScript& script, const Pipeline& pipeline,
                          const std::function<void(std::uint32_t, const vision::RgbImage&)>& on_frame) {
  robot::Simulator sim(script.scene);
  transport::Sequencer robot_seq, console_seq, service_seq;
  ServiceMetrics metrics;
  MissionReport rep;
  std::uint64_t stream = 0xcbf29ce484222325ull;
  std::uint32_t pose_seq = 0;

  for (std::uint32_t f = 0; f < script.frames; ++f) {
    // Operator input, over the wire as the console would send it.
    for (const auto& ev : script.events) {
      if (ev.frame != f) continue;
      transport::Message m;
      m.sequence = console_seq.next(ev.kind == MissionEvent::Kind::kHeadPose ? transport::MessageType::kHeadPose
                                                                             : transport::MessageType::kControl);
      if (ev.kind == MissionEvent::Kind::kHeadPose) {
        const auto payload = telemetry::head_pose_payload({ev.pitch, ev.yaw, 0}, ++pose_seq);
        m.body = transport::HeadPoseRelay{telemetry::encode_link_frame(payload)};
      } else {
        transport::Control c;
        c.command = ev.kind == MissionEvent::Kind::kDrive    ? transport::ControlCommand::kDrive
                    : ev.kind == MissionEvent::Kind::kEStop ? transport::ControlCommand::kEStop
                                                            : transport::ControlCommand::kEStopRelease;
        c.left = ev.left;
        c.right = ev.right;
        m.body = c;
      }
      const auto got = decode(transport::encode_envelope(m));
      if (const auto* hp = std::get_if<transport::HeadPoseRelay>(&got.body))
        sim.apply_head_pose_frame(hp->link_frame);
      else
        sim.apply(std::get<transport::Control>(got.body), got.sequence);
    }

    // Robot -> service.
    auto frame = sim.next_frame();
    transport::Message video{0, robot_seq.next(transport::MessageType::kVideoFrame), frame.timestamp_us,
                             video_frame_of(frame.image, transport::FrameEncoding::kRle)};
    const auto wire = transport::encode_envelope(video);
    StopWatch e2e;
    const auto received = decode(wire);
    const auto input = image_of(std::get<transport::VideoFrame>(received.body));
    metrics.mark_input();

    // Service.
    const std::uint32_t out_seq = service_seq.next(transport::MessageType::kVideoFrame);
    auto result = pipeline.process_frame(input, out_seq, received.timestamp_us);
    for (std::size_t s = 0; s < kStageCount; ++s)
      if (result.stage_ms[s] > 0) metrics.record(static_cast<Stage>(s), result.stage_ms[s]);
    StopWatch w;
    transport::Message out_video{transport::kFlagSbs, out_seq, received.timestamp_us,
                                 video_frame_of(result.sbs.image, transport::FrameEncoding::kRle)};
    transport::Message out_dets{0, service_seq.next(transport::MessageType::kDetections), received.timestamp_us,
                                result.detections};
    const auto video_bytes = transport::encode_envelope(out_video);
    const auto det_bytes = transport::encode_envelope(out_dets);
    metrics.record(Stage::kEncode, w.ms());
    metrics.record(Stage::kEndToEnd, e2e.ms());
    metrics.mark_output();
    metrics.update([&](Counters& c) {
      c.classifier_calls += result.classifier_calls;
      c.classifier_failures += result.classifier_failures;
      c.detections += result.detections.items.size();
    });

    // Console side.
    const auto sbs = image_of(std::get<transport::VideoFrame>(decode(video_bytes).body));
    const auto dets = std::get<transport::Detections>(decode(det_bytes).body);
    const auto digest = fnv1a(sbs.data());
    rep.sbs_digests.push_back(digest);
    stream = fnv1a(std::span(reinterpret_cast<const std::uint8_t*>(&digest), sizeof digest), stream);
    if (on_frame) on_frame(f, sbs);
    for (std::size_t i = 0; i < dets.items.size(); ++i)
      if (dets.items[i].percent != result.annotated.detections[i].verdict.percent) ++rep.percent_mismatches;

    // Ground truth from the camera state the frame was rendered with.
    for (const auto& sp : robot::project_entities(script.scene, frame.camera)) {
      if (frame.camera.mode != transport::RobotMode::kUgv || !sp.fully_visible()) continue;
      const auto& e = script.scene.entities.at(static_cast<std::size_t>(sp.entity_id - 1));
      SpriteOutcome o{f, e.id, e.armed()};
      const transport::DetectionRecord* best = nullptr;
      for (const auto& d : dets.items) {
        const vision::Rect r{d.x, d.y, d.w, d.h};
        if (r.contains(sp.center_x(), sp.center_y()) && (!best || d.person_score > best->person_score)) best = &d;
      }
      if (best) {
        o.detected = true;
        o.verdict_ok = e.armed() ? best->verdict == transport::WireVerdict::kRed && best->percent >= 50
                                 : best->verdict == transport::WireVerdict::kGreen && best->percent < 50;
      }
      rep.outcomes.push_back(o);
    }
  }

  const auto snap = metrics.snapshot();
  rep.counters = snap.counters;
  rep.stages = snap.stages;
  rep.frames = script.frames;
  rep.stream_digest = stream;
  return rep;
}

}  // namespace teleop::service
