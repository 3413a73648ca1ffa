#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "teleop/robot/scene.hpp"
#include "teleop/service/metrics.hpp"
#include "teleop/service/pipeline.hpp"

namespace teleop::service {

/// Scripted operator input applied before a given frame.
struct MissionEvent {
  std::uint32_t frame = 0;
  enum class Kind { kHeadPose, kDrive, kEStop, kEStopRelease } kind = Kind::kHeadPose;
  double yaw = 0.0, pitch = 0.0;     // kHeadPose
  std::int8_t left = 0, right = 0;   // kDrive
};

struct MissionScript {
  robot::Scene scene;
  std::vector<MissionEvent> events;
  std::uint32_t frames = 100;
};

/// Three people (one unarmed, two armed with seed-chosen weapons) in front of
/// the robot; the operator looks right, left, back to centre and drives forward.
MissionScript default_mission(std::uint64_t seed, std::uint32_t frames = 100);

struct SpriteOutcome {
  std::uint32_t frame = 0;
  int entity_id = 0;
  bool armed = false;
  bool detected = false;      // some detection box contains the sprite centroid
  bool verdict_ok = false;    // that detection is RED >= 50 (armed) or GREEN < 50 (unarmed)
};

struct MissionReport {
  std::vector<std::uint64_t> sbs_digests;  // FNV-1a of each decoded SBS frame
  std::uint64_t stream_digest = 0;         // FNV-1a over all frame digests
  std::vector<SpriteOutcome> outcomes;     // sprites fully in view, per frame
  Counters counters;                       // latency-free counters
  std::array<StageSnapshot, kStageCount> stages{};
  std::uint32_t frames = 0;
  std::uint32_t percent_mismatches = 0;    // console-decoded percent vs verdict

  double verdict_rate(bool armed) const;
  double detection_rate() const;
};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t h = 0xcbf29ce484222325ull);

/// Runs the script through the simulator, the wire protocol and the pipeline
/// in one thread. Same script and models give the same digests and counters.
/// `on_frame`, if set, sees each decoded SBS frame.
MissionReport run_mission(const MissionScript& script, const Pipeline& pipeline,
                          const std::function<void(std::uint32_t, const vision::RgbImage&)>& on_frame = {});

}  // namespace teleop::service
