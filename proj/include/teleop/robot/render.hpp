#pragma once

#include <optional>
#include <vector>

#include "teleop/robot/scene.hpp"
#include "teleop/transport/messages.hpp"
#include "teleop/vision/image.hpp"

namespace teleop::robot {

using transport::RobotMode;

// Camera model at the 1900x1000 reference resolution. Other resolutions scale
// the focal length and pixels-per-degree by width / 1900.
inline constexpr int kFrameWidth = 1900;
inline constexpr int kFrameHeight = 1000;
inline constexpr double kFocalPx = 1000.0;
inline constexpr double kPixelsPerDegree = 20.0;  // viewport shift per degree of pan/tilt
inline constexpr double kPersonHeight = 1.8;      // metres
inline constexpr double kCameraHeight = 0.6;
inline constexpr double kMinDepth = 0.5;
inline constexpr double kDefaultUavAltitude = 10.0;
inline constexpr int kNoiseBlock = 8;
inline constexpr int kNoiseAmplitude = 10;

inline constexpr std::array<std::uint8_t, 3> kSkyColor{150, 160, 170};
inline constexpr std::array<std::uint8_t, 3> kGroundColor{135, 140, 120};
inline constexpr std::array<std::uint8_t, 3> kHeadColor{200, 170, 140};
inline constexpr std::array<std::uint8_t, 3> kBodyColor{40, 45, 70};
inline constexpr std::array<std::uint8_t, 3> kWeaponColor{250, 250, 250};
/// Every weapon pixel reaches this luma; nothing else in a rendered frame does.
inline constexpr std::uint8_t kWeaponLumaFloor = 240;

struct GroundPose {
  double x = 0.0, y = 0.0;
  double heading = 0.0;  // radians, counter-clockwise from +x
  bool operator==(const GroundPose&) const = default;
};

struct AirPose {
  double x = 0.0, y = 0.0;
  double altitude = kDefaultUavAltitude;
  double heading = 0.0;
  bool operator==(const AirPose&) const = default;
};

struct CameraState {
  RobotMode mode = RobotMode::kUgv;
  double pan = 0.0;   // degrees, positive turns the view right
  double tilt = 0.0;  // degrees, positive looks up
  GroundPose ugv;
  AirPose uav;
  bool operator==(const CameraState&) const = default;
};

/// Axis-aligned weapon part in sprite units: u across the box width (0 = left
/// edge when facing right), v down the box height.
struct WeaponPart {
  double u0, v0, u1, v1;
};

/// Parts of the weapon drawn for class `weapon` (empty for no_weapon).
std::vector<WeaponPart> weapon_parts(int weapon);

/// Screen-space footprint of one entity, in full-frame pixel coordinates.
struct SpriteProjection {
  int entity_id = 0;
  double left = 0.0, top = 0.0, width = 0.0, height = 0.0;
  double depth = 0.0;  // distance along the view axis (altitude in UAV mode)

  double center_x() const { return left + width / 2; }
  double center_y() const { return top + height / 2; }
  /// Whole box within a width x height frame.
  bool fully_visible(int frame_w = kFrameWidth, int frame_h = kFrameHeight) const;
  /// Smallest pixel rect covering every pixel whose centre lies in the box.
  vision::Rect pixel_rect() const;
};

/// Projections of all entities in front of the camera, far to near (paint order).
std::vector<SpriteProjection> project_entities(const Scene& scene, const CameraState& cam,
                                               int frame_w = kFrameWidth, int frame_h = kFrameHeight);

/// Renders the whole frame. Same (scene, camera) gives a bit-identical raster.
vision::RgbImage render_frame(const Scene& scene, const CameraState& cam, int frame_w = kFrameWidth,
                              int frame_h = kFrameHeight);

/// Renders only `region` of the frame; equal to cropping render_frame.
vision::RgbImage render_region(const Scene& scene, const CameraState& cam, const vision::Rect& region,
                               int frame_w = kFrameWidth, int frame_h = kFrameHeight);

}  // namespace teleop::robot
