#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "teleop/threat/classifier.hpp"
#include "teleop/vision/detect.hpp"
#include "teleop/vision/image.hpp"

namespace teleop::overlay {

inline constexpr int kFrameWidth = 1900;
inline constexpr int kFrameHeight = 1000;
inline constexpr int kBoxThickness = 3;
inline constexpr int kTextScale = 3;
inline constexpr int kTextGap = 4;
inline constexpr int kDashLength = 6;

using Color = std::array<std::uint8_t, 3>;
inline constexpr Color kGreen{0, 255, 0};
inline constexpr Color kRed{255, 0, 0};
inline constexpr Color kUnknownGray{128, 128, 128};

Color color_of(threat::VerdictColor c);

struct AnnotatedDetection {
  vision::Detection detection;
  threat::ThreatVerdict verdict;
};

struct AnnotatedFrame {
  vision::RgbImage image;
  std::vector<AnnotatedDetection> detections;
  std::uint32_t frame_seq = 0;
  std::uint64_t timestamp_us = 0;
};

/// Text drawn above a box: the percent for GREEN/RED, "?" for UNKNOWN.
std::string label_text(const threat::ThreatVerdict& v);

/// Top-left corner of the label: kTextGap pixels above the box, or just
/// inside the box when there is no room above.
vision::Point label_origin(const vision::Rect& bbox);

/// Draws `text` with the 5x7 font scaled by `scale`; only glyph "on" pixels are written.
void draw_text(vision::RgbImage& img, vision::Point origin, const std::string& text, const Color& color,
               int scale = kTextScale);

/// 3-px box inside `bbox`, solid or dashed.
void draw_box(vision::RgbImage& img, const vision::Rect& bbox, const Color& color, bool dashed);

/// Renders every detection as a GREEN/RED solid box or a dashed gray UNKNOWN
/// box with its label. Pixels outside box borders and glyph cells are untouched.
AnnotatedFrame draw_annotations(vision::RgbImage frame, std::vector<AnnotatedDetection> detections,
                                std::uint32_t frame_seq = 0, std::uint64_t timestamp_us = 0);

}  // namespace teleop::overlay
