#include "teleop/overlay/annotate.hpp"

#include <algorithm>

#include "teleop/overlay/font.hpp"

namespace teleop::overlay {

Color color_of(threat::VerdictColor c) {
  switch (c) {
    case threat::VerdictColor::kGreen: return kGreen;
    case threat::VerdictColor::kRed: return kRed;
    case threat::VerdictColor::kUnknown: return kUnknownGray;
  }
  return kUnknownGray;
}

std::string label_text(const threat::ThreatVerdict& v) {
  if (v.color == threat::VerdictColor::kUnknown) return "?";
  return std::to_string(v.percent);
}

vision::Point label_origin(const vision::Rect& bbox) {
  const int text_h = kGlyphHeight * kTextScale;
  const int above = bbox.y - kTextGap - text_h;
  if (above >= 0) return {bbox.x, above};
  return {bbox.x + kBoxThickness + 2, bbox.y + kBoxThickness + 2};
}

namespace {

void put(vision::RgbImage& img, int x, int y, const Color& c) {
  if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
  std::uint8_t* p = img.pixel(x, y);
  p[0] = c[0];
  p[1] = c[1];
  p[2] = c[2];
}

}  // namespace

void draw_text(vision::RgbImage& img, vision::Point origin, const std::string& text, const Color& color, int scale) {
  int pen = origin.x;
  for (char ch : text) {
    const auto g = glyph(ch);
    if (g) {
      for (int row = 0; row < kGlyphHeight; ++row)
        for (int col = 0; col < kGlyphWidth; ++col)
          if (glyph_on(*g, col, row))
            for (int sy = 0; sy < scale; ++sy)
              for (int sx = 0; sx < scale; ++sx) put(img, pen + col * scale + sx, origin.y + row * scale + sy, color);
    }
    pen += (kGlyphWidth + 1) * scale;
  }
}

void draw_box(vision::RgbImage& img, const vision::Rect& b, const Color& color, bool dashed) {
  const int x0 = std::max(b.x, 0);
  const int y0 = std::max(b.y, 0);
  const int x1 = std::min(b.x + b.w, img.width());
  const int y1 = std::min(b.y + b.h, img.height());
  const int t = kBoxThickness;
  auto on = [&](int offset) { return !dashed || (offset / kDashLength) % 2 == 0; };
  for (int y = y0; y < y1; ++y) {
    const int dy_top = y - b.y;
    const int dy_bot = b.y + b.h - 1 - y;
    const bool horizontal_band = dy_top < t || dy_bot < t;
    for (int x = x0; x < x1; ++x) {
      const int dx_left = x - b.x;
      const int dx_right = b.x + b.w - 1 - x;
      const bool vertical_band = dx_left < t || dx_right < t;
      if (horizontal_band && on(dx_left)) {
        put(img, x, y, color);
      } else if (vertical_band && on(dy_top)) {
        put(img, x, y, color);
      }
    }
  }
}

AnnotatedFrame draw_annotations(vision::RgbImage frame, std::vector<AnnotatedDetection> detections,
                                std::uint32_t frame_seq, std::uint64_t timestamp_us) {
  for (const auto& d : detections) {
    const Color c = color_of(d.verdict.color);
    draw_box(frame, d.detection.bbox, c, d.verdict.color == threat::VerdictColor::kUnknown);
    draw_text(frame, label_origin(d.detection.bbox), label_text(d.verdict), c);
  }
  return {std::move(frame), std::move(detections), frame_seq, timestamp_us};
}

}  // namespace teleop::overlay
