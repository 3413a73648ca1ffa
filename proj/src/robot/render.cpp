#include "teleop/robot/render.hpp"

#include <algorithm>
#include <cmath>

namespace teleop::robot {

std::vector<WeaponPart> weapon_parts(int weapon) {
  switch (weapon) {
    case 1:  // assault_rifle: long barrel, magazine, stock
      return {{0.30, 0.45, 1.00, 0.49}, {0.60, 0.49, 0.67, 0.57}, {0.18, 0.44, 0.30, 0.52}};
    case 2:  // revolver: raised arm, heavy cylinder
      return {{0.62, 0.36, 0.92, 0.39}, {0.64, 0.33, 0.75, 0.42}};
    case 3:  // pistol: short slide, grip below
      return {{0.62, 0.40, 0.84, 0.43}, {0.62, 0.43, 0.67, 0.50}};
    case 4:  // shotgun: low long barrel with pump
      return {{0.12, 0.50, 1.00, 0.53}, {0.74, 0.53, 0.88, 0.57}};
    case 5:  // submachine_gun: compact body, long magazine
      return {{0.45, 0.44, 0.88, 0.49}, {0.62, 0.49, 0.67, 0.63}};
    case 6:  // sniper_rifle: very long thin barrel, scope above
      return {{0.05, 0.46, 1.00, 0.49}, {0.42, 0.40, 0.70, 0.44}};
    case 7:  // machine_gun: thick low barrel, ammo box
      return {{0.20, 0.55, 1.00, 0.61}, {0.40, 0.61, 0.56, 0.71}};
    default: return {};
  }
}

bool SpriteProjection::fully_visible(int frame_w, int frame_h) const {
  return left >= 0 && top >= 0 && left + width <= frame_w && top + height <= frame_h;
}

vision::Rect SpriteProjection::pixel_rect() const {
  // Pixel x is covered iff left <= x + 0.5 < left + width.
  const int x0 = static_cast<int>(std::ceil(left - 0.5));
  const int x1 = static_cast<int>(std::ceil(left + width - 0.5));
  const int y0 = static_cast<int>(std::ceil(top - 0.5));
  const int y1 = static_cast<int>(std::ceil(top + height - 0.5));
  return {x0, y0, x1 - x0, y1 - y0};
}

namespace {

struct View {
  double focal;
  double ppd;
  int fw, fh;
};

View view_for(int fw, int fh) {
  if (fw < 1 || fh < 1) throw InvalidParameter("frame dimensions must be positive");
  const double k = static_cast<double>(fw) / kFrameWidth;
  return {kFocalPx * k, kPixelsPerDegree * k, fw, fh};
}

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int block_noise(std::uint64_t seed, long long bx, long long by) {
  const std::uint64_t h = mix(seed ^ mix(static_cast<std::uint64_t>(bx) * 0x100000001B3ull ^
                                         mix(static_cast<std::uint64_t>(by))));
  return static_cast<int>(h % (2 * kNoiseAmplitude + 1)) - kNoiseAmplitude;
}

long long floor_div(long long a, long long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

std::uint8_t add_clamped(std::uint8_t c, int n) { return static_cast<std::uint8_t>(std::clamp(c + n, 0, 255)); }

void paint_background(vision::RgbImage& out, const vision::Rect& region, const Scene& scene, const CameraState& cam,
                      const View& v) {
  const long long ox = std::lround(cam.pan * v.ppd);
  const long long oy = -std::lround(cam.tilt * v.ppd);
  const double horizon = v.fh / 2.0 + cam.tilt * v.ppd;
  for (int ry = 0; ry < region.h; ++ry) {
    const int y = region.y + ry;
    const bool sky = cam.mode == RobotMode::kUgv && y + 0.5 < horizon;
    const auto& base = sky ? kSkyColor : kGroundColor;
    const long long by = floor_div(y + oy, kNoiseBlock);
    std::uint8_t* px = out.pixel(0, ry);
    long long cur_bx = 0;
    int n = 0;
    bool have = false;
    for (int rx = 0; rx < region.w; ++rx, px += 3) {
      const long long bx = floor_div(region.x + rx + ox, kNoiseBlock);
      if (!have || bx != cur_bx) {
        cur_bx = bx;
        n = block_noise(scene.seed, bx, by);
        have = true;
      }
      for (int c = 0; c < 3; ++c) px[c] = add_clamped(base[c], n);
    }
  }
}

void set(std::uint8_t* px, const std::array<std::uint8_t, 3>& c) {
  px[0] = c[0];
  px[1] = c[1];
  px[2] = c[2];
}

bool in_parts(const std::vector<WeaponPart>& parts, double u, double v) {
  for (const auto& p : parts)
    if (u >= p.u0 && u < p.u1 && v >= p.v0 && v < p.v1) return true;
  return false;
}

void paint_sprite(vision::RgbImage& out, const vision::Rect& region, const SpriteProjection& sp, const Entity& e,
                  RobotMode mode) {
  const vision::Rect r = sp.pixel_rect();
  const int x0 = std::max(r.x, region.x), x1 = std::min(r.x + r.w, region.x + region.w);
  const int y0 = std::max(r.y, region.y), y1 = std::min(r.y + r.h, region.y + region.h);
  const auto parts = weapon_parts(e.weapon);
  const bool mirror = e.facing == Facing::kLeft;
  for (int y = y0; y < y1; ++y) {
    const double v = (y + 0.5 - sp.top) / sp.height;
    for (int x = x0; x < x1; ++x) {
      double u = (x + 0.5 - sp.left) / sp.width;
      if (u < 0 || u >= 1 || v < 0 || v >= 1) continue;
      std::uint8_t* px = out.pixel(x - region.x, y - region.y);
      const double uw = mirror ? 1.0 - u : u;
      if (mode == RobotMode::kUgv) {
        const double hx = (u - 0.5) * sp.width, hy = (v - 0.12) * sp.height, hr = 0.1 * sp.height;
        if (in_parts(parts, uw, v)) set(px, kWeaponColor);
        else if (hx * hx + hy * hy <= hr * hr) set(px, kHeadColor);
        else if (u >= 0.25 && u < 0.75 && v >= 0.22) set(px, kBodyColor);
      } else {
        // Top-down: shoulders disc, head disc, weapon laid along the facing direction.
        const double du = u - 0.5, dv = v - 0.5;
        const double rr = du * du + dv * dv;
        bool weapon = false;
        for (const auto& p : parts)
          if (uw >= p.u0 && uw < p.u1 && v >= 0.46 && v < 0.46 + (p.v1 - p.v0) * 1.5) weapon = true;
        if (weapon) set(px, kWeaponColor);
        else if (rr <= 0.17 * 0.17) set(px, kHeadColor);
        else if (rr <= 0.42 * 0.42) set(px, kBodyColor);
      }
    }
  }
}

}  // namespace

std::vector<SpriteProjection> project_entities(const Scene& scene, const CameraState& cam, int frame_w, int frame_h) {
  const View v = view_for(frame_w, frame_h);
  std::vector<SpriteProjection> out;
  for (const auto& e : scene.entities) {
    SpriteProjection sp;
    sp.entity_id = e.id;
    if (cam.mode == RobotMode::kUgv) {
      const double dx = e.x - cam.ugv.x, dy = e.y - cam.ugv.y;
      const double c = std::cos(cam.ugv.heading), s = std::sin(cam.ugv.heading);
      const double depth = dx * c + dy * s;
      const double lateral = -dx * s + dy * c;  // positive to the left
      if (depth < kMinDepth) continue;
      sp.depth = depth;
      sp.height = v.focal * kPersonHeight / depth;
      sp.width = sp.height / 2;
      const double cx = v.fw / 2.0 - v.focal * lateral / depth - cam.pan * v.ppd;
      const double foot = v.fh / 2.0 + cam.tilt * v.ppd + v.focal * kCameraHeight / depth;
      sp.left = cx - sp.width / 2;
      sp.top = foot - sp.height;
    } else {
      const double scale = v.focal / cam.uav.altitude;
      const double size = 0.6 * scale;
      const double cx = v.fw / 2.0 + (e.x - cam.uav.x) * scale - cam.pan * v.ppd;
      const double cy = v.fh / 2.0 - (e.y - cam.uav.y) * scale + cam.tilt * v.ppd;
      sp.depth = cam.uav.altitude;
      sp.width = sp.height = size;
      sp.left = cx - size / 2;
      sp.top = cy - size / 2;
    }
    out.push_back(sp);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SpriteProjection& a, const SpriteProjection& b) { return a.depth > b.depth; });
  return out;
}

vision::RgbImage render_region(const Scene& scene, const CameraState& cam, const vision::Rect& region, int frame_w,
                               int frame_h) {
  if (region.w < 1 || region.h < 1) throw InvalidParameter("render region is empty");
  if (cam.mode == RobotMode::kUav && !(cam.uav.altitude > 0)) throw InvalidParameter("UAV altitude must be positive");
  const View v = view_for(frame_w, frame_h);
  vision::RgbImage out(region.w, region.h);
  paint_background(out, region, scene, cam, v);
  for (const auto& sp : project_entities(scene, cam, frame_w, frame_h)) {
    const auto it = std::find_if(scene.entities.begin(), scene.entities.end(),
                                 [&](const Entity& e) { return e.id == sp.entity_id; });
    paint_sprite(out, region, sp, *it, cam.mode);
  }
  return out;
}

vision::RgbImage render_frame(const Scene& scene, const CameraState& cam, int frame_w, int frame_h) {
  return render_region(scene, cam, {0, 0, frame_w, frame_h}, frame_w, frame_h);
}

}  // namespace teleop::robot
