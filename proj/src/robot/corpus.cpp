#include "teleop/robot/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "teleop/robot/render.hpp"
#include "teleop/threat/labels.hpp"

namespace teleop::robot {

std::vector<LabeledRoi> labeled_corpus(std::uint64_t seed, std::size_t n, const CorpusJitter& jitter) {
  if (n < 1) throw InvalidParameter("corpus size must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> label_dist(0, threat::kNumClasses - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sym = [&](double a) { return (2 * unit(rng) - 1) * a; };

  std::vector<LabeledRoi> out;
  out.reserve(n);
  while (out.size() < n) {
    const int label = label_dist(rng);
    Scene scene;
    scene.seed = rng();
    const double depth = 6.0 + 8.0 * unit(rng);
    const double lateral = sym(0.25 * depth);
    Entity e;
    e.id = 1;
    e.x = depth;
    e.y = lateral;
    e.weapon = label;
    e.facing = unit(rng) < 0.5 ? Facing::kLeft : Facing::kRight;
    scene.entities.push_back(e);

    CameraState cam;
    const auto sp = project_entities(scene, cam).at(0);
    const double scale = 1.0 + sym(jitter.scale);
    const double cx = sp.center_x() + sym(jitter.offset) * sp.width;
    const double cy = sp.center_y() + sym(jitter.offset) * sp.height;
    const double w = sp.width * scale, h = sp.height * scale;
    vision::Rect crop{static_cast<int>(std::lround(cx - w / 2)), static_cast<int>(std::lround(cy - h / 2)),
                      static_cast<int>(std::lround(w)), static_cast<int>(std::lround(h))};
    crop.x = std::clamp(crop.x, 0, kFrameWidth - crop.w);
    crop.y = std::clamp(crop.y, 0, kFrameHeight - crop.h);

    const auto region = vision::to_luma(render_region(scene, cam, crop));
    auto roi = threat::extract_and_resize(region, {0, 0, crop.w, crop.h});
    roi.source_bbox = crop;
    out.push_back({std::move(roi), label});
  }
  return out;
}

bool has_weapon_pixels(const threat::RoiImage& roi) {
  const auto& d = roi.image.data();
  return std::any_of(d.begin(), d.end(), [](std::uint8_t v) { return v >= kWeaponLumaFloor; });
}

}  // namespace teleop::robot
