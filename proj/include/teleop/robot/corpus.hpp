#pragma once

#include <cstdint>
#include <vector>

#include "teleop/robot/scene.hpp"
#include "teleop/threat/roi.hpp"

namespace teleop::robot {

struct LabeledRoi {
  threat::RoiImage roi;
  int label = 0;  // index into threat::kLabels
};

/// Crop jitter relative to the sprite box.
struct CorpusJitter {
  double offset = 0.05;  // centre shift, fraction of box width/height
  double scale = 0.08;   // relative size change
};

/// `n` rendered person ROIs with labels drawn uniformly over the 8 classes.
/// Deterministic per seed.
std::vector<LabeledRoi> labeled_corpus(std::uint64_t seed, std::size_t n, const CorpusJitter& jitter = {});

/// True iff the ROI holds at least one weapon-coloured pixel.
bool has_weapon_pixels(const threat::RoiImage& roi);

}  // namespace teleop::robot
