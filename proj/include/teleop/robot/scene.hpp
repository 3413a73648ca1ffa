#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "teleop/error.hpp"

namespace teleop::robot {

enum class Facing { kLeft, kRight };

struct Entity {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  /// Index into threat::kLabels; 0 (no_weapon) is an unarmed person.
  int weapon = 0;
  Facing facing = Facing::kRight;

  bool armed() const { return weapon != 0; }
  bool operator==(const Entity&) const = default;
};

struct Bounds {
  double xmin = -50.0, ymin = -50.0, xmax = 50.0, ymax = 50.0;
  bool contains(double x, double y) const { return x >= xmin && x <= xmax && y >= ymin && y <= ymax; }
  bool operator==(const Bounds&) const = default;
};

struct Scene {
  Bounds bounds;
  std::uint64_t seed = 0;  // background texture seed
  std::vector<Entity> entities;

  /// Throws InvalidInput if an entity is out of bounds or has a bad weapon index.
  void validate() const;
  bool operator==(const Scene&) const = default;
};

// Scene file, one record per line ('#' comments allowed):
//   scene v1
//   bounds <xmin> <ymin> <xmax> <ymax>
//   seed <n>
//   entity PERSON_UNARMED <x> <y> <left|right>
//   entity PERSON_ARMED <weapon class> <x> <y> <left|right>
// Entity ids are assigned 1, 2, ... in file order.
Scene parse_scene(std::istream& in, const std::string& source = "<scene>");
Scene load_scene(const std::string& path);
std::string format_scene(const Scene& s);

}  // namespace teleop::robot
