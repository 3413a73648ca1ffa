#include "teleop/robot/scene.hpp"

#include <fstream>
#include <sstream>

#include "teleop/threat/labels.hpp"
#include "teleop/vision/text_format.hpp"

namespace teleop::robot {

void Scene::validate() const {
  if (!(bounds.xmin < bounds.xmax && bounds.ymin < bounds.ymax)) throw InvalidInput("scene bounds are empty");
  for (const auto& e : entities) {
    if (!bounds.contains(e.x, e.y)) throw InvalidInput("entity " + std::to_string(e.id) + " lies outside the bounds");
    if (e.weapon < 0 || e.weapon >= threat::kNumClasses) throw InvalidInput("entity weapon index out of range");
  }
}

namespace {

Facing parse_facing(const text::LineReader& r, const std::string& t) {
  if (t == "left") return Facing::kLeft;
  if (t == "right") return Facing::kRight;
  r.fail("facing must be left or right, got '" + t + "'");
}

}  // namespace

Scene parse_scene(std::istream& in, const std::string& source) {
  text::LineReader r(in, source);
  auto header = r.expect("scene header");
  r.require(header, 2, "scene");
  if (header[1] != "v1") r.fail("unsupported scene version '" + header[1] + "'");

  Scene s;
  std::vector<std::string> t;
  while (r.next(t)) {
    if (t[0] == "bounds") {
      r.require(t, 5);
      s.bounds = {r.to_double(t[1]), r.to_double(t[2]), r.to_double(t[3]), r.to_double(t[4])};
      if (!(s.bounds.xmin < s.bounds.xmax && s.bounds.ymin < s.bounds.ymax)) r.fail("bounds are empty");
    } else if (t[0] == "seed") {
      r.require(t, 2);
      const long long v = r.to_int(t[1]);
      if (v < 0) r.fail("seed must be non-negative");
      s.seed = static_cast<std::uint64_t>(v);
    } else if (t[0] == "entity") {
      if (t.size() < 2) r.fail("entity needs a kind");
      Entity e;
      e.id = static_cast<int>(s.entities.size()) + 1;
      std::size_t at = 2;
      if (t[1] == "PERSON_UNARMED") {
        r.require(t, 5);
      } else if (t[1] == "PERSON_ARMED") {
        r.require(t, 6);
        try {
          e.weapon = threat::label_index(t[2]);
        } catch (const InvalidInput&) {
          r.fail("unknown weapon class '" + t[2] + "'");
        }
        if (e.weapon == threat::kNoWeapon) r.fail("PERSON_ARMED needs a weapon class");
        at = 3;
      } else {
        r.fail("unknown entity kind '" + t[1] + "'");
      }
      e.x = r.to_double(t[at]);
      e.y = r.to_double(t[at + 1]);
      e.facing = parse_facing(r, t[at + 2]);
      if (!s.bounds.contains(e.x, e.y)) r.fail("entity outside scene bounds");
      s.entities.push_back(e);
    } else {
      r.fail("unknown record '" + t[0] + "'");
    }
  }
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scene file " + path);
  return parse_scene(in, path);
}

std::string format_scene(const Scene& s) {
  std::ostringstream o;
  o.precision(17);
  o << "scene v1\n";
  o << "bounds " << s.bounds.xmin << ' ' << s.bounds.ymin << ' ' << s.bounds.xmax << ' ' << s.bounds.ymax << '\n';
  o << "seed " << s.seed << '\n';
  for (const auto& e : s.entities) {
    o << "entity ";
    if (e.armed())
      o << "PERSON_ARMED " << threat::kLabels[e.weapon] << ' ';
    else
      o << "PERSON_UNARMED ";
    o << e.x << ' ' << e.y << ' ' << (e.facing == Facing::kLeft ? "left" : "right") << '\n';
  }
  return o.str();
}

}  // namespace teleop::robot
