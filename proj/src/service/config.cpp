#include "teleop/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "teleop/transport/socket.hpp"

namespace teleop::service {

DetectorKind parse_detector_kind(const std::string& s) {
  if (s == "haar") return DetectorKind::kHaar;
  if (s == "hog") return DetectorKind::kHog;
  throw InvalidParameter("detector must be haar or hog, got '" + s + "'");
}

ClassifierKind parse_classifier_kind(const std::string& s) {
  if (s == "reference") return ClassifierKind::kReference;
  if (s == "stub") return ClassifierKind::kStub;
  throw InvalidParameter("classifier must be reference or stub, got '" + s + "'");
}

std::string to_string(DetectorKind k) { return k == DetectorKind::kHaar ? "haar" : "hog"; }
std::string to_string(ClassifierKind k) { return k == ClassifierKind::kReference ? "reference" : "stub"; }

std::string default_model_dir() {
  if (const char* env = std::getenv("TELEOP_MODEL_DIR")) return env;
  return TELEOP_DEFAULT_MODEL_DIR;
}

void PipelineConfig::validate() const {
  blur.validate();
  pyramid.validate();
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidParameter("threshold must lie in (0, 1)");
  if (!(nms_iou >= 0.0 && nms_iou <= 1.0)) throw InvalidParameter("nms_iou must lie in [0, 1]");
  if (!(enclosure_overlap >= 0.0 && enclosure_overlap <= 1.0))
    throw InvalidParameter("enclosure_overlap must lie in [0, 1]");
  if (internal_width < 1 || internal_height < 1) throw InvalidParameter("internal resolution must be positive");
  if (classifier == ClassifierKind::kStub && stub_path.empty())
    throw InvalidParameter("the stub classifier needs a model path");
}

std::string PipelineConfig::resolved_cascade() const {
  return cascade_path.empty() ? default_model_dir() + "/person_cascade.txt" : cascade_path;
}
std::string PipelineConfig::resolved_svm() const {
  return svm_path.empty() ? default_model_dir() + "/person_svm.txt" : svm_path;
}
std::string PipelineConfig::resolved_reference() const {
  return reference_path.empty() ? default_model_dir() + "/reference_classifier.txt" : reference_path;
}

std::string ServiceConfig::resolved_robot_control() const {
  if (!robot_control.empty()) return robot_control;
  auto ep = transport::Endpoint::parse(robot);
  ep.port = static_cast<std::uint16_t>(ep.port + 1);
  return ep.to_string();
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw InvalidParameter(key + ": expected a number, got '" + v + "'");
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long d = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw InvalidParameter(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

void set_config_value(ServiceConfig& cfg, const std::string& key, const std::string& value) {
  auto& p = cfg.pipeline;
  if (key == "detector") p.detector = parse_detector_kind(value);
  else if (key == "cascade") p.cascade_path = value;
  else if (key == "svm") p.svm_path = value;
  else if (key == "classifier") p.classifier = parse_classifier_kind(value);
  else if (key == "reference_model") p.reference_path = value;
  else if (key == "stub_model") p.stub_path = value;
  else if (key == "threshold") p.threshold = to_double(key, value);
  else if (key == "nms_iou") p.nms_iou = to_double(key, value);
  else if (key == "enclosure_overlap") p.enclosure_overlap = to_double(key, value);
  else if (key == "blur_sigma") p.blur.sigma_x = p.blur.sigma_y = to_double(key, value);
  else if (key == "blur_radius") p.blur.radius = to_int(key, value);
  else if (key == "pyramid_scale") p.pyramid.scale_factor = to_double(key, value);
  else if (key == "stride") p.pyramid.stride = to_int(key, value);
  else if (key == "internal_width") p.internal_width = to_int(key, value);
  else if (key == "internal_height") p.internal_height = to_int(key, value);
  else if (key == "robot") cfg.robot = value;
  else if (key == "robot_control") cfg.robot_control = value;
  else if (key == "listen") cfg.listen = value;
  else if (key == "http_listen") cfg.http_listen = value;
  else if (key == "serve_console") cfg.serve_console = value;
  else if (key == "metrics") cfg.metrics_path = value;
  else if (key == "media_queue") cfg.media_queue = static_cast<std::size_t>(to_int(key, value));
  else if (key == "control_watermark") cfg.control_watermark = static_cast<std::size_t>(to_int(key, value));
  else throw InvalidParameter("unknown config key '" + key + "'");
}

void apply_config(ServiceConfig& cfg, std::istream& in, const std::string& source) {
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, n, "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError(source, n, "empty key");
    try {
      set_config_value(cfg, key, value);
    } catch (const InvalidParameter& e) {
      throw ParseError(source, n, e.what());
    }
  }
}

void apply_config_file(ServiceConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  apply_config(cfg, in, path);
}

}  // namespace teleop::service
