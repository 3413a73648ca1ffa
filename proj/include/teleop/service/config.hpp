#pragma once

#include <istream>
#include <map>
#include <string>

#include "teleop/vision/detect.hpp"
#include "teleop/vision/gaussian.hpp"

namespace teleop::service {

enum class DetectorKind { kHaar, kHog };
enum class ClassifierKind { kReference, kStub };

DetectorKind parse_detector_kind(const std::string& s);
ClassifierKind parse_classifier_kind(const std::string& s);
std::string to_string(DetectorKind k);
std::string to_string(ClassifierKind k);

/// Directory holding the bundled models.
std::string default_model_dir();

struct PipelineConfig {
  DetectorKind detector = DetectorKind::kHaar;
  std::string cascade_path;    // empty = bundled model
  std::string svm_path;
  ClassifierKind classifier = ClassifierKind::kReference;
  std::string reference_path;
  std::string stub_path;
  vision::GaussianKernelParams blur;
  vision::PyramidParams pyramid;
  double nms_iou = 0.3;  // 0.45 leaves duplicate boxes from adjacent pyramid levels
  double enclosure_overlap = 0.8;  // 1 disables the nested-box pass
  double threshold = 0.5;
  int internal_width = 633;  // 1/3 of 1900x1000
  int internal_height = 333;

  /// Throws InvalidParameter.
  void validate() const;
  std::string resolved_cascade() const;
  std::string resolved_svm() const;
  std::string resolved_reference() const;
};

struct ServiceConfig {
  PipelineConfig pipeline;
  std::string robot = "127.0.0.1:7701";  // media endpoint
  std::string robot_control;             // empty = robot host, media port + 1
  std::string listen = "0.0.0.0:7703";   // console envelope feed
  std::string http_listen = "0.0.0.0:7704";  // console HTTP + WebSocket bridge
  std::string serve_console;             // static bundle directory, empty = none
  std::string metrics_path = "inference_metrics.csv";
  std::size_t media_queue = 2;
  std::size_t control_watermark = 256;

  std::string resolved_robot_control() const;
};

/// Applies `key = value` lines ('#' comments, blank lines ignored) on top of
/// `cfg`. Unknown keys and bad values are ParseErrors with line numbers.
void apply_config(ServiceConfig& cfg, std::istream& in, const std::string& source = "<config>");
void apply_config_file(ServiceConfig& cfg, const std::string& path);
/// Sets a single key, as from the config file.
void set_config_value(ServiceConfig& cfg, const std::string& key, const std::string& value);

}  // namespace teleop::service
