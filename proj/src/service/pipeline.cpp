#include "teleop/service/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/threat/reference_classifier.hpp"
#include "teleop/vision/gaussian.hpp"
#include "teleop/vision/resize.hpp"

namespace teleop::service {

PipelineModels PipelineModels::load(const PipelineConfig& cfg) {
  cfg.validate();
  PipelineModels m;
  if (cfg.detector == DetectorKind::kHaar) {
    m.detector = vision::load_cascade(cfg.resolved_cascade());
  } else {
    vision::HogSvmDetector d;
    d.model = vision::load_svm(cfg.resolved_svm());
    if (static_cast<int>(d.model.weights.size()) != d.params.descriptor_length())
      throw InvalidInput("SVM weight count does not match the HOG descriptor length");
    m.detector = std::move(d);
  }
  std::unique_ptr<threat::ClassifierPlugin> plugin;
  if (cfg.classifier == ClassifierKind::kReference)
    plugin = std::make_unique<threat::ReferenceClassifier>(threat::ReferenceClassifier::load(cfg.resolved_reference()));
  else
    plugin = std::make_unique<threat::StubClassifier>(threat::StubClassifier::load(cfg.stub_path));
  m.classifier = threat::make_concurrent(std::move(plugin));
  return m;
}

Pipeline::Pipeline(PipelineConfig cfg, PipelineModels models) : cfg_(std::move(cfg)), models_(std::move(models)) {
  cfg_.validate();
  if (!models_.classifier) throw InvalidParameter("pipeline needs a classifier");
}

Preprocessed Pipeline::preprocess(const vision::RgbImage& frame) const {
  Preprocessed p;
  p.luma = vision::to_luma(frame);
  p.internal = vision::gaussian_blur(vision::resize_area(p.luma, cfg_.internal_width, cfg_.internal_height), cfg_.blur);
  return p;
}

std::vector<vision::Detection> Pipeline::detect(const vision::GrayImage& internal, int frame_w, int frame_h,
                                                vision::DetectionStats* stats) const {
  auto dets = vision::suppress_enclosing(
      vision::non_max_suppression(vision::sliding_window_detect(internal, models_.detector, cfg_.pyramid, stats),
                                  cfg_.nms_iou),
      cfg_.enclosure_overlap);
  const double sx = static_cast<double>(frame_w) / internal.width();
  const double sy = static_cast<double>(frame_h) / internal.height();
  for (auto& d : dets) {
    vision::Rect r{static_cast<int>(std::lround(d.bbox.x * sx)), static_cast<int>(std::lround(d.bbox.y * sy)),
                   static_cast<int>(std::lround(d.bbox.w * sx)), static_cast<int>(std::lround(d.bbox.h * sy))};
    r.x = std::clamp(r.x, 0, frame_w - 1);
    r.y = std::clamp(r.y, 0, frame_h - 1);
    r.w = std::clamp(r.w, 1, frame_w - r.x);
    r.h = std::clamp(r.h, 1, frame_h - r.y);
    d.bbox = r;
  }
  return dets;
}

std::vector<overlay::AnnotatedDetection> Pipeline::classify(const vision::GrayImage& luma,
                                                            const std::vector<vision::Detection>& dets,
                                                            std::size_t* failures) const {
  std::vector<overlay::AnnotatedDetection> out;
  out.reserve(dets.size());
  for (const auto& d : dets) {
    overlay::AnnotatedDetection a{d, threat::unknown_verdict()};
    try {
      const auto roi = threat::extract_and_resize(luma, d.bbox);
      a.verdict = threat::verdict(threat::classify(roi, *models_.classifier), cfg_.threshold);
    } catch (const threat::ClassifierUnavailable&) {
      if (failures) ++*failures;
    }
    out.push_back(std::move(a));
  }
  return out;
}

FrameResult Pipeline::process_frame(const vision::RgbImage& frame, std::uint32_t frame_seq,
                                    std::uint64_t timestamp_us) const {
  if (frame.width() != overlay::kFrameWidth || frame.height() != overlay::kFrameHeight)
    throw InvalidInput("pipeline input must be 1900x1000");
  FrameResult r;
  auto lap = [&](Stage s, const StopWatch& w) { r.stage_ms[static_cast<std::size_t>(s)] = w.ms(); };

  StopWatch w;
  const auto pre = preprocess(frame);
  lap(Stage::kBlur, w);

  w = StopWatch();
  const auto dets = detect(pre.internal, frame.width(), frame.height());
  lap(Stage::kDetect, w);

  w = StopWatch();
  auto annotated = classify(pre.luma, dets, &r.classifier_failures);
  r.classifier_calls = dets.size();
  lap(Stage::kClassify, w);

  w = StopWatch();
  r.annotated = overlay::draw_annotations(frame, std::move(annotated), frame_seq, timestamp_us);
  r.detections = detections_message(r.annotated);
  lap(Stage::kAnnotate, w);

  w = StopWatch();
  r.sbs = overlay::to_half_sbs(r.annotated);
  lap(Stage::kSbs, w);
  return r;
}

transport::Detections detections_message(const overlay::AnnotatedFrame& annotated) {
  transport::Detections msg;
  msg.frame_seq = annotated.frame_seq;
  for (const auto& a : annotated.detections) {
    transport::DetectionRecord rec;
    rec.x = static_cast<std::uint16_t>(a.detection.bbox.x);
    rec.y = static_cast<std::uint16_t>(a.detection.bbox.y);
    rec.w = static_cast<std::uint16_t>(a.detection.bbox.w);
    rec.h = static_cast<std::uint16_t>(a.detection.bbox.h);
    rec.person_score = static_cast<float>(a.detection.person_score);
    rec.threat_probability = static_cast<float>(a.verdict.threat_probability);
    rec.percent = static_cast<std::uint8_t>(a.verdict.percent);
    switch (a.verdict.color) {
      case threat::VerdictColor::kGreen: rec.verdict = transport::WireVerdict::kGreen; break;
      case threat::VerdictColor::kRed: rec.verdict = transport::WireVerdict::kRed; break;
      case threat::VerdictColor::kUnknown: rec.verdict = transport::WireVerdict::kUnknown; break;
    }
    rec.label = a.verdict.color == threat::VerdictColor::kUnknown
                    ? transport::kUnknownLabel
                    : static_cast<std::uint8_t>(threat::label_index(a.verdict.label));
    msg.items.push_back(rec);
  }
  return msg;
}

transport::VideoFrame video_frame_of(const vision::RgbImage& img, transport::FrameEncoding enc) {
  transport::VideoFrame f;
  f.width = static_cast<std::uint16_t>(img.width());
  f.height = static_cast<std::uint16_t>(img.height());
  f.format = transport::PixelFormat::kRgb8;
  f.encoding = enc;
  f.pixels = img.data();
  return f;
}

vision::RgbImage image_of(const transport::VideoFrame& f) {
  if (f.format == transport::PixelFormat::kRgb8) return vision::RgbImage(f.width, f.height, f.pixels);
  std::vector<std::uint8_t> rgb(f.pixels.size() * 3);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = f.pixels[i];
  return vision::RgbImage(f.width, f.height, std::move(rgb));
}

}  // namespace teleop::service
