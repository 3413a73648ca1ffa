#pragma once

#include <memory>
#include <vector>

#include "teleop/overlay/annotate.hpp"
#include "teleop/overlay/sbs.hpp"
#include "teleop/service/config.hpp"
#include "teleop/service/metrics.hpp"
#include "teleop/threat/classifier.hpp"
#include "teleop/transport/messages.hpp"
#include "teleop/vision/detect.hpp"

namespace teleop::service {

/// Loaded, validated models. Loading happens once at startup so a bad model
/// file fails there and never mid-stream.
struct PipelineModels {
  vision::DetectorModel detector;
  std::shared_ptr<threat::ClassifierPlugin> classifier;

  static PipelineModels load(const PipelineConfig& cfg);
};

struct Preprocessed {
  vision::GrayImage luma;      // full resolution, ROI source
  vision::GrayImage internal;  // downscaled and blurred, detector input
};

struct FrameResult {
  overlay::AnnotatedFrame annotated;
  overlay::SbsFrame sbs;
  transport::Detections detections;
  std::array<double, kStageCount> stage_ms{};  // encode and end_to_end left 0
  std::size_t classifier_calls = 0;
  std::size_t classifier_failures = 0;
};

/// Per-frame processing: luma, downscale to the internal resolution, blur,
/// detect, NMS, map boxes to full resolution, classify each ROI, annotate the
/// full-resolution frame, format half-SBS. Deterministic for fixed inputs.
/// The stage functions are const and may be driven from separate threads.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, PipelineModels models);

  Preprocessed preprocess(const vision::RgbImage& frame) const;
  /// Detections in full-frame coordinates after NMS.
  std::vector<vision::Detection> detect(const vision::GrayImage& internal, int frame_w, int frame_h,
                                        vision::DetectionStats* stats = nullptr) const;
  /// Classifier failures become UNKNOWN verdicts and are counted in `failures`.
  std::vector<overlay::AnnotatedDetection> classify(const vision::GrayImage& luma,
                                                    const std::vector<vision::Detection>& dets,
                                                    std::size_t* failures = nullptr) const;

  FrameResult process_frame(const vision::RgbImage& frame, std::uint32_t frame_seq = 0,
                            std::uint64_t timestamp_us = 0) const;

  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
  PipelineModels models_;
};

/// DETECTIONS payload describing `annotated`.
transport::Detections detections_message(const overlay::AnnotatedFrame& annotated);

/// Annotated SBS frame as a VIDEO_FRAME body.
transport::VideoFrame video_frame_of(const vision::RgbImage& img,
                                     transport::FrameEncoding enc = transport::FrameEncoding::kRaw);
vision::RgbImage image_of(const transport::VideoFrame& f);

}  // namespace teleop::service
