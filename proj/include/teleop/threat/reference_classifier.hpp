#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "teleop/threat/classifier.hpp"
#include "teleop/vision/hog.hpp"

namespace teleop::threat {

/// 8-way linear layer over the ROI's HOG descriptor.
struct ReferenceModel {
  int descriptor_length = 0;
  std::vector<double> weights;  // kNumClasses rows of descriptor_length, row-major
  std::array<double, kNumClasses> bias{};

  void validate() const;
};

// Text format:
//   refclf v1 <descriptor_len> 8
//   8 weight rows of <descriptor_len> numbers
//   1 bias row of 8 numbers
ReferenceModel parse_reference_model(std::istream& in, const std::string& source = "<refclf>");
ReferenceModel load_reference_model(const std::string& path);
void write_reference_model(std::ostream& out, const ReferenceModel& model);

/// HOG layout used by the reference classifier (the 64x128 pedestrian layout).
vision::HogParams reference_hog_params();

/// ROI -> 64x128 box-averaged downscale -> HOG descriptor.
std::vector<double> reference_features(const vision::GrayImage& roi_image);

std::array<double, kNumClasses> reference_logits(const ReferenceModel& model, std::span<const double> features);

/// Deterministic, dependency-free classifier: HOG features, linear layer, softmax.
class ReferenceClassifier : public ClassifierPlugin {
 public:
  explicit ReferenceClassifier(ReferenceModel model);
  static ReferenceClassifier load(const std::string& path);

  std::string name() const override { return "reference"; }
  bool thread_safe() const override { return true; }
  Probabilities infer(const RoiImage& roi) override;

  const ReferenceModel& model() const { return model_; }

 private:
  ReferenceModel model_;
};

}  // namespace teleop::threat
