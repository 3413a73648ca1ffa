#include "teleop/threat/reference_classifier.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "teleop/vision/resize.hpp"
#include "teleop/vision/text_format.hpp"

namespace teleop::threat {

void ReferenceModel::validate() const {
  if (descriptor_length < 1) throw InvalidParameter("reference model descriptor length must be >= 1");
  if (weights.size() != static_cast<std::size_t>(descriptor_length) * kNumClasses)
    throw InvalidParameter("reference model weight count mismatch");
  for (double w : weights)
    if (!std::isfinite(w)) throw InvalidParameter("reference model weight not finite");
  for (double b : bias)
    if (!std::isfinite(b)) throw InvalidParameter("reference model bias not finite");
}

ReferenceModel parse_reference_model(std::istream& in, const std::string& source) {
  text::LineReader reader(in, source);
  auto header = reader.expect("refclf header");
  reader.require(header, 4, "refclf");
  if (header[1] != "v1") reader.fail("unsupported refclf version '" + header[1] + "'");
  ReferenceModel m;
  const long long len = reader.to_int(header[2]);
  if (len < 1) reader.fail("descriptor length must be >= 1");
  if (reader.to_int(header[3]) != kNumClasses) reader.fail("class count must be 8");
  m.descriptor_length = static_cast<int>(len);
  m.weights.reserve(static_cast<std::size_t>(len) * kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) {
    auto row = reader.expect("weight row");
    if (static_cast<long long>(row.size()) != len)
      reader.fail("expected " + std::to_string(len) + " weights, found " + std::to_string(row.size()));
    for (const auto& t : row) m.weights.push_back(reader.to_double(t));
  }
  auto bias = reader.expect("bias row");
  reader.require(bias, kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) m.bias[c] = reader.to_double(bias[c]);
  reader.expect_end();
  return m;
}

ReferenceModel load_reference_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open reference model '" + path + "'");
  return parse_reference_model(in, path);
}

void write_reference_model(std::ostream& out, const ReferenceModel& m) {
  out << "refclf v1 " << m.descriptor_length << ' ' << kNumClasses << '\n' << std::setprecision(9);
  for (int c = 0; c < kNumClasses; ++c) {
    for (int i = 0; i < m.descriptor_length; ++i)
      out << (i ? " " : "") << m.weights[static_cast<std::size_t>(c) * m.descriptor_length + i];
    out << '\n';
  }
  for (int c = 0; c < kNumClasses; ++c) out << (c ? " " : "") << m.bias[c];
  out << '\n';
}

vision::HogParams reference_hog_params() { return vision::HogParams{}; }

std::vector<double> reference_features(const vision::GrayImage& roi_image) {
  const auto params = reference_hog_params();
  return vision::hog_descriptor(vision::resize_area(roi_image, params.window_w, params.window_h), params);
}

std::array<double, kNumClasses> reference_logits(const ReferenceModel& m, std::span<const double> f) {
  if (static_cast<int>(f.size()) != m.descriptor_length) throw InvalidInput("feature length mismatch");
  std::array<double, kNumClasses> logits{};
  for (int c = 0; c < kNumClasses; ++c) {
    const double* w = m.weights.data() + static_cast<std::size_t>(c) * m.descriptor_length;
    double acc = m.bias[c];
    for (int i = 0; i < m.descriptor_length; ++i) acc += w[i] * f[i];
    logits[c] = acc;
  }
  return logits;
}

ReferenceClassifier::ReferenceClassifier(ReferenceModel model) : model_(std::move(model)) {
  model_.validate();
  if (model_.descriptor_length != reference_hog_params().descriptor_length())
    throw InvalidParameter("reference model does not match the 64x128 HOG layout");
}

ReferenceClassifier ReferenceClassifier::load(const std::string& path) {
  return ReferenceClassifier(load_reference_model(path));
}

Probabilities ReferenceClassifier::infer(const RoiImage& roi) {
  const auto f = reference_features(roi.image);
  const auto logits = reference_logits(model_, f);
  return softmax(logits).probabilities;
}

}  // namespace teleop::threat
