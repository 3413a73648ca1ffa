#include "teleop/threat/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>

#include "teleop/vision/text_format.hpp"

namespace teleop::threat {

ClassScores make_scores(const Probabilities& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw InvalidInput("class probability outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("class probabilities do not sum to 1");
  ClassScores s;
  s.probabilities = p;
  s.argmax_label = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  return s;
}

ClassScores softmax(std::span<const double> logits) {
  if (logits.size() != kNumClasses) throw InvalidInput("softmax expects 8 logits");
  for (double l : logits)
    if (!std::isfinite(l)) throw InvalidInput("softmax logits must be finite");
  const double mx = *std::max_element(logits.begin(), logits.end());
  Probabilities p{};
  double sum = 0.0;
  for (int i = 0; i < kNumClasses; ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return make_scores(p);
}

std::string_view to_string(VerdictColor c) {
  switch (c) {
    case VerdictColor::kGreen: return "GREEN";
    case VerdictColor::kRed: return "RED";
    case VerdictColor::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

int to_percent(double p) {
  // The 1e-9 nudge keeps decimal halves such as 0.495 from rounding down
  // through their binary representation.
  return std::clamp(static_cast<int>(std::floor(p * 100.0 + 0.5 + 1e-9)), 0, 100);
}

ThreatVerdict verdict(const ClassScores& scores, double threshold) {
  ThreatVerdict v;
  v.threat_probability = std::clamp(1.0 - scores.probabilities[kNoWeapon], 0.0, 1.0);
  v.percent = to_percent(v.threat_probability);
  v.color = v.threat_probability >= threshold ? VerdictColor::kRed : VerdictColor::kGreen;
  v.label = std::string(scores.label());
  return v;
}

ThreatVerdict unknown_verdict() {
  ThreatVerdict v;
  v.color = VerdictColor::kUnknown;
  v.label = "unknown";
  return v;
}

ClassScores classify(const RoiImage& roi, ClassifierPlugin& plugin) {
  if (roi.image.width() != kRoiSize || roi.image.height() != kRoiSize)
    throw InvalidInput("ROI must be 227x227");
  Probabilities p;
  try {
    p = plugin.infer(roi);
  } catch (const std::exception& e) {
    throw ClassifierUnavailable("classifier '" + plugin.name() + "' failed: " + e.what());
  }
  try {
    return make_scores(p);
  } catch (const InvalidInput& e) {
    throw ClassifierUnavailable("classifier '" + plugin.name() + "' returned invalid scores: " + e.what());
  }
}

StubClassifier StubClassifier::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open stub classifier file '" + path + "'");
  text::LineReader reader(in, path);
  auto header = reader.expect("stub header");
  reader.require(header, 2, "stub");
  if (header[1] != "v1") reader.fail("unsupported stub version '" + header[1] + "'");
  auto row = reader.expect("probability record");
  reader.require(row, kNumClasses);
  Probabilities p{};
  for (int i = 0; i < kNumClasses; ++i) p[i] = reader.to_double(row[i]);
  reader.expect_end();
  return StubClassifier(p);
}

Probabilities StubClassifier::infer(const RoiImage&) {
  if (fail_) throw std::runtime_error("stub configured to fail");
  return p_;
}

SerializedClassifier::SerializedClassifier(std::unique_ptr<ClassifierPlugin> inner)
    : inner_(std::move(inner)), worker_([this] { run(); }) {}

SerializedClassifier::~SerializedClassifier() {
  {
    std::lock_guard lk(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

void SerializedClassifier::run() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lk(mu_);
      cv_.wait(lk, [&] { return stopping_ || !requests_.empty(); });
      if (requests_.empty()) return;
      job = std::move(requests_.front());
      requests_.pop_front();
    }
    job();
  }
}

Probabilities SerializedClassifier::infer(const RoiImage& roi) {
  std::packaged_task<Probabilities()> task([&] { return inner_->infer(roi); });
  auto result = task.get_future();
  {
    std::lock_guard lk(mu_);
    if (stopping_) throw std::runtime_error("classifier shutting down");
    requests_.emplace_back([&task] { task(); });
  }
  cv_.notify_one();
  return result.get();
}

std::unique_ptr<ClassifierPlugin> make_concurrent(std::unique_ptr<ClassifierPlugin> plugin) {
  if (plugin->thread_safe()) return plugin;
  return std::make_unique<SerializedClassifier>(std::move(plugin));
}

}  // namespace teleop::threat
