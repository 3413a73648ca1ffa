#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>

#include "teleop/error.hpp"
#include "teleop/threat/labels.hpp"
#include "teleop/threat/roi.hpp"

namespace teleop::threat {

using Probabilities = std::array<double, kNumClasses>;

struct ClassScores {
  Probabilities probabilities{};
  int argmax_label = 0;

  std::string_view label() const { return kLabels[argmax_label]; }
};

/// Validates a probability vector (each in [0,1], sum 1 within 1e-9) and
/// fills in the argmax (first index on ties). Throws InvalidInput otherwise.
ClassScores make_scores(const Probabilities& p);

/// exp(l_i - max l) / sum. Requires exactly 8 finite logits.
ClassScores softmax(std::span<const double> logits);

enum class VerdictColor { kGreen, kRed, kUnknown };

std::string_view to_string(VerdictColor c);

struct ThreatVerdict {
  double threat_probability = 0.0;
  int percent = 0;
  VerdictColor color = VerdictColor::kUnknown;
  std::string label;
};

inline constexpr double kDefaultThreshold = 0.5;

/// threat = 1 - P(no_weapon); RED iff threat >= threshold; percent = round-half-up(100 * threat).
ThreatVerdict verdict(const ClassScores& scores, double threshold = kDefaultThreshold);

/// Verdict for a detection whose classifier call failed.
ThreatVerdict unknown_verdict();

/// Rounds 100 * p half up.
int to_percent(double p);

/// In-process classification backend. `infer` maps a 227x227 ROI to 8 class
/// probabilities in kLabels order and may throw on failure.
class ClassifierPlugin {
 public:
  virtual ~ClassifierPlugin() = default;
  virtual std::string name() const = 0;
  virtual bool thread_safe() const = 0;
  virtual Probabilities infer(const RoiImage& roi) = 0;
};

class ClassifierUnavailable : public Error {
 public:
  using Error::Error;
};

/// Delegates to `plugin` and validates its output. Plugin failures and invalid
/// outputs both surface as ClassifierUnavailable; nothing unvalidated escapes.
ClassScores classify(const RoiImage& roi, ClassifierPlugin& plugin);

/// Returns the same probabilities for every ROI. Text format: `stub v1` then one
/// line of 8 probabilities.
class StubClassifier : public ClassifierPlugin {
 public:
  explicit StubClassifier(Probabilities p, bool fail = false) : p_(p), fail_(fail) {}
  static StubClassifier load(const std::string& path);

  std::string name() const override { return "stub"; }
  bool thread_safe() const override { return true; }
  Probabilities infer(const RoiImage& roi) override;

 private:
  Probabilities p_;
  bool fail_;
};

/// Runs a non-thread-safe plugin on one dedicated consumer thread; callers
/// enqueue requests and block on the result.
class SerializedClassifier : public ClassifierPlugin {
 public:
  explicit SerializedClassifier(std::unique_ptr<ClassifierPlugin> inner);
  ~SerializedClassifier() override;

  std::string name() const override { return inner_->name(); }
  bool thread_safe() const override { return true; }
  Probabilities infer(const RoiImage& roi) override;

 private:
  void run();

  std::unique_ptr<ClassifierPlugin> inner_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> requests_;
  bool stopping_ = false;
  std::thread worker_;
};

/// Wraps `plugin` in a SerializedClassifier unless it is thread-safe.
std::unique_ptr<ClassifierPlugin> make_concurrent(std::unique_ptr<ClassifierPlugin> plugin);

}  // namespace teleop::threat
