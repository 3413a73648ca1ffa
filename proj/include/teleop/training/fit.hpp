#pragma once

#include <cstdint>
#include <vector>

#include "teleop/threat/reference_classifier.hpp"
#include "teleop/vision/hog.hpp"

namespace teleop::training {

using Matrix = std::vector<std::vector<double>>;

struct SgdOptions {
  int epochs = 30;
  double learning_rate = 0.05;
  double decay = 0.9;  // learning-rate multiplier per epoch
  double l2 = 1e-4;
  std::size_t batch = 32;
  std::uint64_t seed = 1;
};

/// Multinomial logistic regression by minibatch SGD on cross-entropy.
threat::ReferenceModel fit_softmax(const Matrix& x, const std::vector<int>& y, int classes, const SgdOptions& opt);

/// Linear SVM on labels +1/-1, minibatch subgradient descent on the L2-regularised hinge loss.
vision::LinearSvmModel fit_linear_svm(const Matrix& x, const std::vector<int>& y, const SgdOptions& opt);

/// Top-1 accuracy of `model` on (x, y).
double softmax_accuracy(const threat::ReferenceModel& model, const Matrix& x, const std::vector<int>& y);

}  // namespace teleop::training
