#include "teleop/training/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace teleop::training {

namespace {

void check_shapes(const Matrix& x, const std::vector<int>& y) {
  if (x.empty() || x.size() != y.size()) throw InvalidInput("training set is empty or labels do not match samples");
  for (const auto& row : x)
    if (row.size() != x[0].size()) throw InvalidInput("ragged feature matrix");
}

double dot(const double* w, const std::vector<double>& v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

}  // namespace

threat::ReferenceModel fit_softmax(const Matrix& x, const std::vector<int>& y, int classes, const SgdOptions& opt) {
  check_shapes(x, y);
  const std::size_t d = x[0].size();
  threat::ReferenceModel m;
  if (classes != threat::kNumClasses) throw InvalidParameter("reference model has exactly 8 classes");
  for (int label : y)
    if (label < 0 || label >= classes) throw InvalidInput("class label out of range");
  m.descriptor_length = static_cast<int>(d);
  m.weights.assign(classes * d, 0.0);

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opt.seed);
  std::vector<std::vector<double>> gw(classes, std::vector<double>(d));
  std::vector<double> gb(classes), p(classes);
  double lr = opt.learning_rate;

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += opt.batch) {
      const std::size_t end = std::min(order.size(), start + opt.batch);
      for (auto& g : gw) std::fill(g.begin(), g.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& v = x[order[k]];
        double mx = -INFINITY;
        for (int c = 0; c < classes; ++c) {
          p[c] = dot(m.weights.data() + c * d, v) + m.bias[c];
          mx = std::max(mx, p[c]);
        }
        double z = 0;
        for (int c = 0; c < classes; ++c) z += (p[c] = std::exp(p[c] - mx));
        for (int c = 0; c < classes; ++c) {
          const double g = p[c] / z - (c == y[order[k]] ? 1.0 : 0.0);
          gb[c] += g;
          for (std::size_t i = 0; i < d; ++i) gw[c][i] += g * v[i];
        }
      }
      const double n = static_cast<double>(end - start);
      for (int c = 0; c < classes; ++c) {
        double* w = m.weights.data() + c * d;
        for (std::size_t i = 0; i < d; ++i) w[i] -= lr * (gw[c][i] / n + opt.l2 * w[i]);
        m.bias[c] -= lr * gb[c] / n;
      }
    }
    lr *= opt.decay;
  }
  return m;
}

vision::LinearSvmModel fit_linear_svm(const Matrix& x, const std::vector<int>& y, const SgdOptions& opt) {
  check_shapes(x, y);
  const std::size_t d = x[0].size();
  vision::LinearSvmModel m;
  m.weights.assign(d, 0.0);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opt.seed);
  std::vector<double> gw(d);
  double lr = opt.learning_rate;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += opt.batch) {
      const std::size_t end = std::min(order.size(), start + opt.batch);
      std::fill(gw.begin(), gw.end(), 0.0);
      double gb = 0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& v = x[order[k]];
        const double t = y[order[k]] > 0 ? 1.0 : -1.0;
        if (t * (dot(m.weights.data(), v) + m.bias) < 1.0) {
          for (std::size_t i = 0; i < d; ++i) gw[i] -= t * v[i];
          gb -= t;
        }
      }
      const double n = static_cast<double>(end - start);
      for (std::size_t i = 0; i < d; ++i) m.weights[i] -= lr * (gw[i] / n + opt.l2 * m.weights[i]);
      m.bias -= lr * gb / n;
    }
    lr *= opt.decay;
  }
  return m;
}

double softmax_accuracy(const threat::ReferenceModel& model, const Matrix& x, const std::vector<int>& y) {
  check_shapes(x, y);
  std::size_t hit = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto logits = threat::reference_logits(model, x[k]);
    const int arg = static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (arg == y[k]) ++hit;
  }
  return static_cast<double>(hit) / x.size();
}

}  // namespace teleop::training
