#include "teleop/vision/hog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "teleop/vision/text_format.hpp"

namespace teleop::vision {

void HogParams::validate() const {
  if (cell < 1 || bins < 2 || block < 1 || block_stride < 1) throw InvalidParameter("invalid HOG cell/bin/block layout");
  if (window_w < 1 || window_h < 1 || window_w % cell != 0 || window_h % cell != 0)
    throw InvalidParameter("HOG window must be a positive multiple of the cell size");
  if (cells_x() < block || cells_y() < block) throw InvalidParameter("HOG window smaller than one block");
  if ((cells_x() - block) % block_stride != 0 || (cells_y() - block) % block_stride != 0)
    throw InvalidParameter("HOG block stride does not tile the window");
  if (!(clip > 0.0) || !(epsilon > 0.0)) throw InvalidParameter("HOG clip and epsilon must be > 0");
}

namespace {

void l2_hys(std::span<double> v, double clip, double eps) {
  double ss = 0.0;
  for (double x : v) ss += x * x;
  double inv = 1.0 / std::sqrt(ss + eps * eps);
  ss = 0.0;
  for (double& x : v) {
    x = std::min(x * inv, clip);
    ss += x * x;
  }
  inv = 1.0 / std::sqrt(ss + eps * eps);
  for (double& x : v) x *= inv;
}

}  // namespace

HogGrid::HogGrid(const GrayImage& img, const HogParams& params) : params_(params) {
  params.validate();
  const int w = img.width();
  const int h = img.height();
  const int cs = params.cell;
  const int bins = params.bins;
  cells_x_ = w / cs;
  cells_y_ = h / cs;
  cells_.assign(static_cast<std::size_t>(cells_x_) * cells_y_ * bins, 0.0);

  const double bin_width = 180.0 / bins;
  const int used_w = cells_x_ * cs;
  const int used_h = cells_y_ * cs;
  for (int y = 0; y < used_h; ++y) {
    const std::uint8_t* row = img.pixel(0, y);
    const std::uint8_t* up = img.pixel(0, std::max(y - 1, 0));
    const std::uint8_t* down = img.pixel(0, std::min(y + 1, h - 1));
    double* cell_row = cells_.data() + static_cast<std::size_t>(y / cs) * cells_x_ * bins;
    for (int x = 0; x < used_w; ++x) {
      const double gx = static_cast<double>(row[std::min(x + 1, w - 1)]) - row[std::max(x - 1, 0)];
      const double gy = static_cast<double>(down[x]) - up[x];
      if (gx == 0.0 && gy == 0.0) continue;
      const double mag = std::sqrt(gx * gx + gy * gy);
      double angle = std::atan2(gy, gx) * (180.0 / std::numbers::pi);
      if (angle < 0.0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const double pos = angle / bin_width;
      int b0 = static_cast<int>(std::floor(pos));
      const double frac = pos - b0;
      b0 %= bins;
      const int b1 = (b0 + 1) % bins;
      double* hist = cell_row + static_cast<std::size_t>(x / cs) * bins;
      hist[b0] += mag * (1.0 - frac);
      hist[b1] += mag * frac;
    }
  }

  const int bl = params.block;
  bpos_x_ = std::max(cells_x_ - bl + 1, 0);
  bpos_y_ = std::max(cells_y_ - bl + 1, 0);
  const int blen = params.block_length();
  blocks_.assign(static_cast<std::size_t>(bpos_x_) * bpos_y_ * blen, 0.0);
  for (int by = 0; by < bpos_y_; ++by) {
    for (int bx = 0; bx < bpos_x_; ++bx) {
      double* dst = blocks_.data() + (static_cast<std::size_t>(by) * bpos_x_ + bx) * blen;
      double* out = dst;
      for (int cy = 0; cy < bl; ++cy) {
        for (int cx = 0; cx < bl; ++cx) {
          auto hist = cell_histogram(bx + cx, by + cy);
          out = std::copy(hist.begin(), hist.end(), out);
        }
      }
      l2_hys({dst, static_cast<std::size_t>(blen)}, params.clip, params.epsilon);
    }
  }
}

std::span<const double> HogGrid::cell_histogram(int cx, int cy) const {
  return {cells_.data() + (static_cast<std::size_t>(cy) * cells_x_ + cx) * params_.bins,
          static_cast<std::size_t>(params_.bins)};
}

std::span<const double> HogGrid::block(int cx, int cy) const {
  const std::size_t blen = params_.block_length();
  return {blocks_.data() + (static_cast<std::size_t>(cy) * bpos_x_ + cx) * blen, blen};
}

std::vector<double> HogGrid::descriptor_at(int cell_x, int cell_y) const {
  if (cell_x < 0 || cell_y < 0 || cell_x + params_.cells_x() > cells_x_ || cell_y + params_.cells_y() > cells_y_)
    throw BoundsError("HOG window outside grid");
  std::vector<double> d;
  d.reserve(params_.descriptor_length());
  const int s = params_.block_stride;
  for (int by = 0; by < params_.blocks_y(); ++by) {
    for (int bx = 0; bx < params_.blocks_x(); ++bx) {
      auto b = block(cell_x + bx * s, cell_y + by * s);
      d.insert(d.end(), b.begin(), b.end());
    }
  }
  return d;
}

double HogGrid::dot_at(int cell_x, int cell_y, std::span<const double> weights) const {
  if (static_cast<int>(weights.size()) != params_.descriptor_length())
    throw InvalidInput("weight length does not match HOG descriptor length");
  if (cell_x < 0 || cell_y < 0 || cell_x + params_.cells_x() > cells_x_ || cell_y + params_.cells_y() > cells_y_)
    throw BoundsError("HOG window outside grid");
  const int s = params_.block_stride;
  const std::size_t blen = params_.block_length();
  const double* w = weights.data();
  double acc = 0.0;
  for (int by = 0; by < params_.blocks_y(); ++by) {
    for (int bx = 0; bx < params_.blocks_x(); ++bx) {
      auto b = block(cell_x + bx * s, cell_y + by * s);
      for (std::size_t i = 0; i < blen; ++i) acc += w[i] * b[i];
      w += blen;
    }
  }
  return acc;
}

std::vector<double> hog_descriptor(const GrayImage& window, const HogParams& params) {
  params.validate();
  if (window.width() != params.window_w || window.height() != params.window_h)
    throw InvalidInput("HOG window size does not match parameters");
  return HogGrid(window, params).descriptor_at(0, 0);
}

double svm_score(std::span<const double> descriptor, const LinearSvmModel& model) {
  if (descriptor.size() != model.weights.size()) throw InvalidInput("descriptor length does not match SVM weights");
  double acc = model.bias;
  for (std::size_t i = 0; i < descriptor.size(); ++i) acc += model.weights[i] * descriptor[i];
  return acc;
}

LinearSvmModel parse_svm(std::istream& in, const std::string& source) {
  text::LineReader reader(in, source);
  auto header = reader.expect("svm header");
  reader.require(header, 3, "svm");
  if (header[1] != "v1") reader.fail("unsupported svm version '" + header[1] + "'");
  const long long len = reader.to_int(header[2]);
  if (len < 1) reader.fail("svm weight length must be >= 1");

  LinearSvmModel model;
  auto weights = reader.expect("weight record");
  if (static_cast<long long>(weights.size()) != len)
    reader.fail("expected " + std::to_string(len) + " weights, found " + std::to_string(weights.size()));
  model.weights.reserve(len);
  for (const auto& t : weights) model.weights.push_back(reader.to_double(t));

  auto tail = reader.expect("bias/threshold record");
  reader.require(tail, 2);
  model.bias = reader.to_double(tail[0]);
  model.threshold = reader.to_double(tail[1]);
  reader.expect_end();
  return model;
}

LinearSvmModel load_svm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open svm model '" + path + "'");
  return parse_svm(in, path);
}

void write_svm(std::ostream& out, const LinearSvmModel& model) {
  out << "svm v1 " << model.weights.size() << '\n' << std::setprecision(9);
  for (std::size_t i = 0; i < model.weights.size(); ++i) out << (i ? " " : "") << model.weights[i];
  out << '\n' << std::setprecision(17) << model.bias << ' ' << model.threshold << '\n';
}

}  // namespace teleop::vision
