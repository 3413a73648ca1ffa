#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "teleop/vision/image.hpp"

namespace teleop::vision {

/// Dalal-Triggs style descriptor layout. Orientation bins are unsigned over
/// [0, 180) degrees, bin b centered at b * 180 / bins.
struct HogParams {
  int cell = 8;
  int bins = 9;
  int block = 2;         // cells per block side
  int block_stride = 1;  // cells
  double clip = 0.2;
  double epsilon = 1e-5;
  int window_w = 64;
  int window_h = 128;

  int cells_x() const { return window_w / cell; }
  int cells_y() const { return window_h / cell; }
  int blocks_x() const { return (cells_x() - block) / block_stride + 1; }
  int blocks_y() const { return (cells_y() - block) / block_stride + 1; }
  int block_length() const { return block * block * bins; }
  int descriptor_length() const { return blocks_x() * blocks_y() * block_length(); }

  void validate() const;
};

/// Dense HOG over a whole image: per-cell orientation histograms and L2-Hys
/// normalized blocks at every block position. Windows whose origin is
/// cell-aligned read their descriptor straight out of the grid. Gradients use
/// centered differences with clamp-to-edge at the image border.
class HogGrid {
 public:
  HogGrid(const GrayImage& img, const HogParams& params);

  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  int block_positions_x() const { return bpos_x_; }
  int block_positions_y() const { return bpos_y_; }

  /// Normalized block starting at cell (cx, cy).
  std::span<const double> block(int cx, int cy) const;
  /// Histogram of cell (cx, cy).
  std::span<const double> cell_histogram(int cx, int cy) const;

  /// Descriptor of the window whose top-left cell is (cell_x, cell_y).
  std::vector<double> descriptor_at(int cell_x, int cell_y) const;
  /// dot(weights, descriptor_at(cell_x, cell_y)) without materializing the descriptor.
  double dot_at(int cell_x, int cell_y, std::span<const double> weights) const;

 private:
  HogParams params_;
  int cells_x_ = 0;
  int cells_y_ = 0;
  int bpos_x_ = 0;
  int bpos_y_ = 0;
  std::vector<double> cells_;   // cells_y * cells_x * bins
  std::vector<double> blocks_;  // bpos_y * bpos_x * block_length
};

/// HOG descriptor of a window exactly params.window_w x params.window_h.
/// Length = blocks_x * blocks_y * block^2 * bins (3780 for the defaults).
std::vector<double> hog_descriptor(const GrayImage& window, const HogParams& params);

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  double threshold = 0.0;
};

/// dot(weights, descriptor) + bias. Throws InvalidInput on a length mismatch.
double svm_score(std::span<const double> descriptor, const LinearSvmModel& model);
inline bool svm_positive(double score, const LinearSvmModel& model) { return score > model.threshold; }

// Text format:
//   svm v1 <len>
//   <w_0> ... <w_len-1>
//   <bias> <threshold>
LinearSvmModel parse_svm(std::istream& in, const std::string& source = "<svm>");
LinearSvmModel load_svm(const std::string& path);
void write_svm(std::ostream& out, const LinearSvmModel& model);

}  // namespace teleop::vision
