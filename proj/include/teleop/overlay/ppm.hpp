#pragma once

#include <iosfwd>
#include <string>

#include "teleop/vision/image.hpp"

namespace teleop::overlay {

// Binary netpbm: P6 for RGB, P5 for gray, maxval 255.
void write_ppm(std::ostream& out, const vision::RgbImage& img);
void write_ppm(const std::string& path, const vision::RgbImage& img);
void write_pgm(const std::string& path, const vision::GrayImage& img);
vision::RgbImage read_ppm(std::istream& in);
vision::RgbImage read_ppm(const std::string& path);

}  // namespace teleop::overlay
