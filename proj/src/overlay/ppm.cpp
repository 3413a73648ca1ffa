#include "teleop/overlay/ppm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

namespace teleop::overlay {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string token(std::istream& in) {
  std::string t;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!t.empty()) break;
      continue;
    }
    t.push_back(static_cast<char>(c));
  }
  return t;
}

}  // namespace

void write_ppm(std::ostream& out, const vision::RgbImage& img) {
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.data().size()));
}

void write_ppm(const std::string& path, const vision::RgbImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  write_ppm(out, img);
}

void write_pgm(const std::string& path, const vision::GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data().data()), static_cast<std::streamsize>(img.data().size()));
}

vision::RgbImage read_ppm(std::istream& in) {
  if (token(in) != "P6") throw InvalidInput("not a binary PPM (P6)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(token(in));
    h = std::stoi(token(in));
    maxval = std::stoi(token(in));
  } catch (const std::exception&) {
    throw InvalidInput("malformed PPM header");
  }
  if (w < 1 || h < 1 || w > 16384 || h > 16384 || maxval != 255) throw InvalidInput("unsupported PPM geometry");
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * 3);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) throw InvalidInput("truncated PPM raster");
  return vision::RgbImage(w, h, std::move(data));
}

vision::RgbImage read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_ppm(in);
}

}  // namespace teleop::overlay
