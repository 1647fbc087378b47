// Copyright 2026 The Oculogen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Linear RGB images, sRGB export to 8-bit PNG (libpng), and a raw float dump.
//
// Float dump layout (little-endian):
//   bytes 0..7   magic "OCLGFLT1"
//   bytes 8..11  width  (uint32)
//   bytes 12..15 height (uint32)
//   then width*height*3 float32 values, row-major, top row first, RGB.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/geom.hpp"

namespace oculogen {

using Rgb = Vec3;

struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  ///< row-major, top row first

  Image() = default;
  Image(int w, int h, Rgb fill = {}) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  Rgb mean() const {
    Rgb s;
    for (const auto& p : pixels) s += p;
    return pixels.empty() ? s : s / static_cast<double>(pixels.size());
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// 8-bit grayscale or RGB raster as stored in a PNG.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  friend bool operator==(const Image8&, const Image8&) = default;
};

/// Standard piecewise sRGB transfer of a linear value clamped to [0, 1].
inline double linear_to_srgb(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

inline double srgb_to_linear(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

inline std::uint8_t linear_to_srgb8(double v) {
  if (!std::isfinite(v)) v = 0.0;
  return static_cast<std::uint8_t>(std::lround(linear_to_srgb(v) * 255.0));
}

inline Image8 to_srgb8(const Image& img) {
  Image8 out{img.width, img.height, 3, std::vector<std::uint8_t>(img.pixels.size() * 3)};
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.data[3 * i + 0] = linear_to_srgb8(img.pixels[i].x);
    out.data[3 * i + 1] = linear_to_srgb8(img.pixels[i].y);
    out.data[3 * i + 2] = linear_to_srgb8(img.pixels[i].z);
  }
  return out;
}

inline void write_png(const std::string& path, const Image8& img) {
  if (img.channels != 1 && img.channels != 3) throw Error(Errc::InvalidParams, "PNG export supports 1 or 3 channels");
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width);
  desc.height = static_cast<png_uint_32>(img.height);
  desc.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&desc, path.c_str(), 0, img.data.data(), 0, nullptr)) {
    const std::string msg = desc.message;
    png_image_free(&desc);
    throw Error(Errc::IoError, "cannot write " + path + ": " + msg);
  }
}

/// Reads any PNG, converted to 8-bit RGB (channels = 3) or gray (channels = 1).
inline Image8 read_png(const std::string& path, int channels = 3) {
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&desc, path.c_str()))
    throw Error(Errc::IoError, "cannot read " + path + ": " + desc.message);
  desc.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  Image8 out{static_cast<int>(desc.width), static_cast<int>(desc.height), channels == 1 ? 1 : 3, {}};
  out.data.resize(PNG_IMAGE_SIZE(desc));
  if (!png_image_finish_read(&desc, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = desc.message;
    png_image_free(&desc);
    throw Error(Errc::IoError, "cannot decode " + path + ": " + msg);
  }
  return out;
}

/// Linear to sRGB, clamp, 8-bit PNG.
inline void tone_map_export(const Image& img, const std::string& path) { write_png(path, to_srgb8(img)); }

inline constexpr char kFloatDumpMagic[8] = {'O', 'C', 'L', 'G', 'F', 'L', 'T', '1'};

inline void write_float_dump(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path);
  out.write(kFloatDumpMagic, 8);
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(img.width), static_cast<std::uint32_t>(img.height)};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  std::vector<float> buf;
  buf.reserve(img.pixels.size() * 3);
  for (const auto& p : img.pixels) {
    buf.push_back(static_cast<float>(p.x));
    buf.push_back(static_cast<float>(p.y));
    buf.push_back(static_cast<float>(p.z));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

inline Image read_float_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  char magic[8];
  std::uint32_t dims[2];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!in || std::memcmp(magic, kFloatDumpMagic, 8) != 0) throw Error(Errc::IoError, "not a float dump: " + path);
  Image img(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
  std::vector<float> buf(img.pixels.size() * 3);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw Error(Errc::IoError, "truncated float dump: " + path);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = {buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  return img;
}

}  // namespace oculogen
