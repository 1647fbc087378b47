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

// Radiance RGBE (.hdr) reader and writer. Pixel conversion and the
// run-length scanline scheme follow Greg Ward's reference encoding
// (shared 8-bit exponent, mantissas truncated, decode as m * 2^(e - 136)).

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oculogen/error.hpp"
#include "oculogen/lighting.hpp"

namespace oculogen {

using Rgbe = std::array<std::uint8_t, 4>;

inline Rgbe float_to_rgbe(float red, float green, float blue) {
  float v = red;
  if (green > v) v = green;
  if (blue > v) v = blue;
  if (v < 1e-32f) return {0, 0, 0, 0};
  int e = 0;
  v = static_cast<float>(std::frexp(v, &e) * 256.0 / v);
  return {static_cast<std::uint8_t>(red * v), static_cast<std::uint8_t>(green * v), static_cast<std::uint8_t>(blue * v),
          static_cast<std::uint8_t>(e + 128)};
}

inline Rgb rgbe_to_float(const Rgbe& p) {
  if (p[3] == 0) return {};
  const float f = static_cast<float>(std::ldexp(1.0, static_cast<int>(p[3]) - (128 + 8)));
  return {p[0] * f, p[1] * f, p[2] * f};
}

namespace detail {

// One channel of one scanline with runs of >= 4 equal bytes.
inline void rle_write_channel(std::string& out, const std::uint8_t* data, int n) {
  constexpr int kMinRun = 4;
  int cur = 0;
  while (cur < n) {
    int beg_run = cur, run_count = 0, old_run_count = 0;
    while (run_count < kMinRun && beg_run < n) {
      beg_run += run_count;
      old_run_count = run_count;
      run_count = 1;
      while (beg_run + run_count < n && run_count < 127 && data[beg_run] == data[beg_run + run_count]) ++run_count;
    }
    if (old_run_count > 1 && old_run_count == beg_run - cur) {
      out.push_back(static_cast<char>(128 + old_run_count));
      out.push_back(static_cast<char>(data[cur]));
      cur = beg_run;
    }
    while (cur < beg_run) {
      int nonrun = beg_run - cur;
      if (nonrun > 128) nonrun = 128;
      out.push_back(static_cast<char>(nonrun));
      out.append(reinterpret_cast<const char*>(data + cur), static_cast<std::size_t>(nonrun));
      cur += nonrun;
    }
    if (run_count >= kMinRun) {
      out.push_back(static_cast<char>(128 + run_count));
      out.push_back(static_cast<char>(data[beg_run]));
      cur += run_count;
    }
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}
  std::uint8_t next() {
    if (pos_ >= bytes_.size()) throw Error(Errc::MalformedHdr, "unexpected end of data");
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::string line() {
    const auto end = bytes_.find('\n', pos_);
    if (end == std::string_view::npos) throw Error(Errc::MalformedHdr, "unterminated header line");
    std::string s(bytes_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return s;
  }
  bool done() const { return pos_ >= bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Serializes the grid (ignoring rotation/intensity metadata) as an RLE
/// Radiance file. Scanlines outside the RLE width range are written flat.
inline std::string encode_hdr(const EnvironmentMap& env) {
  const int w = env.width(), h = env.height();
  std::string out = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " + std::to_string(h) + " +X " + std::to_string(w) + "\n";
  std::vector<Rgbe> line(static_cast<std::size_t>(w));
  std::vector<std::uint8_t> channel(static_cast<std::size_t>(w));
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const Rgb& c = env.texel(i, j);
      line[i] = float_to_rgbe(static_cast<float>(c.x), static_cast<float>(c.y), static_cast<float>(c.z));
    }
    if (w < 8 || w > 0x7fff) {
      for (const auto& p : line) out.append(reinterpret_cast<const char*>(p.data()), 4);
      continue;
    }
    out.push_back(2);
    out.push_back(2);
    out.push_back(static_cast<char>(w >> 8));
    out.push_back(static_cast<char>(w & 0xff));
    for (int c = 0; c < 4; ++c) {
      for (int i = 0; i < w; ++i) channel[i] = line[i][c];
      detail::rle_write_channel(out, channel.data(), w);
    }
  }
  return out;
}

inline EnvironmentMap decode_hdr(std::string_view bytes, std::string id = {}) {
  detail::ByteReader in(bytes);
  const std::string magic = in.line();
  if (magic.rfind("#?RADIANCE", 0) != 0 && magic.rfind("#?RGBE", 0) != 0)
    throw Error(Errc::MalformedHdr, "bad magic '" + magic + "'");
  for (;;) {
    const std::string l = in.line();
    if (l.empty()) break;
    if (l.rfind("FORMAT=", 0) == 0 && l != "FORMAT=32-bit_rle_rgbe")
      throw Error(Errc::MalformedHdr, "unsupported " + l);
  }
  const std::string res = in.line();
  int w = 0, h = 0;
  char ybuf[3] = {}, xbuf[3] = {};
  if (std::sscanf(res.c_str(), "%2s %d %2s %d", ybuf, &h, xbuf, &w) != 4 || std::string_view(ybuf) != "-Y" ||
      std::string_view(xbuf) != "+X" || w <= 0 || h <= 0)
    throw Error(Errc::MalformedHdr, "unsupported resolution line '" + res + "'");

  std::vector<Rgb> px;
  px.reserve(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> scan(static_cast<std::size_t>(w) * 4);
  auto read_flat = [&](std::size_t pixels, const Rgbe* first) {
    for (std::size_t k = 0; k < pixels; ++k) {
      Rgbe p{};
      if (k == 0 && first) {
        p = *first;
      } else {
        for (auto& b : p) b = in.next();
      }
      px.push_back(rgbe_to_float(p));
    }
  };

  for (int j = 0; j < h; ++j) {
    if (w < 8 || w > 0x7fff) {
      read_flat(static_cast<std::size_t>(w), nullptr);
      continue;
    }
    const Rgbe head{in.next(), in.next(), in.next(), in.next()};
    if (head[0] != 2 || head[1] != 2 || (head[2] & 0x80)) {
      // Not run-length encoded: the remainder of the file is flat.
      read_flat(static_cast<std::size_t>(w) * (h - j), &head);
      break;
    }
    if (((head[2] << 8) | head[3]) != w) throw Error(Errc::MalformedHdr, "scanline width mismatch");
    for (int c = 0; c < 4; ++c) {
      int ptr = 0;
      while (ptr < w) {
        int count = in.next();
        if (count > 128) {
          count -= 128;
          if (count == 0 || count > w - ptr) throw Error(Errc::MalformedHdr, "bad run length");
          const std::uint8_t v = in.next();
          for (int k = 0; k < count; ++k) scan[static_cast<std::size_t>(ptr++) * 4 + c] = v;
        } else {
          if (count == 0 || count > w - ptr) throw Error(Errc::MalformedHdr, "bad literal length");
          for (int k = 0; k < count; ++k) scan[static_cast<std::size_t>(ptr++) * 4 + c] = in.next();
        }
      }
    }
    for (int i = 0; i < w; ++i) {
      const auto* p = &scan[static_cast<std::size_t>(i) * 4];
      px.push_back(rgbe_to_float({p[0], p[1], p[2], p[3]}));
    }
  }
  if (px.size() != static_cast<std::size_t>(w) * h) throw Error(Errc::MalformedHdr, "truncated pixel data");
  return EnvironmentMap(w, h, std::move(px), std::move(id));
}

inline void write_hdr(const std::string& path, const EnvironmentMap& env) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path);
  const std::string bytes = encode_hdr(env);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

inline EnvironmentMap load_hdr(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string id = path;
  if (const auto slash = id.find_last_of('/'); slash != std::string::npos) id = id.substr(slash + 1);
  return decode_hdr(bytes, id);
}

}  // namespace oculogen
