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

// Dataset configuration: a flat `dotted.key = value` text format.
//
//   # comment
//   camera.theta_range = [-20, 20]
//   lighting.procedural = ["bright_outdoor", "dark_indoor"]
//   randomize.iris_color = false
//
// Values are numbers, true/false, double-quoted strings, or bracketed lists of
// numbers or strings. Every key is optional; see DatasetSpec for defaults.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "oculogen/error.hpp"
#include "oculogen/eye_texture.hpp"
#include "oculogen/eyeball.hpp"
#include "oculogen/lighting.hpp"
#include "oculogen/staging.hpp"

namespace oculogen {

struct Range {
  double lo = 0;
  double hi = 0;
};

/// Inclusive arithmetic grid lo, lo + inc, ... <= hi.
inline std::vector<double> grid_values(const Range& r, double increment) {
  if (!(increment > 0)) throw Error(Errc::RangeError, "increment must be > 0");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double v = r.lo + static_cast<double>(k) * increment;
    if (v > r.hi + 1e-9 * std::max(1.0, std::abs(r.hi))) break;
    out.push_back(v);
  }
  return out;
}

struct DatasetSpec {
  std::string output_dir = "out";
  std::uint64_t master_seed = 0;
  int identities = 10;

  Range camera_theta{-20, 20};
  Range camera_phi{-20, 20};
  double camera_increment_deg = 10;
  double camera_radius_mm = 100;

  Range gaze_alpha{-45, 45};
  Range gaze_beta{-45, 45};
  double gaze_increment_deg = 10;

  bool constraints_enabled = true;
  PoseConstraints constraints{};
  bool visibility_filter = true;

  int image_width = 120;
  int image_height = 80;
  int spp = 150;
  double mm_per_px = 0.5;
  int max_depth = 8;

  std::vector<std::string> procedural_envs{"bright_outdoor", "cloudy_outdoor", "bright_indoor", "dark_indoor"};
  std::vector<std::string> hdr_paths;
  int lighting_samples_per_pose = 1;
  int env_resolution = 256;

  RandomizationToggles randomize{};
  EyeConfig eye{};

  int subdivisions = 4;
  int texture_resolution = 256;

  std::vector<std::pair<double, double>> camera_grid() const {
    std::vector<std::pair<double, double>> g;
    for (double t : grid_values(camera_theta, camera_increment_deg))
      for (double p : grid_values(camera_phi, camera_increment_deg)) g.emplace_back(t, p);
    return g;
  }
  std::vector<double> alphas() const { return grid_values(gaze_alpha, gaze_increment_deg); }
  std::vector<double> betas() const { return grid_values(gaze_beta, gaze_increment_deg); }
  CameraSettings camera_settings() const { return {camera_radius_mm, image_width, image_height, mm_per_px}; }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(Errc::RangeError, m); };
    auto ordered = [&](const Range& r, const char* name) {
      if (!(r.lo <= r.hi)) fail(std::string(name) + " must satisfy lo <= hi");
    };
    ordered(camera_theta, "camera.theta_range");
    ordered(camera_phi, "camera.phi_range");
    ordered(gaze_alpha, "gaze.alpha_range");
    ordered(gaze_beta, "gaze.beta_range");
    if (!(camera_increment_deg > 0)) fail("camera.increment_deg must be > 0");
    if (!(gaze_increment_deg > 0)) fail("gaze.increment_deg must be > 0");
    if (!(camera_phi.lo > -90 && camera_phi.hi < 90)) fail("camera.phi_range must lie inside (-90, 90)");
    if (!(camera_radius_mm > 0)) fail("camera.radius_mm must be > 0");
    if (identities < 1) fail("dataset.identities must be >= 1");
    if (!(constraints.alpha_max_deg >= 0 && constraints.beta_max_deg >= 0)) fail("constraints must be >= 0");
    if (image_width < 1 || image_height < 1) fail("image dimensions must be >= 1");
    if (spp < 1) fail("image.spp must be >= 1");
    if (!(mm_per_px > 0)) fail("image.mm_per_px must be > 0");
    if (max_depth < 1) fail("image.max_depth must be >= 1");
    if (procedural_envs.empty() && hdr_paths.empty()) fail("at least one lighting source is required");
    for (const auto& k : procedural_envs)
      if (!env_kind_from_string(k)) fail("unknown procedural environment '" + k + "'");
    if (lighting_samples_per_pose < 1) fail("lighting.samples_per_pose must be >= 1");
    if (env_resolution < 8 || env_resolution % 2 != 0) fail("lighting.env_resolution must be even and >= 8");
    if (!(eye.pupil_dilation >= 0 && eye.pupil_dilation <= 1)) fail("eye.pupil_dilation must be in [0, 1]");
    if (!(eye.iris_scale >= kIrisScaleMin && eye.iris_scale <= kIrisScaleMax)) fail("eye.iris_scale must be in [0.95, 1.05]");
    if (!(eye.vein_density >= 0 && eye.vein_density <= 1)) fail("eye.vein_density must be in [0, 1]");
    if (subdivisions < 1 || subdivisions > 8) fail("model.subdivisions must be in [1, 8]");
    if (texture_resolution < 256) fail("model.texture_resolution must be >= 256");
  }

  /// Canonical config text; parsing it yields an identical spec.
  std::string to_config_text() const;
  nlohmann::ordered_json to_json() const;
};

namespace detail {

using ConfigScalar = std::variant<double, bool, std::string>;
struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<ConfigScalar>> v;
  int line = 0;
  int col = 0;
  std::string raw;  ///< source text of a scalar value
};

class ConfigLexer {
 public:
  ConfigLexer(std::string_view text, int line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::ParseError, "line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  int column() const { return static_cast<int>(pos_) + 1; }

  std::string key() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  ConfigScalar scalar() {
    const char c = peek();
    if (c == '"') {
      ++pos_;
      std::string out;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
        out += s_[pos_++];
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      ++pos_;
      return out;
    }
    const auto start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ',' &&
           s_[pos_] != ']' && s_[pos_] != '#')
      ++pos_;
    const std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail("expected a value");
    if (tok == "true") return true;
    if (tok == "false") return false;
    double v = 0;
    std::istringstream is(tok);
    is.imbue(std::locale::classic());
    if (!(is >> v) || !is.eof() || !std::isfinite(v)) {
      pos_ = start;
      fail("invalid value '" + tok + "'");
    }
    return v;
  }

  ConfigValue value() {
    ConfigValue out;
    out.line = line_;
    peek();
    out.col = column();
    if (peek() == '[') {
      ++pos_;
      std::vector<ConfigScalar> items;
      if (peek() == ']') {
        ++pos_;
      } else {
        for (;;) {
          items.push_back(scalar());
          const char c = peek();
          if (c == ',') {
            ++pos_;
            continue;
          }
          if (c == ']') {
            ++pos_;
            break;
          }
          fail("expected ',' or ']'");
        }
      }
      out.v = std::move(items);
    } else {
      const auto start = pos_;
      std::visit([&](auto&& x) { out.v = x; }, scalar());
      out.raw = std::string(s_.substr(start, pos_ - start));
    }
    return out;
  }

 private:
  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

inline std::string where(const ConfigValue& v, const std::string& key) {
  return "line " + std::to_string(v.line) + ", column " + std::to_string(v.col) + " (" + key + ")";
}

inline double as_number(const ConfigValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  throw Error(Errc::ParseError, where(v, key) + ": expected a number");
}

inline int as_int(const ConfigValue& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d) || std::abs(d) > 2e9) throw Error(Errc::ParseError, where(v, key) + ": expected an integer");
  return static_cast<int>(d);
}

inline std::uint64_t as_u64(const ConfigValue& v, const std::string& key) {
  as_number(v, key);
  const auto first = v.raw.find_first_not_of(" \t");
  const std::string digits = first == std::string::npos ? std::string{} : v.raw.substr(first);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw Error(Errc::ParseError, where(v, key) + ": expected a non-negative integer");
  try {
    return std::stoull(digits);
  } catch (const std::out_of_range&) {
    throw Error(Errc::RangeError, where(v, key) + ": integer exceeds 64 bits");
  }
}

inline bool as_bool(const ConfigValue& v, const std::string& key) {
  if (const auto* b = std::get_if<bool>(&v.v)) return *b;
  throw Error(Errc::ParseError, where(v, key) + ": expected true or false");
}

inline std::string as_string(const ConfigValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
  throw Error(Errc::ParseError, where(v, key) + ": expected a string");
}

inline Range as_range(const ConfigValue& v, const std::string& key) {
  const auto* l = std::get_if<std::vector<ConfigScalar>>(&v.v);
  if (!l || l->size() != 2 || !std::holds_alternative<double>((*l)[0]) || !std::holds_alternative<double>((*l)[1]))
    throw Error(Errc::ParseError, where(v, key) + ": expected [lo, hi]");
  return {std::get<double>((*l)[0]), std::get<double>((*l)[1])};
}

inline std::vector<std::string> as_string_list(const ConfigValue& v, const std::string& key) {
  const auto* l = std::get_if<std::vector<ConfigScalar>>(&v.v);
  if (!l) throw Error(Errc::ParseError, where(v, key) + ": expected a list of strings");
  std::vector<std::string> out;
  for (const auto& x : *l) {
    if (!std::holds_alternative<std::string>(x)) throw Error(Errc::ParseError, where(v, key) + ": expected strings");
    out.push_back(std::get<std::string>(x));
  }
  return out;
}

/// Shortest text that parses back to the same double.
inline std::string fmt_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace detail

inline DatasetSpec parse_config(std::string_view text) {
  std::map<std::string, detail::ConfigValue> entries;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    detail::ConfigLexer lx(line, line_no);
    if (!lx.at_end_or_comment()) {
      const int key_col = lx.column();
      std::string key = lx.key();
      lx.expect('=');
      auto value = lx.value();
      if (!lx.at_end_or_comment()) lx.fail("unexpected trailing characters");
      if (entries.count(key))
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ", column " + std::to_string(key_col) +
                                          ": duplicate key '" + key + "'");
      entries.emplace(std::move(key), std::move(value));
    }
    if (end == text.size()) break;
    start = end + 1;
  }

  DatasetSpec s;
  using namespace detail;
  // Keys and their setters; everything not listed is rejected.
  const std::map<std::string, std::function<void(const ConfigValue&, const std::string&)>> setters{
      {"output.dir", [&](auto& v, auto& k) { s.output_dir = as_string(v, k); }},
      {"dataset.master_seed", [&](auto& v, auto& k) { s.master_seed = as_u64(v, k); }},
      {"dataset.identities", [&](auto& v, auto& k) { s.identities = as_int(v, k); }},
      {"camera.theta_range", [&](auto& v, auto& k) { s.camera_theta = as_range(v, k); }},
      {"camera.phi_range", [&](auto& v, auto& k) { s.camera_phi = as_range(v, k); }},
      {"camera.increment_deg", [&](auto& v, auto& k) { s.camera_increment_deg = as_number(v, k); }},
      {"camera.radius_mm", [&](auto& v, auto& k) { s.camera_radius_mm = as_number(v, k); }},
      {"gaze.alpha_range", [&](auto& v, auto& k) { s.gaze_alpha = as_range(v, k); }},
      {"gaze.beta_range", [&](auto& v, auto& k) { s.gaze_beta = as_range(v, k); }},
      {"gaze.increment_deg", [&](auto& v, auto& k) { s.gaze_increment_deg = as_number(v, k); }},
      {"constraints.enabled", [&](auto& v, auto& k) { s.constraints_enabled = as_bool(v, k); }},
      {"constraints.alpha_max_deg", [&](auto& v, auto& k) { s.constraints.alpha_max_deg = as_number(v, k); }},
      {"constraints.beta_max_deg", [&](auto& v, auto& k) { s.constraints.beta_max_deg = as_number(v, k); }},
      {"filters.pupil_visibility", [&](auto& v, auto& k) { s.visibility_filter = as_bool(v, k); }},
      {"image.width", [&](auto& v, auto& k) { s.image_width = as_int(v, k); }},
      {"image.height", [&](auto& v, auto& k) { s.image_height = as_int(v, k); }},
      {"image.spp", [&](auto& v, auto& k) { s.spp = as_int(v, k); }},
      {"image.mm_per_px", [&](auto& v, auto& k) { s.mm_per_px = as_number(v, k); }},
      {"image.max_depth", [&](auto& v, auto& k) { s.max_depth = as_int(v, k); }},
      {"lighting.procedural", [&](auto& v, auto& k) { s.procedural_envs = as_string_list(v, k); }},
      {"lighting.hdr", [&](auto& v, auto& k) { s.hdr_paths = as_string_list(v, k); }},
      {"lighting.samples_per_pose", [&](auto& v, auto& k) { s.lighting_samples_per_pose = as_int(v, k); }},
      {"lighting.env_resolution", [&](auto& v, auto& k) { s.env_resolution = as_int(v, k); }},
      {"randomize.iris_color", [&](auto& v, auto& k) { s.randomize.iris_color = as_bool(v, k); }},
      {"randomize.sclera_tint", [&](auto& v, auto& k) { s.randomize.sclera_tint = as_bool(v, k); }},
      {"randomize.pupil_dilation", [&](auto& v, auto& k) { s.randomize.pupil_dilation = as_bool(v, k); }},
      {"randomize.vein_density", [&](auto& v, auto& k) { s.randomize.vein_density = as_bool(v, k); }},
      {"randomize.iris_scale", [&](auto& v, auto& k) { s.randomize.iris_scale = as_bool(v, k); }},
      {"randomize.env_rotation", [&](auto& v, auto& k) { s.randomize.env_rotation = as_bool(v, k); }},
      {"randomize.env_intensity", [&](auto& v, auto& k) { s.randomize.env_intensity = as_bool(v, k); }},
      {"eye.iris_color",
       [&](auto& v, auto& k) {
         try {
           s.eye.iris_color = iris_color_from_string(as_string(v, k));
         } catch (const Error& e) {
           if (e.code() != Errc::InvalidParams) throw;
           throw Error(Errc::RangeError, where(v, k) + ": " + e.what());
         }
       }},
      {"eye.sclera_tint",
       [&](auto& v, auto& k) {
         try {
           s.eye.sclera_tint = sclera_tint_from_string(as_string(v, k));
         } catch (const Error& e) {
           if (e.code() != Errc::InvalidParams) throw;
           throw Error(Errc::RangeError, where(v, k) + ": " + e.what());
         }
       }},
      {"eye.pupil_dilation", [&](auto& v, auto& k) { s.eye.pupil_dilation = as_number(v, k); }},
      {"eye.iris_scale", [&](auto& v, auto& k) { s.eye.iris_scale = as_number(v, k); }},
      {"eye.vein_density", [&](auto& v, auto& k) { s.eye.vein_density = as_number(v, k); }},
      {"model.subdivisions", [&](auto& v, auto& k) { s.subdivisions = as_int(v, k); }},
      {"model.texture_resolution", [&](auto& v, auto& k) { s.texture_resolution = as_int(v, k); }},
  };
  for (const auto& [key, value] : entries) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(Errc::UnknownKey, where(value, key) + ": unknown key '" + key + "'");
    it->second(value, key);
  }
  s.validate();
  return s;
}

inline DatasetSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string DatasetSpec::to_config_text() const {
  using detail::fmt_number;
  std::ostringstream os;
  auto str = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  auto range = [&](const Range& r) { return "[" + fmt_number(r.lo) + ", " + fmt_number(r.hi) + "]"; };
  auto list = [&](const std::vector<std::string>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + str(v[i]);
    return out + "]";
  };
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "output.dir = " << str(output_dir) << "\n"
     << "dataset.master_seed = " << master_seed << "\n"
     << "dataset.identities = " << identities << "\n"
     << "camera.theta_range = " << range(camera_theta) << "\n"
     << "camera.phi_range = " << range(camera_phi) << "\n"
     << "camera.increment_deg = " << fmt_number(camera_increment_deg) << "\n"
     << "camera.radius_mm = " << fmt_number(camera_radius_mm) << "\n"
     << "gaze.alpha_range = " << range(gaze_alpha) << "\n"
     << "gaze.beta_range = " << range(gaze_beta) << "\n"
     << "gaze.increment_deg = " << fmt_number(gaze_increment_deg) << "\n"
     << "constraints.enabled = " << b(constraints_enabled) << "\n"
     << "constraints.alpha_max_deg = " << fmt_number(constraints.alpha_max_deg) << "\n"
     << "constraints.beta_max_deg = " << fmt_number(constraints.beta_max_deg) << "\n"
     << "filters.pupil_visibility = " << b(visibility_filter) << "\n"
     << "image.width = " << image_width << "\n"
     << "image.height = " << image_height << "\n"
     << "image.spp = " << spp << "\n"
     << "image.mm_per_px = " << fmt_number(mm_per_px) << "\n"
     << "image.max_depth = " << max_depth << "\n"
     << "lighting.procedural = " << list(procedural_envs) << "\n"
     << "lighting.hdr = " << list(hdr_paths) << "\n"
     << "lighting.samples_per_pose = " << lighting_samples_per_pose << "\n"
     << "lighting.env_resolution = " << env_resolution << "\n"
     << "randomize.iris_color = " << b(randomize.iris_color) << "\n"
     << "randomize.sclera_tint = " << b(randomize.sclera_tint) << "\n"
     << "randomize.pupil_dilation = " << b(randomize.pupil_dilation) << "\n"
     << "randomize.vein_density = " << b(randomize.vein_density) << "\n"
     << "randomize.iris_scale = " << b(randomize.iris_scale) << "\n"
     << "randomize.env_rotation = " << b(randomize.env_rotation) << "\n"
     << "randomize.env_intensity = " << b(randomize.env_intensity) << "\n"
     << "eye.iris_color = " << str(std::string(to_string(eye.iris_color))) << "\n"
     << "eye.sclera_tint = " << str(std::string(to_string(eye.sclera_tint))) << "\n"
     << "eye.pupil_dilation = " << fmt_number(eye.pupil_dilation) << "\n"
     << "eye.iris_scale = " << fmt_number(eye.iris_scale) << "\n"
     << "eye.vein_density = " << fmt_number(eye.vein_density) << "\n"
     << "model.subdivisions = " << subdivisions << "\n"
     << "model.texture_resolution = " << texture_resolution << "\n";
  return os.str();
}

inline nlohmann::ordered_json DatasetSpec::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  std::istringstream in(to_config_text());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

}  // namespace oculogen
