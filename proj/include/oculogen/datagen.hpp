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

// Batch dataset generation: identities, pose enumeration, per-image scene
// assembly, parallel rendering, labels and manifest, plus contact-sheet
// previews and distribution statistics.
//
// Output layout: <out>/imgs/NNNNNN.png, <out>/labels/NNNNNN.json,
// <out>/manifest.json, where NNNNNN is the job's enumeration index.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "oculogen/annotate.hpp"
#include "oculogen/config.hpp"
#include "oculogen/error.hpp"
#include "oculogen/eyeball.hpp"
#include "oculogen/eyeregion.hpp"
#include "oculogen/field.hpp"
#include "oculogen/image.hpp"
#include "oculogen/lighting.hpp"
#include "oculogen/random.hpp"
#include "oculogen/rgbe.hpp"
#include "oculogen/staging.hpp"
#include "oculogen/tracer.hpp"

namespace oculogen {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Procedural stand-in for one scanned head.
struct Identity {
  EyeRegionModel region;
  ScalarField2D sclera_bumps;
  std::uint64_t seed = 0;
};

inline EyeRegionParams identity_params(std::uint64_t master_seed, int identity) {
  Rng rng(hash_seed({master_seed, 0x1D, static_cast<std::uint64_t>(identity)}));
  EyeRegionParams p;
  p.fissure_width = rng.uniform(18.5, 21.5);
  p.fissure_height = rng.uniform(8.5, 10.5);
  const double tone = rng.uniform();
  p.skin_albedo = lerp(Vec3{0.74, 0.55, 0.45}, Vec3{0.34, 0.21, 0.15}, tone);
  p.wrinkle_amplitude = rng.uniform(0.08, 0.2);
  p.lash_length = rng.uniform(5.5, 8.0);
  p.lash_count = 30 + static_cast<int>(rng.index(16));
  p.seed = rng.next_u64();
  return p;
}

inline Identity make_identity(std::uint64_t master_seed, int identity) {
  const EyeRegionParams p = identity_params(master_seed, identity);
  return {build_eye_region(p), sclera_bump_field(hash_seed({p.seed, 0xB0})), p.seed};
}

/// Lighting environments keyed by id ("procedural:<kind>" or "hdr:<file>").
struct LightingPool {
  std::vector<std::string> ids;
  std::vector<std::shared_ptr<const EnvironmentMap>> maps;

  const EnvironmentMap& get(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == id) return *maps[i];
    throw Error(Errc::InvalidParams, "unknown environment '" + id + "'");
  }
};

inline LightingPool make_lighting_pool(const DatasetSpec& spec) {
  LightingPool pool;
  for (const auto& name : spec.procedural_envs) {
    const auto kind = env_kind_from_string(name);
    if (!kind) throw Error(Errc::RangeError, "unknown procedural environment '" + name + "'");
    const std::string id = "procedural:" + name;
    auto env = generate_procedural_env(*kind, hash_seed({spec.master_seed, 0xE7, static_cast<std::uint64_t>(*kind)}),
                                       spec.env_resolution);
    pool.ids.push_back(id);
    pool.maps.push_back(std::make_shared<const EnvironmentMap>(env.with_id(id)));
  }
  for (const auto& path : spec.hdr_paths) {
    const std::string id = "hdr:" + std::filesystem::path(path).filename().string();
    pool.ids.push_back(id);
    pool.maps.push_back(std::make_shared<const EnvironmentMap>(load_hdr(path).with_id(id)));
  }
  return pool;
}

/// One point of the (identity x camera x gaze x lighting sample) product.
struct ImageJob {
  std::size_t index = 0;
  int identity = 0;
  int camera_index = 0;
  int gaze_index = 0;
  double theta_deg = 0, phi_deg = 0;
  double alpha_deg = 0, beta_deg = 0;
  int lighting_sample = 0;
  std::uint64_t seed = 0;
};

namespace detail {
inline std::uint64_t angle_key(double deg) {
  // Micro-degree quantization; also folds -0 onto 0.
  return static_cast<std::uint64_t>(std::llround(deg * 1e6));
}
}  // namespace detail

/// Per-image seed from the master seed, identity, pose and lighting sample.
/// Keyed by pose angles rather than grid positions, so the same pose gets the
/// same seed in any grid that contains it.
inline std::uint64_t image_seed(std::uint64_t master, int identity, double theta, double phi, double alpha,
                                double beta, int lighting_sample) {
  return hash_seed({master, static_cast<std::uint64_t>(identity), detail::angle_key(theta), detail::angle_key(phi),
                    detail::angle_key(alpha), detail::angle_key(beta), static_cast<std::uint64_t>(lighting_sample)});
}

inline std::vector<ImageJob> enumerate_jobs(const DatasetSpec& spec) {
  const auto cams = spec.camera_grid();
  const auto alphas = spec.alphas();
  const auto betas = spec.betas();
  std::vector<ImageJob> jobs;
  for (int id = 0; id < spec.identities; ++id)
    for (std::size_t c = 0; c < cams.size(); ++c) {
      int g = 0;
      for (double a : alphas)
        for (double b : betas) {
          for (int l = 0; l < spec.lighting_samples_per_pose; ++l) {
            ImageJob j;
            j.index = jobs.size();
            j.identity = id;
            j.camera_index = static_cast<int>(c);
            j.gaze_index = g;
            j.theta_deg = cams[c].first;
            j.phi_deg = cams[c].second;
            j.alpha_deg = a;
            j.beta_deg = b;
            j.lighting_sample = l;
            j.seed = image_seed(spec.master_seed, id, j.theta_deg, j.phi_deg, a, b, l);
            jobs.push_back(j);
          }
          ++g;
        }
    }
  if (jobs.empty()) throw Error(Errc::EmptyEnumeration, "the spec enumerates no poses");
  return jobs;
}

/// Camera-facing ribbons for lash strands.
inline TriMesh lash_ribbons(const std::vector<LashStrand>& strands, const Vec3& view_dir) {
  TriMesh m;
  for (const auto& s : strands) {
    for (std::size_t k = 0; k + 1 < s.points.size(); ++k) {
      const Vec3 a = s.points[k], b = s.points[k + 1];
      const Vec3 seg = b - a;
      Vec3 side = cross(seg, view_dir);
      if (length(side) < 1e-9 * length(seg)) side = cross(seg, Vec3{0, 1, 0});
      if (length(side) < 1e-12) continue;
      // Tapered toward the tip.
      const double w0 = 0.5 * s.thickness * (1.0 - 0.6 * k / (s.points.size() - 1.0));
      const double w1 = 0.5 * s.thickness * (1.0 - 0.6 * (k + 1) / (s.points.size() - 1.0));
      side = normalize(side);
      const Vec3 n = normalize(cross(side, seg));
      const auto base = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.insert(m.vertices.end(), {a - w0 * side, a + w0 * side, b - w1 * side, b + w1 * side});
      m.normals.insert(m.normals.end(), {n, n, n, n});
      m.uvs.insert(m.uvs.end(), {Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}, Vec2{1, 1}});
      m.faces.push_back({base, base + 1, base + 2});
      m.faces.push_back({base + 1, base + 3, base + 2});
    }
  }
  return m;
}

/// Everything computed for one job before rendering.
struct PreparedImage {
  SceneConfig config;
  bool constraint_ok = true;
  bool visible = true;
  std::optional<LandmarkSet> landmarks;
  std::optional<LabelRecord> label;
  std::shared_ptr<Scene> scene;
};

class GenerationContext {
 public:
  explicit GenerationContext(DatasetSpec spec) : spec_(std::move(spec)), pool_(make_lighting_pool(spec_)) {
    spec_.validate();
    identities_.resize(static_cast<std::size_t>(spec_.identities));
  }

  const DatasetSpec& spec() const noexcept { return spec_; }
  const LightingPool& lighting() const noexcept { return pool_; }

  const Identity& identity(int i) {
    std::lock_guard lock(mu_);
    auto& slot = identities_.at(static_cast<std::size_t>(i));
    if (!slot) slot = std::make_shared<const Identity>(make_identity(spec_.master_seed, i));
    return *slot;
  }

  /// Samples randomness, poses the models, computes labels and filters and,
  /// when `build_scene` is set and the filters pass, assembles the scene.
  PreparedImage prepare(const ImageJob& job, bool build_scene = true, bool ignore_filters = false) {
    const auto& s = spec_;
    PreparedImage out;
    const CameraPose cam = place_camera(job.theta_deg, job.phi_deg, s.camera_radius_mm, s.image_width, s.image_height,
                                        s.mm_per_px);
    SceneConfig base;
    base.camera = cam;
    base.gaze = {job.alpha_deg, job.beta_deg, gaze_direction(cam, job.alpha_deg, job.beta_deg)};
    base.eye = s.eye;
    base.camera_index = job.camera_index;
    base.gaze_index = job.gaze_index;
    Rng rng(job.seed);
    out.config = sample_scene_randomness(base, rng, pool_.ids, s.randomize);
    out.config.seed = job.seed;

    const EyeRotation rot = out.config.eye_rotation();
    out.constraint_ok = !s.constraints_enabled || validate_pose(rot, s.constraints);
    if (!out.constraint_ok && !ignore_filters) return out;

    const Identity& ident = identity(job.identity);
    EyeballParams ep;
    ep.iris_color = out.config.eye.iris_color;
    ep.sclera_tint = out.config.eye.sclera_tint;
    ep.vein_density = out.config.eye.vein_density;
    ep.pupil_dilation = out.config.eye.pupil_dilation;
    ep.iris_scale = out.config.eye.iris_scale;
    const EyeballModel eyeball = build_eyeball(ep, s.subdivisions, s.texture_resolution, hash_seed({job.seed, 0x7E}));
    const PosedEyeball posed = pose_eyeball(eyeball, eyeball_orientation(rot), ep.pupil_dilation, ep.iris_scale,
                                            &ident.sclera_bumps);
    const PosedEyeRegion lids = pose_eye_region(ident.region, eyelid_weight_for(posed), posed.outer);
    out.landmarks = collect_landmarks_3d(eyeball, posed, ident.region, lids);
    LabelRecord label = make_label_record(out.config, *out.landmarks, image_name(job));
    label.identity = job.identity;
    label.pose_valid = validate_pose(rot, s.constraints);
    out.visible = label.pupil_visible;
    out.label = std::move(label);
    if (!build_scene || (!ignore_filters && s.visibility_filter && !out.visible)) return out;

    const auto& lt = out.config.lighting;
    auto scene = std::make_shared<Scene>(pool_.get(lt.env_id).rotated(lt.rotation_deg).scaled(lt.intensity));
    const auto cornea = scene->add_material(Dielectric{kCorneaIor});
    const auto interior = scene->add_material(TexturedDiffuse{eyeball.texture, {0.8, 0.8, 0.8}});
    const auto skin = scene->add_material(Skin{ident.region.params.skin_albedo, 0.35, 0.05, 40.0});
    const auto lash = scene->add_material(LashFiber{});
    scene->add_mesh(posed.outer, cornea);
    scene->add_mesh(posed.inner, interior);
    scene->add_mesh(lids.face, skin);
    std::vector<LashStrand> strands = lids.upper_lashes;
    strands.insert(strands.end(), lids.lower_lashes.begin(), lids.lower_lashes.end());
    const TriMesh ribbons = lash_ribbons(strands, cam.forward());
    if (!ribbons.faces.empty()) scene->add_mesh(ribbons, lash);
    scene->commit();
    out.scene = std::move(scene);
    return out;
  }

  RenderSettings render_settings(const ImageJob& job) const {
    RenderSettings r;
    r.image_width = spec_.image_width;
    r.image_height = spec_.image_height;
    r.samples_per_pixel = spec_.spp;
    r.max_depth = spec_.max_depth;
    r.seed = hash_seed({job.seed, 0x3E});
    return r;
  }

  static std::string image_name(const ImageJob& job) {
    std::ostringstream os;
    os << std::setw(6) << std::setfill('0') << job.index << ".png";
    return os.str();
  }
  static std::string label_name(const ImageJob& job) {
    std::ostringstream os;
    os << std::setw(6) << std::setfill('0') << job.index << ".json";
    return os.str();
  }

 private:
  DatasetSpec spec_;
  LightingPool pool_;
  std::mutex mu_;
  std::vector<std::shared_ptr<const Identity>> identities_;
};

/// Renders one prepared job to an sRGB raster.
inline Image8 render_prepared(const PreparedImage& p, const RenderSettings& rs, std::uint64_t* nonfinite = nullptr) {
  RenderReport rep;
  const Image img = render(*p.scene, p.config.camera, rs, 1, nonfinite ? &rep : nullptr);
  if (nonfinite) *nonfinite = rep.nonfinite_samples;
  return to_srgb8(img);
}

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

/// Runs fn(0..n-1) on `jobs` workers. The first exception stops the
/// remaining work and is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(resolve_jobs(jobs)), n));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

enum class JobOutcome { emitted, skipped_constraint, skipped_visibility, failed };

inline std::string_view to_string(JobOutcome o) {
  switch (o) {
    case JobOutcome::emitted: return "emitted";
    case JobOutcome::skipped_constraint: return "skipped_constraint";
    case JobOutcome::skipped_visibility: return "skipped_visibility";
    case JobOutcome::failed: return "failed";
  }
  return "?";
}

struct GenerateOptions {
  int jobs = 1;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct DatasetManifest {
  nlohmann::ordered_json json;
  std::size_t enumerated = 0, emitted = 0, skipped_constraint = 0, skipped_visibility = 0, failed = 0;
};

/// Renders the whole dataset into spec.output_dir. Per-image failures are
/// recorded in the manifest; I/O errors on the output tree are fatal.
inline DatasetManifest generate(const DatasetSpec& spec, const GenerateOptions& opt = {}) {
  namespace fs = std::filesystem;
  GenerationContext ctx(spec);
  const auto jobs = enumerate_jobs(spec);
  const fs::path root(spec.output_dir);
  std::error_code ec;
  fs::create_directories(root / "imgs", ec);
  fs::create_directories(root / "labels", ec);
  if (!fs::is_directory(root / "imgs") || !fs::is_directory(root / "labels"))
    throw Error(Errc::IoError, "cannot create output directories under " + root.string());
  const std::string started = iso_timestamp();

  struct Result {
    JobOutcome outcome = JobOutcome::failed;
    std::string reason;
    std::uint64_t nonfinite = 0;
  };
  std::vector<Result> results(jobs.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  detail::parallel_for(jobs.size(), opt.jobs, [&](std::size_t i) {
    const ImageJob& job = jobs[i];
    Result& r = results[i];
    try {
      PreparedImage p = ctx.prepare(job);
      if (!p.constraint_ok) {
        r.outcome = JobOutcome::skipped_constraint;
        r.reason = "eyeball rotation outside the anatomical limits";
      } else if (!p.scene) {
        r.outcome = JobOutcome::skipped_visibility;
        r.reason = "pupil center not inside the projected eyelid contour";
      } else {
        const Image8 img = render_prepared(p, ctx.render_settings(job), &r.nonfinite);
        write_png((root / "imgs" / GenerationContext::image_name(job)).string(), img);
        detail::write_text_file(root / "labels" / GenerationContext::label_name(job), p.label->serialize());
        r.outcome = JobOutcome::emitted;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::IoError) throw;
      r.outcome = JobOutcome::failed;
      r.reason = e.what();
    }
    const std::size_t d = ++done;
    if (opt.progress) {
      std::lock_guard lock(progress_mu);
      opt.progress(d, jobs.size());
    }
  });

  DatasetManifest m;
  using nlohmann::ordered_json;
  ordered_json entries = ordered_json::array(), skipped = ordered_json::array();
  auto pose = [](const ImageJob& j) {
    return ordered_json{{"identity", j.identity},
                        {"camera", {{"theta_deg", j.theta_deg}, {"phi_deg", j.phi_deg}}},
                        {"gaze", {{"alpha_deg", j.alpha_deg}, {"beta_deg", j.beta_deg}}},
                        {"lighting_sample", j.lighting_sample}};
  };
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    const auto& r = results[i];
    ordered_json e{{"index", j.index}, {"seed", j.seed}};
    e.update(pose(j));
    switch (r.outcome) {
      case JobOutcome::emitted:
        ++m.emitted;
        e["image"] = "imgs/" + GenerationContext::image_name(j);
        e["label"] = "labels/" + GenerationContext::label_name(j);
        e["filters"] = {{"constraint", "pass"}, {"visibility", "pass"}};
        e["nonfinite_samples"] = r.nonfinite;
        entries.push_back(std::move(e));
        continue;
      case JobOutcome::skipped_constraint: ++m.skipped_constraint; break;
      case JobOutcome::skipped_visibility: ++m.skipped_visibility; break;
      case JobOutcome::failed: ++m.failed; break;
    }
    e["outcome"] = std::string(to_string(r.outcome));
    e["reason"] = r.reason;
    skipped.push_back(std::move(e));
  }
  m.enumerated = jobs.size();
  m.json["artifact_version"] = kArtifactVersion;
  m.json["generated_at"] = {{"started", started}, {"finished", iso_timestamp()}};
  m.json["spec"] = spec.to_json();
  m.json["config_text"] = spec.to_config_text();
  m.json["counts"] = {{"enumerated", m.enumerated},
                      {"emitted", m.emitted},
                      {"skipped_constraint", m.skipped_constraint},
                      {"skipped_visibility", m.skipped_visibility},
                      {"failed", m.failed}};
  m.json["entries"] = std::move(entries);
  m.json["skipped"] = std::move(skipped);
  detail::write_text_file(root / "manifest.json", m.json.dump(2) + "\n");
  return m;
}

inline nlohmann::json load_manifest(const std::filesystem::path& dataset_dir) {
  const auto path = dataset_dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, "malformed manifest: " + std::string(e.what()));
  }
}

inline LabelRecord load_label(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return LabelRecord::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, "malformed label " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Preview contact sheets

struct PreviewResult {
  Image8 sheet;
  int rows = 0, cols = 0;
  int tiles_rendered = 0;
};

inline constexpr int kPreviewGutter = 2;
inline constexpr std::uint8_t kPreviewGutterValue = 32;

/// Values spread evenly over [r.lo, r.hi]; a single value sits at the center.
inline std::vector<double> spread(const Range& r, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? 0.5 * (r.lo + r.hi) : r.lo + (r.hi - r.lo) * i / (n - 1.0);
  return v;
}

/// Gaze grid at the most frontal camera of the spec, identity 0, lighting
/// sample 0. Rows run from the highest alpha down, columns from the lowest
/// beta. Tiles violating enabled constraints stay gutter-colored. Sheet size
/// is cols * W + (cols - 1) * gutter by rows * H + (rows - 1) * gutter.
inline PreviewResult preview(const DatasetSpec& spec, int rows, int cols, int spp = 16, int jobs = 1) {
  if (rows < 1 || cols < 1) throw Error(Errc::RangeError, "preview grid must be at least 1x1");
  DatasetSpec s = spec;
  s.spp = spp;
  GenerationContext ctx(s);
  const auto cams = s.camera_grid();
  const auto frontal = *std::min_element(cams.begin(), cams.end(), [](const auto& a, const auto& b) {
    return std::hypot(a.first, a.second) < std::hypot(b.first, b.second);
  });
  const auto alphas = spread(s.gaze_alpha, rows);
  const auto betas = spread(s.gaze_beta, cols);
  const int W = s.image_width, H = s.image_height, g = kPreviewGutter;
  PreviewResult res;
  res.rows = rows;
  res.cols = cols;
  res.sheet = Image8{cols * W + (cols - 1) * g, rows * H + (rows - 1) * g, 3, {}};
  res.sheet.data.assign(static_cast<std::size_t>(res.sheet.width) * res.sheet.height * 3, kPreviewGutterValue);

  std::vector<std::optional<Image8>> tiles(static_cast<std::size_t>(rows * cols));
  detail::parallel_for(tiles.size(), jobs, [&](std::size_t t) {
    const int r = static_cast<int>(t) / cols, c = static_cast<int>(t) % cols;
    ImageJob job;
    job.theta_deg = frontal.first;
    job.phi_deg = frontal.second;
    job.alpha_deg = alphas[rows - 1 - r];
    job.beta_deg = betas[c];
    job.seed = image_seed(s.master_seed, 0, job.theta_deg, job.phi_deg, job.alpha_deg, job.beta_deg, 0);
    PreparedImage p = ctx.prepare(job, true, true);
    if (!p.constraint_ok) return;
    tiles[t] = render_prepared(p, ctx.render_settings(job));
  });
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    if (!tiles[t]) continue;
    ++res.tiles_rendered;
    const int r = static_cast<int>(t) / cols, c = static_cast<int>(t) % cols;
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int ch = 0; ch < 3; ++ch) {
          const std::size_t dst =
              ((static_cast<std::size_t>(r) * (H + g) + y) * res.sheet.width + static_cast<std::size_t>(c) * (W + g) + x) * 3 + ch;
          res.sheet.data[dst] = tiles[t]->at(x, y, ch);
        }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Distribution statistics

struct Histogram2D {
  std::string row_name, col_name;
  std::vector<double> row_values;  ///< bin centers, descending
  std::vector<double> col_values;  ///< bin centers, ascending
  std::vector<std::size_t> counts; ///< row-major

  std::size_t at(std::size_t r, std::size_t c) const { return counts[r * col_values.size() + c]; }
  std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

  std::string to_text() const {
    std::ostringstream os;
    os << row_name << " \\ " << col_name;
    for (double c : col_values) os << '\t' << c;
    os << '\n';
    for (std::size_t r = 0; r < row_values.size(); ++r) {
      os << row_values[r];
      for (std::size_t c = 0; c < col_values.size(); ++c) os << '\t' << at(r, c);
      os << '\n';
    }
    return os.str();
  }

  /// Grayscale heat map, `cell` pixels per bin, white = most populated bin.
  Image8 heat_map(int cell = 12) const {
    const int w = static_cast<int>(col_values.size()) * cell, h = static_cast<int>(row_values.size()) * cell;
    Image8 img{w, h, 1, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
    const std::size_t peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t n = at(static_cast<std::size_t>(y / cell), static_cast<std::size_t>(x / cell));
        img.data[static_cast<std::size_t>(y) * w + x] =
            peak ? static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(n) / peak)) : 0;
      }
    return img;
  }
};

namespace detail {

inline Histogram2D histogram(const std::string& rn, const std::string& cn, const std::vector<double>& rows_asc,
                             const std::vector<double>& cols, const std::vector<std::pair<double, double>>& samples) {
  Histogram2D h;
  h.row_name = rn;
  h.col_name = cn;
  h.row_values.assign(rows_asc.rbegin(), rows_asc.rend());
  h.col_values = cols;
  h.counts.assign(h.row_values.size() * h.col_values.size(), 0);
  auto nearest = [](const std::vector<double>& v, double x) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end(), [&](double a, double b) {
                                      return std::abs(a - x) < std::abs(b - x);
                                    }) -
                                    v.begin());
  };
  for (const auto& [r, c] : samples) ++h.counts[nearest(h.row_values, r) * h.col_values.size() + nearest(h.col_values, c)];
  return h;
}

}  // namespace detail

struct StatsReport {
  Histogram2D gaze;  ///< alpha rows x beta columns
  Histogram2D pose;  ///< phi rows x theta columns
  std::size_t entries = 0;
};

/// Histograms over the manifest's emitted entries; when `out_dir` is given,
/// writes gaze_hist.txt/.png and pose_hist.txt/.png there.
inline StatsReport stats(const std::filesystem::path& dataset_dir, const std::optional<std::filesystem::path>& out_dir = {}) {
  const auto manifest = load_manifest(dataset_dir);
  const DatasetSpec spec = parse_config(manifest.at("config_text").get<std::string>());
  std::vector<std::pair<double, double>> gaze, pose;
  for (const auto& e : manifest.at("entries")) {
    gaze.emplace_back(e.at("gaze").at("alpha_deg").get<double>(), e.at("gaze").at("beta_deg").get<double>());
    pose.emplace_back(e.at("camera").at("phi_deg").get<double>(), e.at("camera").at("theta_deg").get<double>());
  }
  StatsReport rep;
  rep.entries = gaze.size();
  rep.gaze = detail::histogram("alpha", "beta", spec.alphas(), spec.betas(), gaze);
  rep.pose = detail::histogram("phi", "theta", grid_values(spec.camera_phi, spec.camera_increment_deg),
                               grid_values(spec.camera_theta, spec.camera_increment_deg), pose);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    detail::write_text_file(*out_dir / "gaze_hist.txt", rep.gaze.to_text());
    detail::write_text_file(*out_dir / "pose_hist.txt", rep.pose.to_text());
    write_png((*out_dir / "gaze_hist.png").string(), rep.gaze.heat_map());
    write_png((*out_dir / "pose_hist.png").string(), rep.pose.heat_map());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Nearest-neighbor label-consistency evaluation

inline constexpr int kKnnFeatureWidth = 15;
inline constexpr int kKnnFeatureHeight = 10;

/// Box-filtered 15x10 grayscale feature vector in [0, 1].
inline std::vector<double> knn_features(const Image8& gray) {
  std::vector<double> f(kKnnFeatureWidth * kKnnFeatureHeight, 0.0);
  std::vector<int> n(f.size(), 0);
  for (int y = 0; y < gray.height; ++y)
    for (int x = 0; x < gray.width; ++x) {
      const int fx = x * kKnnFeatureWidth / gray.width, fy = y * kKnnFeatureHeight / gray.height;
      f[fy * kKnnFeatureWidth + fx] += gray.at(x, y, 0) / 255.0;
      ++n[fy * kKnnFeatureWidth + fx];
    }
  for (std::size_t i = 0; i < f.size(); ++i) f[i] /= std::max(n[i], 1);
  return f;
}

/// Standardizes a feature vector to zero mean and unit variance, removing
/// global exposure differences between lighting conditions.
inline std::vector<double> standardize(std::vector<double> f) {
  const double mean = std::accumulate(f.begin(), f.end(), 0.0) / f.size();
  double var = 0;
  for (double v : f) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / f.size());
  for (double& v : f) v = sd > 1e-12 ? (v - mean) / sd : 0.0;
  return f;
}

struct KnnOptions {
  double train_fraction = 0.8;
  int k = 3;
  bool test_on_train = false;  ///< evaluate on the training images themselves
  int permutations = 199;      ///< shuffled-label control draws
  std::uint64_t shuffle_seed = 0x5EED;
};

struct KnnReport {
  std::size_t n_train = 0, n_test = 0;
  double mean_error_deg = 0;        ///< k-NN prediction
  double baseline_error_deg = 0;    ///< normalized mean training gaze
  double shuffled_error_deg = 0;    ///< mean over label permutations
  double p_value = 1;               ///< one-sided permutation p-value
  std::vector<double> errors_deg;   ///< per test image
};

namespace detail {

inline double angle_deg(const Vec3& a, const Vec3& b) {
  return rad2deg(std::acos(std::clamp(dot(normalize(a), normalize(b)), -1.0, 1.0)));
}

inline std::vector<double> knn_errors(const std::vector<std::vector<double>>& train_f, const std::vector<Vec3>& train_g,
                                      const std::vector<std::vector<double>>& test_f, const std::vector<Vec3>& test_g,
                                      const std::vector<std::vector<std::size_t>>& neighbors) {
  std::vector<double> err(test_f.size());
  for (std::size_t t = 0; t < test_f.size(); ++t) {
    Vec3 sum;
    for (auto i : neighbors[t]) sum += train_g[i];
    err[t] = length(sum) > 0 ? angle_deg(sum, test_g[t]) : 180.0;
  }
  (void)train_f;
  return err;
}

}  // namespace detail

/// k-NN gaze regression from 15x10 grayscale thumbnails to camera-frame
/// gaze, with the trivial mean-gaze baseline and a shuffled-label control.
/// The train/test split is a deterministic function of each image's seed.
inline KnnReport eval_knn(const std::filesystem::path& dataset_dir, const KnnOptions& opt = {}) {
  const auto manifest = load_manifest(dataset_dir);
  const auto& entries = manifest.at("entries");
  if (entries.size() < 50) throw Error(Errc::TooFewImages, "eval_knn needs at least 50 images");
  if (opt.k < 1) throw Error(Errc::RangeError, "k must be >= 1");

  std::vector<std::vector<double>> train_f, test_f;
  std::vector<Vec3> train_g, test_g;
  for (const auto& e : entries) {
    const LabelRecord lab = load_label(dataset_dir / e.at("label").get<std::string>());
    auto f = standardize(knn_features(read_png((dataset_dir / e.at("image").get<std::string>()).string(), 1)));
    const std::uint64_t seed = e.at("seed").get<std::uint64_t>();
    const double u = static_cast<double>(mix64(seed ^ 0x5B11) >> 11) * 0x1.0p-53;
    if (opt.test_on_train || u < opt.train_fraction) {
      train_f.push_back(f);
      train_g.push_back(lab.gaze_camera);
    }
    if (opt.test_on_train || u >= opt.train_fraction) {
      test_f.push_back(std::move(f));
      test_g.push_back(lab.gaze_camera);
    }
  }
  if (train_f.size() < static_cast<std::size_t>(opt.k) || test_f.empty())
    throw Error(Errc::TooFewImages, "split leaves too few training or test images");

  // Neighbor sets depend only on features, so label permutations reuse them.
  std::vector<std::vector<std::size_t>> neighbors(test_f.size());
  for (std::size_t t = 0; t < test_f.size(); ++t) {
    std::vector<std::pair<double, std::size_t>> d(train_f.size());
    for (std::size_t i = 0; i < train_f.size(); ++i) {
      double s = 0;
      for (std::size_t c = 0; c < test_f[t].size(); ++c) s += (test_f[t][c] - train_f[i][c]) * (test_f[t][c] - train_f[i][c]);
      d[i] = {s, i};
    }
    std::partial_sort(d.begin(), d.begin() + opt.k, d.end());
    for (int j = 0; j < opt.k; ++j) neighbors[t].push_back(d[j].second);
  }

  KnnReport rep;
  rep.n_train = train_f.size();
  rep.n_test = test_f.size();
  rep.errors_deg = detail::knn_errors(train_f, train_g, test_f, test_g, neighbors);
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  rep.mean_error_deg = mean(rep.errors_deg);

  Vec3 mean_g;
  for (const auto& g : train_g) mean_g += g;
  std::vector<double> base(test_g.size());
  for (std::size_t t = 0; t < test_g.size(); ++t) base[t] = detail::angle_deg(mean_g, test_g[t]);
  rep.baseline_error_deg = mean(base);

  Rng rng(opt.shuffle_seed);
  int not_better = 0;
  double shuffled_sum = 0;
  std::vector<Vec3> perm = train_g;
  for (int p = 0; p < opt.permutations; ++p) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
    const double e = mean(detail::knn_errors(train_f, perm, test_f, test_g, neighbors));
    shuffled_sum += e;
    if (e <= rep.mean_error_deg) ++not_better;
  }
  rep.shuffled_error_deg = opt.permutations > 0 ? shuffled_sum / opt.permutations : 0.0;
  rep.p_value = (1.0 + not_better) / (1.0 + opt.permutations);
  return rep;
}

}  // namespace oculogen
