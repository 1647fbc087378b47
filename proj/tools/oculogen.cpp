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

// Command-line front end: generate, preview, stats, eval-knn, render-one.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 generation error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oculogen.hpp"

namespace {

using namespace oculogen;

constexpr int kExitUsage = 1;
constexpr int kExitGeneration = 2;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> spp;
  int jobs = 0;
};

int jobs_from(const CommonOptions& o) {
  if (o.jobs > 0) return o.jobs;
  if (const char* env = std::getenv("OCULOGEN_JOBS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

DatasetSpec load_spec(const CommonOptions& o) {
  DatasetSpec spec = o.config.empty() ? parse_config("") : load_config(o.config);
  if (!o.out.empty()) spec.output_dir = o.out;
  if (o.seed) spec.master_seed = *o.seed;
  if (o.spp) spec.spp = *o.spp;
  spec.validate();
  return spec;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Dataset config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", o.seed, "Master seed (overrides dataset.master_seed)");
  cmd->add_option("--spp", o.spp, "Samples per pixel (overrides image.spp)")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "Worker threads (default: OCULOGEN_JOBS or all cores)")->check(CLI::NonNegativeNumber);
}

bool is_config_error(Errc c) {
  return c == Errc::ParseError || c == Errc::UnknownKey || c == Errc::RangeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Procedural eye-region dataset generator"};
  app.require_subcommand(1);

  CommonOptions gen_opt;
  bool quiet = false;
  auto* gen = app.add_subcommand("generate", "Render a labelled dataset");
  add_common(gen, gen_opt);
  std::string from_manifest;
  gen->add_option("--from-manifest", from_manifest, "Regenerate from an existing manifest.json")
      ->check(CLI::ExistingFile)
      ->excludes("--config");
  gen->add_flag("--quiet", quiet, "No progress output");

  CommonOptions prev_opt;
  int rows = 7, cols = 7;
  std::string prev_path = "preview.png";
  auto* prev = app.add_subcommand("preview", "Render a contact sheet of gaze variations");
  add_common(prev, prev_opt);
  prev->add_option("--rows", rows, "Grid rows (alpha)")->check(CLI::PositiveNumber);
  prev->add_option("--cols", cols, "Grid columns (beta)")->check(CLI::PositiveNumber);
  prev->add_option("-o,--output", prev_path, "Output PNG");

  std::string stats_dir, stats_out;
  auto* st = app.add_subcommand("stats", "Gaze and head-pose histograms of a dataset");
  st->add_option("dataset", stats_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  st->add_option("--report-dir", stats_out, "Directory for text tables and heat maps");

  std::string knn_dir;
  KnnOptions knn;
  auto* ev = app.add_subcommand("eval-knn", "Nearest-neighbor gaze regression check");
  ev->add_option("dataset", knn_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--train-fraction", knn.train_fraction, "Training share")->check(CLI::Range(0.0, 1.0));
  ev->add_option("-k", knn.k, "Neighbors")->check(CLI::PositiveNumber);
  ev->add_option("--permutations", knn.permutations, "Shuffled-label draws")->check(CLI::NonNegativeNumber);
  ev->add_flag("--test-on-train", knn.test_on_train, "Evaluate on the training images");

  CommonOptions one_opt;
  ImageJob one;
  std::string one_png = "render.png", one_label, one_dump;
  auto* ro = app.add_subcommand("render-one", "Render a single pose");
  add_common(ro, one_opt);
  ro->add_option("--theta", one.theta_deg, "Camera azimuth (deg)");
  ro->add_option("--phi", one.phi_deg, "Camera elevation (deg)");
  ro->add_option("--alpha", one.alpha_deg, "Gaze pitch (deg)");
  ro->add_option("--beta", one.beta_deg, "Gaze yaw (deg)");
  ro->add_option("--identity", one.identity, "Identity index")->check(CLI::NonNegativeNumber);
  ro->add_option("--lighting-sample", one.lighting_sample, "Lighting sample index")->check(CLI::NonNegativeNumber);
  ro->add_option("-o,--output", one_png, "Output PNG");
  ro->add_option("--label", one_label, "Output label JSON");
  ro->add_option("--float-dump", one_dump, "Output linear float dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  DatasetSpec spec;
  try {
    if (*gen) {
      if (!from_manifest.empty()) {
        const auto m = load_manifest(std::filesystem::path(from_manifest).parent_path());
        CommonOptions o = gen_opt;
        spec = parse_config(m.at("config_text").get<std::string>());
        if (!o.out.empty()) spec.output_dir = o.out;
        if (o.seed) spec.master_seed = *o.seed;
        if (o.spp) spec.spp = *o.spp;
        spec.validate();
      } else {
        spec = load_spec(gen_opt);
      }
    } else if (*prev) {
      spec = load_spec(prev_opt);
    } else if (*ro) {
      spec = load_spec(one_opt);
    }
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen) {
      GenerateOptions opt;
      opt.jobs = jobs_from(gen_opt);
      if (!quiet)
        opt.progress = [](std::size_t done, std::size_t total) {
          if (done == total || done % 25 == 0) std::cerr << "\r" << done << "/" << total << std::flush;
        };
      const auto m = generate(spec, opt);
      if (!quiet) std::cerr << "\n";
      std::cout << m.json["counts"].dump() << "\n";
      return m.failed ? kExitGeneration : 0;
    }
    if (*prev) {
      const auto r = preview(spec, rows, cols, prev_opt.spp.value_or(16), jobs_from(prev_opt));
      write_png(prev_path, r.sheet);
      std::cout << r.tiles_rendered << " tiles -> " << prev_path << "\n";
      return 0;
    }
    if (*st) {
      const auto r = stats(stats_dir, stats_out.empty() ? std::nullopt : std::optional<std::filesystem::path>(stats_out));
      std::cout << "gaze (alpha x beta)\n" << r.gaze.to_text() << "\nhead pose (phi x theta)\n" << r.pose.to_text();
      return 0;
    }
    if (*ev) {
      const auto r = eval_knn(knn_dir, knn);
      std::cout << "train " << r.n_train << " test " << r.n_test << "\n"
                << "knn_error_deg " << r.mean_error_deg << "\n"
                << "baseline_error_deg " << r.baseline_error_deg << "\n"
                << "shuffled_error_deg " << r.shuffled_error_deg << "\n"
                << "p_value " << r.p_value << "\n";
      return 0;
    }
    if (*ro) {
      GenerationContext ctx(spec);
      one.seed = image_seed(spec.master_seed, one.identity, one.theta_deg, one.phi_deg, one.alpha_deg, one.beta_deg,
                            one.lighting_sample);
      if (one.identity >= spec.identities) throw Error(Errc::RangeError, "identity index exceeds dataset.identities");
      const PreparedImage p = ctx.prepare(one, true, true);
      if (!p.constraint_ok) std::cerr << "warning: pose outside the anatomical limits\n";
      if (!p.visible) std::cerr << "warning: pupil not visible\n";
      const Image img = render(*p.scene, p.config.camera, ctx.render_settings(one), jobs_from(one_opt));
      write_png(one_png, to_srgb8(img));
      if (!one_dump.empty()) write_float_dump(one_dump, img);
      if (!one_label.empty()) {
        std::ofstream out(one_label);
        out << p.label->serialize();
        if (!out) throw Error(Errc::IoError, "cannot write " + one_label);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitUsage : kExitGeneration;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneration;
  }
  return 0;
}
