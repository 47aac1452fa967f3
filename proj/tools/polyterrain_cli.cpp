// polyterrain command line: synth, segment, pipeline, eval, bench.
// Exit codes: 0 success, 2 input-format or usage error, 3 contract violation,
// 1 anything else.

#include "polyterrain/polyterrain.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

namespace {

int exit_code(pt_status s) {
  switch (s) {
    case PT_OK: return 0;
    case PT_ERR_INPUT:
    case PT_ERR_INVALID_ARGUMENT: return 2;
    case PT_ERR_CONTRACT: return 3;
    default: return 1;
  }
}

int report(pt_status s) {
  if (s != PT_OK) std::fprintf(stderr, "polyterrain: %s: %s\n", pt_status_name(s), pt_last_error());
  return exit_code(s);
}

struct ConfigDeleter {
  void operator()(pt_config* c) const { pt_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<pt_config, ConfigDeleter>;

// Defaults overridden by the JSON file when one is given.
pt_status load_config(const std::string& path, ConfigPtr& out) {
  pt_config* raw = nullptr;
  pt_status s = pt_config_create(&raw);
  if (s != PT_OK) return s;
  out.reset(raw);
  if (!path.empty()) s = pt_config_load_json(raw, path.c_str());
  return s;
}

void print_and_free(char* text) {
  if (!text) return;
  std::fputs(text, stdout);
  pt_string_free(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar region mapping from depth sequences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pt_version());

  std::string spec_path, manifest, map_path, gt_path, config_path, out;
  std::size_t frame = 0;
  int reps = 5;
  bool polygons = false;

  CLI::App* synth = app.add_subcommand("synth", "Render a synthetic dataset from a scene spec");
  synth->add_option("spec", spec_path, "Scene spec JSON")->required();
  synth->add_option("--out", out, "Output directory")->required();

  CLI::App* segment = app.add_subcommand("segment", "Segment one frame into world-frame regions");
  segment->add_option("manifest", manifest, "Sequence manifest JSON")->required();
  segment->add_option("--frame", frame, "Frame index");
  segment->add_option("--config", config_path, "Config JSON");
  segment->add_option("--out", out, "Regions JSON")->required();

  CLI::App* pipeline = app.add_subcommand("pipeline", "Build the convex-polygon map of a sequence");
  pipeline->add_option("manifest", manifest, "Sequence manifest JSON")->required();
  pipeline->add_option("--config", config_path, "Config JSON");
  pipeline->add_option("--out", out, "Map JSON")->required();

  CLI::App* evalc = app.add_subcommand("eval", "Score a map against ground truth");
  evalc->add_option("map", map_path, "Map JSON")->required();
  evalc->add_option("ground_truth", gt_path, "Ground truth JSON")->required();
  evalc->add_flag("--polygons", polygons, "Score convex parts instead of contours");
  evalc->add_option("--out", out, "Report JSON (default: stdout)");

  CLI::App* benchc = app.add_subcommand("bench", "Time every pipeline stage per frame");
  benchc->add_option("manifest", manifest, "Sequence manifest JSON")->required();
  benchc->add_option("--config", config_path, "Config JSON");
  benchc->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);
  benchc->add_option("--out", out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*synth) return report(pt_synth(spec_path.c_str(), out.c_str()));

  if (*evalc) {
    char* text = nullptr;
    const pt_status s = pt_evaluate(map_path.c_str(), gt_path.c_str(), polygons ? 1 : 0,
                                    out.empty() ? nullptr : out.c_str(), out.empty() ? &text : nullptr);
    print_and_free(text);
    return report(s);
  }

  ConfigPtr cfg;
  if (pt_status s = load_config(config_path, cfg); s != PT_OK) return report(s);

  if (*segment) {
    std::size_t n = 0;
    const pt_status s = pt_segment(manifest.c_str(), frame, cfg.get(), out.c_str(), &n);
    if (s == PT_OK) std::printf("%zu regions\n", n);
    return report(s);
  }

  if (*pipeline) {
    pt_map* map = nullptr;
    const pt_status s = pt_pipeline_run(manifest.c_str(), cfg.get(), out.c_str(), &map);
    if (s == PT_OK) {
      std::size_t n = 0;
      pt_map_region_count(map, &n);
      std::size_t parts = 0;
      for (std::size_t i = 0; i < n; ++i) {
        pt_region_info info;
        pt_map_region_info(map, i, &info);
        parts += info.polygons;
      }
      std::printf("%zu regions, %zu convex polygons\n", n, parts);
    }
    pt_map_destroy(map);
    return report(s);
  }

  if (*benchc) {
    char* text = nullptr;
    const pt_status s = pt_bench(manifest.c_str(), cfg.get(), reps, out.empty() ? nullptr : out.c_str(),
                                 out.empty() ? &text : nullptr);
    print_and_free(text);
    return report(s);
  }
  return 2;
}
