#pragma once

#include "polyterrain/config.hpp"
#include "polyterrain/scene.hpp"
#include "polyterrain/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace polyterrain::io {

/// Binary PGM (P5). 16-bit samples are big-endian; maxval <= 255 is read as 8-bit.
DepthImage read_pgm(const std::filesystem::path& path);
/// Writes a 16-bit P5 image; depths are rounded to integer millimeters.
void write_pgm(const std::filesystem::path& path, const DepthImage& depth);

struct Frame {
  std::filesystem::path depth_path;
  DepthImage depth;
  CameraPose pose;
};

struct Sequence {
  CameraIntrinsics intrinsics;
  std::vector<Frame> frames;
};

/// Manifest JSON:
///   {"intrinsics": {"f","cx","cy","width","height"},
///    "frames": [{"depth": "relative/or/absolute.pgm", "pose": {"t": [x,y,z], "q": [w,x,y,z]}}]}
/// Depth paths are resolved relative to the manifest's directory.
/// Throws InputError with kMissingFile, kMalformed or kDimensionMismatch.
Sequence load_sequence(const std::filesystem::path& manifest_path, bool load_depth = true);

void write_manifest(const std::filesystem::path& manifest_path, const CameraIntrinsics& intr,
                    const std::vector<std::pair<std::string, CameraPose>>& frames);

/// {"planes": [{"id", "normal": [x,y,z], "boundary": [[x,y,z], ...]}]}
scene::Scene read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const scene::Scene& scene);

/// {"regions": [{"normal", "centroid", "mse", "n_points", "contour", "holes",
///               "polygons": [{"vertices"}]}]}
/// Doubles are written in shortest round-trip form, so a read reproduces the
/// written values exactly and identical maps serialize to identical bytes.
std::string map_to_json(const PlanarMap& map);
PlanarMap map_from_json(const std::string& text, const std::string& origin = "<memory>");
void write_map(const std::filesystem::path& path, const PlanarMap& map);
PlanarMap read_map(const std::filesystem::path& path);

/// JSON object whose keys override PipelineConfig defaults. Unknown keys are
/// rejected (InputError); values that fail PipelineConfig::validate raise
/// ContractViolation.
PipelineConfig read_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const std::string& text, const std::string& origin = "<memory>");
std::string config_to_json(const PipelineConfig& cfg);

/// Dataset description for synthetic rendering:
///   {"scene": {"type": "staircase", "steps", "rise", "run", "width"}
///           | {"type": "tile_wall", "rows", "cols", "tile_w", "tile_h", "y0", "depth_step"}
///           | {"type": "planes", "planes": [{"id", "normal", "boundary"}]},
///    "intrinsics": {...} (optional), "noise": {"sigma_at_2m", "quantization"} (optional),
///    "seed": n (optional),
///    "poses": [{"t": [...], "q": [w,x,y,z]} | {"eye": [...], "target": [...]}]}
struct SynthSpec {
  scene::Scene scene;
  CameraIntrinsics intrinsics;
  scene::NoiseModel noise;
  std::uint64_t seed = 0;
  std::vector<CameraPose> poses;
};
SynthSpec synth_spec_from_json(const std::string& text, const std::string& origin = "<memory>");
SynthSpec read_synth_spec(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace polyterrain::io
