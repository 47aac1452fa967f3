#pragma once

#include "polyterrain/config.hpp"
#include "polyterrain/io.hpp"
#include "polyterrain/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace polyterrain {

struct StageTimes {
  double seg_ms = 0.0;
  double merge_ms = 0.0;
  double approx_ms = 0.0;
  double total_ms = 0.0;
  int planes = 0;  // regions segmented in the frame
};

/// Incremental map builder: segment a frame, move its regions to the world
/// frame, join touching coplanar regions of the frame, then merge them into
/// the historical map. Not thread-safe; one writer per instance.
class Mapper {
 public:
  Mapper(const CameraIntrinsics& intr, const PipelineConfig& cfg);

  /// Throws ContractViolation when the depth size does not match the intrinsics.
  StageTimes add_frame(const DepthImage& depth, const CameraPose& pose);

  const std::vector<PlanarRegion>& regions() const { return regions_; }
  const PipelineConfig& config() const { return cfg_; }
  const CameraIntrinsics& intrinsics() const { return intr_; }

  /// Approximates every region with convex polygons.
  PlanarMap build_map(double* approx_ms = nullptr) const;

 private:
  CameraIntrinsics intr_;
  PipelineConfig cfg_;
  std::vector<PlanarRegion> regions_;
};

/// Camera-frame regions of one frame, moved to the world frame.
std::vector<PlanarRegion> segment_to_world(const DepthImage& depth, const CameraIntrinsics& intr,
                                           const CameraPose& pose, const PipelineConfig& cfg);

PlanarMap run_pipeline(const io::Sequence& seq, const PipelineConfig& cfg);

/// Loads the manifest, runs the pipeline and writes the map JSON to out_path.
PlanarMap run_pipeline(const std::filesystem::path& manifest_path, const PipelineConfig& cfg,
                       const std::filesystem::path& out_path);

struct BenchRow {
  int frame = 0;
  int planes = 0;
  double seg_ms = 0.0;
  double merge_ms = 0.0;
  double approx_ms = 0.0;
  double total_ms = 0.0;
  std::vector<double> raw_total_ms;  // one per repetition
};

struct BenchReport {
  std::vector<BenchRow> rows;
  int repetitions = 0;

  /// Header "frame,planes,seg_ms,merge_ms,approx_ms,total_ms" followed by
  /// one raw total column per repetition (rep0_ms, rep1_ms, ...). Stage
  /// columns are medians over repetitions.
  std::string to_csv() const;
};

/// Serial timing of every frame: segmentation, merging into the running map
/// and approximation of the whole running map. Each repetition starts from
/// an empty map. Throws ContractViolation for repetitions < 1.
BenchReport bench(const io::Sequence& seq, const PipelineConfig& cfg, int repetitions);

double median(std::vector<double> values);

/// Renders every pose of the spec; writes manifest.json, frame_NNN.pgm and
/// ground_truth.json into out_dir (created if absent). Frame i uses noise
/// seed spec.seed + i.
void synth_dataset(const io::SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace polyterrain
