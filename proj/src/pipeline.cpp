#include "polyterrain/pipeline.hpp"

#include "polyterrain/error.hpp"
#include "polyterrain/merging.hpp"
#include "polyterrain/polytope.hpp"
#include "polyterrain/scene.hpp"
#include "polyterrain/segmentation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace polyterrain {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

Mapper::Mapper(const CameraIntrinsics& intr, const PipelineConfig& cfg) : intr_(intr), cfg_(cfg) {
  intr_.validate();
  cfg_.validate();
}

std::vector<PlanarRegion> segment_to_world(const DepthImage& depth, const CameraIntrinsics& intr,
                                           const CameraPose& pose, const PipelineConfig& cfg) {
  std::vector<PlanarRegion> regions = segmentation::segment_frame(depth, intr, cfg);
  for (PlanarRegion& r : regions) r = transform_region(pose, r);
  return regions;
}

StageTimes Mapper::add_frame(const DepthImage& depth, const CameraPose& pose) {
  pose.validate();
  StageTimes t;
  const auto t0 = Clock::now();
  std::vector<PlanarRegion> incoming = segment_to_world(depth, intr_, pose, cfg_);
  t.seg_ms = ms_since(t0);
  t.planes = static_cast<int>(incoming.size());
  const auto t1 = Clock::now();
  incoming = merging::consolidate(incoming, cfg_);
  regions_ = merging::merge_planes(std::move(regions_), incoming, cfg_);
  t.merge_ms = ms_since(t1);
  t.total_ms = ms_since(t0);
  return t;
}

PlanarMap Mapper::build_map(double* approx_ms) const {
  const auto t0 = Clock::now();
  PlanarMap map;
  map.regions = regions_;
  map.polygons.reserve(regions_.size());
  for (const PlanarRegion& r : regions_) map.polygons.push_back(polytope::approximate_region(r, cfg_));
  if (approx_ms) *approx_ms = ms_since(t0);
  return map;
}

PlanarMap run_pipeline(const io::Sequence& seq, const PipelineConfig& cfg) {
  Mapper mapper(seq.intrinsics, cfg);
  for (const io::Frame& f : seq.frames) mapper.add_frame(f.depth, f.pose);
  return mapper.build_map();
}

PlanarMap run_pipeline(const std::filesystem::path& manifest_path, const PipelineConfig& cfg,
                       const std::filesystem::path& out_path) {
  const io::Sequence seq = io::load_sequence(manifest_path);
  PlanarMap map = run_pipeline(seq, cfg);
  io::write_map(out_path, map);
  return map;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BenchReport bench(const io::Sequence& seq, const PipelineConfig& cfg, int repetitions) {
  if (repetitions < 1) throw ContractViolation("bench: repetitions must be at least 1");
  const std::size_t nf = seq.frames.size();
  std::vector<std::vector<StageTimes>> runs(nf);
  for (int rep = 0; rep < repetitions; ++rep) {
    Mapper mapper(seq.intrinsics, cfg);
    for (std::size_t i = 0; i < nf; ++i) {
      const auto t0 = Clock::now();
      StageTimes t = mapper.add_frame(seq.frames[i].depth, seq.frames[i].pose);
      mapper.build_map(&t.approx_ms);
      t.total_ms = ms_since(t0);
      runs[i].push_back(t);
    }
  }
  BenchReport rep;
  rep.repetitions = repetitions;
  for (std::size_t i = 0; i < nf; ++i) {
    BenchRow row;
    row.frame = static_cast<int>(i);
    row.planes = runs[i].front().planes;
    std::vector<double> seg, mer, app, tot;
    for (const StageTimes& t : runs[i]) {
      seg.push_back(t.seg_ms);
      mer.push_back(t.merge_ms);
      app.push_back(t.approx_ms);
      tot.push_back(t.total_ms);
    }
    row.seg_ms = median(seg);
    row.merge_ms = median(mer);
    row.approx_ms = median(app);
    row.total_ms = median(tot);
    row.raw_total_ms = tot;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string BenchReport::to_csv() const {
  std::ostringstream out;
  out << "frame,planes,seg_ms,merge_ms,approx_ms,total_ms";
  for (int r = 0; r < repetitions; ++r) out << ",rep" << r << "_ms";
  out << "\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  for (const BenchRow& row : rows) {
    out << row.frame << ',' << row.planes << ',' << num(row.seg_ms) << ',' << num(row.merge_ms) << ','
        << num(row.approx_ms) << ',' << num(row.total_ms);
    for (double v : row.raw_total_ms) out << ',' << num(v);
    out << "\n";
  }
  return out.str();
}

void synth_dataset(const io::SynthSpec& spec, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError(InputError::Kind::kIo, out_dir.string(), "cannot create output directory");
  std::vector<std::pair<std::string, CameraPose>> frames;
  for (std::size_t i = 0; i < spec.poses.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.pgm", i);
    const DepthImage depth = scene::render_depth(spec.scene, spec.intrinsics, spec.poses[i], spec.noise, spec.seed + i);
    io::write_pgm(out_dir / name, depth);
    frames.emplace_back(name, spec.poses[i]);
  }
  io::write_manifest(out_dir / "manifest.json", spec.intrinsics, frames);
  io::write_ground_truth(out_dir / "ground_truth.json", spec.scene);
}

}  // namespace polyterrain
