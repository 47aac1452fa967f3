#include "polyterrain/polyterrain.h"

#include "polyterrain/error.hpp"
#include "polyterrain/eval.hpp"
#include "polyterrain/io.hpp"
#include "polyterrain/pipeline.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

using namespace polyterrain;

struct pt_config {
  PipelineConfig cfg;
};

struct pt_mapper {
  Mapper mapper;
};

struct pt_map {
  PlanarMap map;
};

namespace {

thread_local std::string g_last_error;

pt_status fail(pt_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs `fn`, mapping library exceptions onto status codes.
template <class Fn>
pt_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const InputError& e) {
    return fail(e.kind() == InputError::Kind::kIo ? PT_ERR_IO : PT_ERR_INPUT, e.what());
  } catch (const ContractViolation& e) {
    return fail(PT_ERR_CONTRACT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PT_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

PipelineConfig config_or_default(const pt_config* cfg) { return cfg ? cfg->cfg : PipelineConfig{}; }

double* config_field(PipelineConfig& c, const std::string& key) {
  if (key == "seed_mse_max") return &c.seed_mse_max;
  if (key == "discontinuity_max") return &c.discontinuity_max;
  if (key == "tau_theta") return &c.tau_theta;
  if (key == "tau_b") return &c.tau_b;
  if (key == "raster_resolution") return &c.raster_resolution;
  if (key == "epsilon") return &c.epsilon;
  if (key == "foot_diameter") return &c.foot_diameter;
  if (key == "refine_dist_max") return &c.refine_dist_max;
  return nullptr;
}

}  // namespace

extern "C" {

const char* pt_version(void) { return "0.1.0"; }

const char* pt_last_error(void) { return g_last_error.c_str(); }

const char* pt_status_name(pt_status status) {
  switch (status) {
    case PT_OK: return "ok";
    case PT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PT_ERR_INPUT: return "input error";
    case PT_ERR_CONTRACT: return "contract violation";
    case PT_ERR_IO: return "i/o error";
    case PT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void pt_string_free(char* s) { std::free(s); }

pt_status pt_config_create(pt_config** out) {
  if (!out) return fail(PT_ERR_INVALID_ARGUMENT, "pt_config_create: out is NULL");
  return guarded([&] {
    *out = new pt_config{};
    return PT_OK;
  });
}

pt_status pt_config_load_json(pt_config* cfg, const char* path) {
  if (!cfg || !path) return fail(PT_ERR_INVALID_ARGUMENT, "pt_config_load_json: NULL argument");
  return guarded([&] {
    cfg->cfg = io::read_config(path);
    return PT_OK;
  });
}

pt_status pt_config_set(pt_config* cfg, const char* key, double value) {
  if (!cfg || !key) return fail(PT_ERR_INVALID_ARGUMENT, "pt_config_set: NULL argument");
  return guarded([&] {
    PipelineConfig next = cfg->cfg;
    const std::string k = key;
    if (k == "cell_size") {
      next.cell_size = static_cast<int>(value);
    } else if (k == "min_region_cells") {
      next.min_region_cells = static_cast<int>(value);
    } else if (double* f = config_field(next, k)) {
      *f = value;
    } else {
      return fail(PT_ERR_INVALID_ARGUMENT, "pt_config_set: unknown key '" + k + "'");
    }
    next.validate();
    cfg->cfg = next;
    return PT_OK;
  });
}

pt_status pt_config_get(const pt_config* cfg, const char* key, double* value) {
  if (!cfg || !key || !value) return fail(PT_ERR_INVALID_ARGUMENT, "pt_config_get: NULL argument");
  PipelineConfig c = cfg->cfg;
  const std::string k = key;
  if (k == "cell_size") {
    *value = c.cell_size;
  } else if (k == "min_region_cells") {
    *value = c.min_region_cells;
  } else if (double* f = config_field(c, k)) {
    *value = *f;
  } else {
    return fail(PT_ERR_INVALID_ARGUMENT, "pt_config_get: unknown key '" + k + "'");
  }
  return PT_OK;
}

void pt_config_destroy(pt_config* cfg) { delete cfg; }

pt_status pt_mapper_create(const pt_intrinsics* intr, const pt_config* cfg, pt_mapper** out) {
  if (!intr || !out) return fail(PT_ERR_INVALID_ARGUMENT, "pt_mapper_create: NULL argument");
  return guarded([&] {
    CameraIntrinsics ci{intr->f, intr->cx, intr->cy, intr->width, intr->height};
    *out = new pt_mapper{Mapper(ci, config_or_default(cfg))};
    return PT_OK;
  });
}

pt_status pt_mapper_add_frame(pt_mapper* m, const uint16_t* depth_mm, int width, int height, const double pose[7]) {
  if (!m || !depth_mm || !pose) return fail(PT_ERR_INVALID_ARGUMENT, "pt_mapper_add_frame: NULL argument");
  if (width <= 0 || height <= 0) return fail(PT_ERR_INVALID_ARGUMENT, "pt_mapper_add_frame: bad image size");
  return guarded([&] {
    DepthImage depth(width, height);
    for (std::size_t i = 0; i < depth.data.size(); ++i) depth.data[i] = depth_mm[i];
    CameraPose p;
    p.translation = Vec3(pose[0], pose[1], pose[2]);
    p.rotation = Eigen::Quaterniond(pose[3], pose[4], pose[5], pose[6]);
    m->mapper.add_frame(depth, p);
    return PT_OK;
  });
}

pt_status pt_mapper_region_count(const pt_mapper* m, size_t* count) {
  if (!m || !count) return fail(PT_ERR_INVALID_ARGUMENT, "pt_mapper_region_count: NULL argument");
  *count = m->mapper.regions().size();
  return PT_OK;
}

pt_status pt_mapper_build_map(const pt_mapper* m, pt_map** out) {
  if (!m || !out) return fail(PT_ERR_INVALID_ARGUMENT, "pt_mapper_build_map: NULL argument");
  return guarded([&] {
    *out = new pt_map{m->mapper.build_map()};
    return PT_OK;
  });
}

void pt_mapper_destroy(pt_mapper* m) { delete m; }

pt_status pt_map_read(const char* path, pt_map** out) {
  if (!path || !out) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_read: NULL argument");
  return guarded([&] {
    *out = new pt_map{io::read_map(path)};
    return PT_OK;
  });
}

pt_status pt_map_write(const pt_map* map, const char* path) {
  if (!map || !path) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_write: NULL argument");
  return guarded([&] {
    io::write_map(path, map->map);
    return PT_OK;
  });
}

pt_status pt_map_to_json(const pt_map* map, char** json) {
  if (!map || !json) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_to_json: NULL argument");
  return guarded([&] {
    *json = dup_string(io::map_to_json(map->map));
    return PT_OK;
  });
}

pt_status pt_map_region_count(const pt_map* map, size_t* count) {
  if (!map || !count) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_region_count: NULL argument");
  *count = map->map.regions.size();
  return PT_OK;
}

pt_status pt_map_region_info(const pt_map* map, size_t index, pt_region_info* info) {
  if (!map || !info) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_region_info: NULL argument");
  if (index >= map->map.regions.size()) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_region_info: index out of range");
  const PlanarRegion& r = map->map.regions[index];
  for (int k = 0; k < 3; ++k) {
    info->normal[k] = r.normal(k);
    info->centroid[k] = r.centroid(k);
  }
  info->mse = r.mse;
  info->n_points = r.n_points;
  info->contour_vertices = r.contour.size();
  info->holes = r.holes.size();
  info->polygons = index < map->map.polygons.size() ? map->map.polygons[index].size() : 0;
  return PT_OK;
}

pt_status pt_map_polygon_vertices(const pt_map* map, size_t region, size_t poly, double* xyz, size_t cap,
                                  size_t* count) {
  if (!map || !count || (!xyz && cap > 0)) return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_polygon_vertices: NULL argument");
  if (region >= map->map.polygons.size() || poly >= map->map.polygons[region].size())
    return fail(PT_ERR_INVALID_ARGUMENT, "pt_map_polygon_vertices: index out of range");
  const Loop3& v = map->map.polygons[region][poly].vertices;
  *count = v.size();
  for (size_t i = 0; i < v.size() && i < cap; ++i)
    for (int k = 0; k < 3; ++k) xyz[3 * i + k] = v[i](k);
  return PT_OK;
}

void pt_map_destroy(pt_map* map) { delete map; }

pt_status pt_synth(const char* spec_path, const char* out_dir) {
  if (!spec_path || !out_dir) return fail(PT_ERR_INVALID_ARGUMENT, "pt_synth: NULL argument");
  return guarded([&] {
    synth_dataset(io::read_synth_spec(spec_path), out_dir);
    return PT_OK;
  });
}

pt_status pt_segment(const char* manifest_path, size_t frame, const pt_config* cfg, const char* out_path,
                     size_t* regions) {
  if (!manifest_path || !out_path) return fail(PT_ERR_INVALID_ARGUMENT, "pt_segment: NULL argument");
  return guarded([&] {
    const io::Sequence seq = io::load_sequence(manifest_path);
    if (frame >= seq.frames.size())
      return fail(PT_ERR_INVALID_ARGUMENT, "pt_segment: frame " + std::to_string(frame) + " out of range (" +
                                               std::to_string(seq.frames.size()) + " frames)");
    PlanarMap map;
    map.regions = segment_to_world(seq.frames[frame].depth, seq.intrinsics, seq.frames[frame].pose, config_or_default(cfg));
    map.polygons.assign(map.regions.size(), {});
    io::write_map(out_path, map);
    if (regions) *regions = map.regions.size();
    return PT_OK;
  });
}

pt_status pt_pipeline_run(const char* manifest_path, const pt_config* cfg, const char* out_path, pt_map** out_map) {
  if (!manifest_path || !out_path) return fail(PT_ERR_INVALID_ARGUMENT, "pt_pipeline_run: NULL argument");
  return guarded([&] {
    PlanarMap map = run_pipeline(std::filesystem::path(manifest_path), config_or_default(cfg), out_path);
    if (out_map) *out_map = new pt_map{std::move(map)};
    return PT_OK;
  });
}

pt_status pt_evaluate(const char* map_path, const char* ground_truth_path, int use_polygons, const char* out_path,
                      char** report_json) {
  if (!map_path || !ground_truth_path) return fail(PT_ERR_INVALID_ARGUMENT, "pt_evaluate: NULL argument");
  return guarded([&] {
    eval::EvalOptions opts;
    opts.use_polygons = use_polygons != 0;
    const eval::EvalReport rep = eval::evaluate(io::read_map(map_path), io::read_ground_truth(ground_truth_path), opts);
    const std::string text = rep.to_json();
    if (out_path) io::write_text(out_path, text);
    if (report_json) *report_json = dup_string(text);
    return PT_OK;
  });
}

pt_status pt_bench(const char* manifest_path, const pt_config* cfg, int repetitions, const char* out_path, char** csv) {
  if (!manifest_path) return fail(PT_ERR_INVALID_ARGUMENT, "pt_bench: NULL argument");
  return guarded([&] {
    const std::string text = bench(io::load_sequence(manifest_path), config_or_default(cfg), repetitions).to_csv();
    if (out_path) io::write_text(out_path, text);
    if (csv) *csv = dup_string(text);
    return PT_OK;
  });
}

}  // extern "C"
