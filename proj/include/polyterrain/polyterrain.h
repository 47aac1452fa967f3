/* polyterrain C API.
 *
 * All functions return a pt_status; on failure pt_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Handles are opaque and owned by the caller once created; destroy functions
 * accept NULL. Strings returned through char** must be released with
 * pt_string_free. */
#ifndef POLYTERRAIN_H
#define POLYTERRAIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(POLYTERRAIN_BUILDING_LIBRARY)
#define PT_API __attribute__((visibility("default")))
#else
#define PT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pt_status {
  PT_OK = 0,
  PT_ERR_INVALID_ARGUMENT = 1, /* NULL handle, bad index, unknown key */
  PT_ERR_INPUT = 2,            /* missing file, malformed data, size mismatch */
  PT_ERR_CONTRACT = 3,         /* documented precondition violated */
  PT_ERR_IO = 4,               /* cannot write output */
  PT_ERR_INTERNAL = 5
} pt_status;

typedef struct pt_config pt_config;
typedef struct pt_mapper pt_mapper;
typedef struct pt_map pt_map;

typedef struct pt_intrinsics {
  double f, cx, cy;
  int width, height;
} pt_intrinsics;

typedef struct pt_region_info {
  double normal[3];
  double centroid[3];
  double mse;
  int64_t n_points;
  size_t contour_vertices;
  size_t holes;
  size_t polygons;
} pt_region_info;

PT_API const char* pt_version(void);
PT_API const char* pt_last_error(void);
PT_API const char* pt_status_name(pt_status status);
PT_API void pt_string_free(char* s);

/* Configuration. Keys: cell_size, seed_mse_max, discontinuity_max,
 * tau_theta, tau_b, raster_resolution, epsilon, foot_diameter,
 * refine_dist_max, min_region_cells. */
PT_API pt_status pt_config_create(pt_config** out);
PT_API pt_status pt_config_load_json(pt_config* cfg, const char* path);
PT_API pt_status pt_config_set(pt_config* cfg, const char* key, double value);
PT_API pt_status pt_config_get(const pt_config* cfg, const char* key, double* value);
PT_API void pt_config_destroy(pt_config* cfg);

/* Incremental mapping. cfg may be NULL for defaults. pose is
 * {tx, ty, tz, qw, qx, qy, qz}, world-from-camera. */
PT_API pt_status pt_mapper_create(const pt_intrinsics* intr, const pt_config* cfg, pt_mapper** out);
PT_API pt_status pt_mapper_add_frame(pt_mapper* m, const uint16_t* depth_mm, int width, int height,
                                     const double pose[7]);
PT_API pt_status pt_mapper_region_count(const pt_mapper* m, size_t* count);
PT_API pt_status pt_mapper_build_map(const pt_mapper* m, pt_map** out);
PT_API void pt_mapper_destroy(pt_mapper* m);

/* Maps. */
PT_API pt_status pt_map_read(const char* path, pt_map** out);
PT_API pt_status pt_map_write(const pt_map* map, const char* path);
PT_API pt_status pt_map_to_json(const pt_map* map, char** json);
PT_API pt_status pt_map_region_count(const pt_map* map, size_t* count);
PT_API pt_status pt_map_region_info(const pt_map* map, size_t index, pt_region_info* info);
/* Copies up to `cap` vertices of polygon `poly` of region `region` as xyz
 * triples; *count receives the vertex count. */
PT_API pt_status pt_map_polygon_vertices(const pt_map* map, size_t region, size_t poly, double* xyz, size_t cap,
                                         size_t* count);
PT_API void pt_map_destroy(pt_map* map);

/* File-level operations. Output paths may be NULL where a char** is given. */
PT_API pt_status pt_synth(const char* spec_path, const char* out_dir);
PT_API pt_status pt_segment(const char* manifest_path, size_t frame, const pt_config* cfg, const char* out_path,
                            size_t* regions);
PT_API pt_status pt_pipeline_run(const char* manifest_path, const pt_config* cfg, const char* out_path,
                                 pt_map** out_map);
PT_API pt_status pt_evaluate(const char* map_path, const char* ground_truth_path, int use_polygons,
                             const char* out_path, char** report_json);
PT_API pt_status pt_bench(const char* manifest_path, const pt_config* cfg, int repetitions, const char* out_path,
                          char** csv);

#ifdef __cplusplus
}
#endif

#endif /* POLYTERRAIN_H */
