// Exercises the shared library through its C header only.

#include "polyterrain/polyterrain.h"

#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

class CApi : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("polyterrain_capi_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  // Three-frame staircase dataset in <dir>/data.
  std::string dataset() const {
    write("spec.json", R"({
      "scene": {"type": "staircase", "steps": 4, "rise": 0.17, "run": 0.3, "width": 1.0},
      "noise": {"sigma_at_2m": 0.008, "quantization": 1.0},
      "seed": 1,
      "poses": [{"eye": [0.5, -0.6, 1.4], "target": [0.5, 0.5, 0.3]},
                {"eye": [0.45, -0.62, 1.42], "target": [0.5, 0.5, 0.3]},
                {"eye": [0.55, -0.58, 1.38], "target": [0.5, 0.52, 0.3]}]})");
    EXPECT_EQ(pt_synth(path("spec.json").c_str(), path("data").c_str()), PT_OK) << pt_last_error();
    return path("data/manifest.json");
  }

  fs::path dir_;
};

const double kIdentity[7] = {0, 0, 0, 1, 0, 0, 0};

}  // namespace

TEST_F(CApi, VersionAndStatusNames) {
  ASSERT_NE(pt_version(), nullptr);
  EXPECT_GT(std::strlen(pt_version()), 0u);
  EXPECT_STREQ(pt_status_name(PT_OK), "ok");
  EXPECT_NE(std::string(pt_status_name(PT_ERR_CONTRACT)), std::string(pt_status_name(PT_ERR_INPUT)));
}

TEST_F(CApi, ConfigSetGet) {
  pt_config* cfg = nullptr;
  ASSERT_EQ(pt_config_create(&cfg), PT_OK);
  double v = 0.0;
  ASSERT_EQ(pt_config_get(cfg, "epsilon", &v), PT_OK);
  EXPECT_DOUBLE_EQ(v, 9e-4);
  ASSERT_EQ(pt_config_set(cfg, "epsilon", 16e-4), PT_OK);
  ASSERT_EQ(pt_config_get(cfg, "epsilon", &v), PT_OK);
  EXPECT_DOUBLE_EQ(v, 16e-4);
  ASSERT_EQ(pt_config_set(cfg, "cell_size", 16), PT_OK);
  ASSERT_EQ(pt_config_get(cfg, "cell_size", &v), PT_OK);
  EXPECT_EQ(v, 16.0);

  EXPECT_EQ(pt_config_set(cfg, "nope", 1.0), PT_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::string(pt_last_error()).find("nope"), std::string::npos);
  EXPECT_EQ(pt_config_get(cfg, "nope", &v), PT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pt_config_set(cfg, "tau_b", -1.0), PT_ERR_CONTRACT);
  ASSERT_EQ(pt_config_get(cfg, "tau_b", &v), PT_OK);
  EXPECT_DOUBLE_EQ(v, 0.02);
  pt_config_destroy(cfg);
}

TEST_F(CApi, ConfigFromFile) {
  pt_config* cfg = nullptr;
  ASSERT_EQ(pt_config_create(&cfg), PT_OK);
  write("cfg.json", R"({"foot_diameter": 0.06})");
  ASSERT_EQ(pt_config_load_json(cfg, path("cfg.json").c_str()), PT_OK);
  double v = 0.0;
  pt_config_get(cfg, "foot_diameter", &v);
  EXPECT_DOUBLE_EQ(v, 0.06);
  write("bad.json", R"({"foot": 0.06})");
  EXPECT_EQ(pt_config_load_json(cfg, path("bad.json").c_str()), PT_ERR_INPUT);
  write("neg.json", R"({"foot_diameter": -0.06})");
  EXPECT_EQ(pt_config_load_json(cfg, path("neg.json").c_str()), PT_ERR_CONTRACT);
  EXPECT_EQ(pt_config_load_json(cfg, path("absent.json").c_str()), PT_ERR_INPUT);
  pt_config_destroy(cfg);
}

TEST_F(CApi, NullArgumentsAndDestroyNull) {
  EXPECT_EQ(pt_config_create(nullptr), PT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pt_config_set(nullptr, "epsilon", 1.0), PT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pt_mapper_create(nullptr, nullptr, nullptr), PT_ERR_INVALID_ARGUMENT);
  size_t n = 0;
  EXPECT_EQ(pt_map_region_count(nullptr, &n), PT_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(pt_pipeline_run(nullptr, nullptr, nullptr, nullptr), PT_ERR_INVALID_ARGUMENT);
  pt_config_destroy(nullptr);
  pt_mapper_destroy(nullptr);
  pt_map_destroy(nullptr);
  pt_string_free(nullptr);
}

TEST_F(CApi, MapperOnFrontoParallelWall) {
  const pt_intrinsics intr{525.0, 319.5, 239.5, 640, 480};
  pt_mapper* m = nullptr;
  ASSERT_EQ(pt_mapper_create(&intr, nullptr, &m), PT_OK);
  std::vector<uint16_t> depth(640 * 480, 1800);
  ASSERT_EQ(pt_mapper_add_frame(m, depth.data(), 640, 480, kIdentity), PT_OK) << pt_last_error();
  size_t count = 0;
  ASSERT_EQ(pt_mapper_region_count(m, &count), PT_OK);
  EXPECT_EQ(count, 1u);
  EXPECT_EQ(pt_mapper_add_frame(m, depth.data(), 320, 240, kIdentity), PT_ERR_CONTRACT);
  const double bad_pose[7] = {0, 0, 0, 2, 0, 0, 0};
  EXPECT_EQ(pt_mapper_add_frame(m, depth.data(), 640, 480, bad_pose), PT_ERR_CONTRACT);

  pt_map* map = nullptr;
  ASSERT_EQ(pt_mapper_build_map(m, &map), PT_OK);
  pt_region_info info;
  ASSERT_EQ(pt_map_region_info(map, 0, &info), PT_OK);
  EXPECT_NEAR(info.normal[2], -1.0, 1e-9);
  EXPECT_NEAR(info.centroid[2], 1.8, 1e-9);
  EXPECT_EQ(info.n_points, 640 * 480);
  EXPECT_EQ(info.polygons, 1u);
  EXPECT_EQ(pt_map_region_info(map, 1, &info), PT_ERR_INVALID_ARGUMENT);

  size_t nv = 0;
  ASSERT_EQ(pt_map_polygon_vertices(map, 0, 0, nullptr, 0, &nv), PT_OK);
  ASSERT_GE(nv, 3u);
  std::vector<double> xyz(3 * nv);
  ASSERT_EQ(pt_map_polygon_vertices(map, 0, 0, xyz.data(), nv, &nv), PT_OK);
  for (size_t i = 0; i < nv; ++i) EXPECT_NEAR(xyz[3 * i + 2], 1.8, 1e-9);
  EXPECT_EQ(pt_map_polygon_vertices(map, 0, 5, xyz.data(), nv, &nv), PT_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(pt_map_write(map, path("wall.json").c_str()), PT_OK);
  pt_map* back = nullptr;
  ASSERT_EQ(pt_map_read(path("wall.json").c_str(), &back), PT_OK);
  char* a = nullptr;
  char* b = nullptr;
  ASSERT_EQ(pt_map_to_json(map, &a), PT_OK);
  ASSERT_EQ(pt_map_to_json(back, &b), PT_OK);
  EXPECT_STREQ(a, b);
  pt_string_free(a);
  pt_string_free(b);
  pt_map_destroy(back);
  pt_map_destroy(map);
  pt_mapper_destroy(m);
}

TEST_F(CApi, FileLevelOperations) {
  const std::string manifest = dataset();
  size_t regions = 0;
  ASSERT_EQ(pt_segment(manifest.c_str(), 0, nullptr, path("seg.json").c_str(), &regions), PT_OK) << pt_last_error();
  EXPECT_GE(regions, 6u);
  EXPECT_EQ(pt_segment(manifest.c_str(), 3, nullptr, path("seg.json").c_str(), &regions), PT_ERR_INVALID_ARGUMENT);

  pt_map* map = nullptr;
  ASSERT_EQ(pt_pipeline_run(manifest.c_str(), nullptr, path("map.json").c_str(), &map), PT_OK) << pt_last_error();
  size_t n = 0;
  pt_map_region_count(map, &n);
  EXPECT_EQ(n, 8u);
  pt_map_destroy(map);

  char* report = nullptr;
  ASSERT_EQ(pt_evaluate(path("map.json").c_str(), path("data/ground_truth.json").c_str(), 1, nullptr, &report), PT_OK);
  ASSERT_NE(report, nullptr);
  EXPECT_NE(std::string(report).find("mean_iou"), std::string::npos);
  pt_string_free(report);

  char* csv = nullptr;
  ASSERT_EQ(pt_bench(manifest.c_str(), nullptr, 2, path("bench.csv").c_str(), &csv), PT_OK);
  EXPECT_EQ(std::string(csv).rfind("frame,planes,seg_ms,merge_ms,approx_ms,total_ms,rep0_ms,rep1_ms\n", 0), 0u);
  pt_string_free(csv);
  EXPECT_TRUE(fs::exists(path("bench.csv")));
  EXPECT_EQ(pt_bench(manifest.c_str(), nullptr, 0, nullptr, nullptr), PT_ERR_CONTRACT);
}

TEST_F(CApi, InputErrors) {
  EXPECT_EQ(pt_pipeline_run(path("none.json").c_str(), nullptr, path("m.json").c_str(), nullptr), PT_ERR_INPUT);
  EXPECT_NE(std::string(pt_last_error()).find("none.json"), std::string::npos);
  write("broken.json", "{");
  EXPECT_EQ(pt_synth(path("broken.json").c_str(), path("out").c_str()), PT_ERR_INPUT);
  write("nogt.json", R"({"planes": []})");
  write("empty_map.json", R"({"regions": []})");
  EXPECT_EQ(pt_evaluate(path("empty_map.json").c_str(), path("nogt.json").c_str(), 0, nullptr, nullptr), PT_ERR_INPUT);
  EXPECT_EQ(pt_map_write(nullptr, path("x.json").c_str()), PT_ERR_INVALID_ARGUMENT);
}
