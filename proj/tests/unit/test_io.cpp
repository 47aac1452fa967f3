#include "fixtures.hpp"

#include "polyterrain/error.hpp"
#include "polyterrain/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace polyterrain;
using polyterrain::io::read_pgm;
using polyterrain::io::write_pgm;
using Kind = InputError::Kind;

namespace {

template <class Fn>
Kind input_error_kind(Fn&& fn, std::string* subject = nullptr) {
  try {
    fn();
  } catch (const InputError& e) {
    if (subject) *subject = e.subject();
    return e.kind();
  }
  ADD_FAILURE() << "no InputError raised";
  return Kind::kIo;
}

PlanarMap sample_map() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  PlanarMap m;
  for (int r = 0; r < 3; ++r) {
    PlanarRegion reg;
    reg.normal = Vec3(u(rng), u(rng), u(rng)).normalized();
    reg.centroid = Vec3(u(rng), u(rng), u(rng));
    reg.mse = 1e-5 * (r + 1) / 3.0;
    reg.n_points = 1000 + r;
    for (int k = 0; k < 5; ++k) reg.contour.emplace_back(u(rng), u(rng), u(rng));
    if (r == 1) reg.holes.push_back({{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, {0.7, 0.8, 0.9}});
    m.regions.push_back(reg);
    std::vector<ConvexPolygon> polys;
    for (int p = 0; p < r; ++p) polys.push_back({reg.normal, {{u(rng), u(rng), 0}, {u(rng), 1.0 / 3.0, 0}, {0, 0, 0}}});
    m.polygons.push_back(polys);
  }
  return m;
}

}  // namespace

TEST(Pgm, RoundTrip16Bit) {
  testkit::TempDir dir("pgm");
  DepthImage d(7, 5);
  for (std::size_t i = 0; i < d.data.size(); ++i) d.data[i] = static_cast<double>(i * 1000 % 65536);
  d.data[3] = 65535.0;
  write_pgm(dir / "a.pgm", d);
  const DepthImage back = read_pgm(dir / "a.pgm");
  EXPECT_EQ(back.width, 7);
  EXPECT_EQ(back.height, 5);
  EXPECT_EQ(back.data, d.data);
}

TEST(Pgm, RoundsToMillimeters) {
  testkit::TempDir dir("pgm");
  DepthImage d(2, 1);
  d.data = {1234.4, 1234.6};
  write_pgm(dir / "r.pgm", d);
  EXPECT_EQ(read_pgm(dir / "r.pgm").data, (std::vector<double>{1234.0, 1235.0}));
}

TEST(Pgm, EightBitAndComments) {
  testkit::TempDir dir("pgm");
  io::write_text(dir / "g.pgm", std::string("P5\n# depth\n3 1\n255\n") + std::string("\x01\x02\xff", 3));
  EXPECT_EQ(read_pgm(dir / "g.pgm").data, (std::vector<double>{1.0, 2.0, 255.0}));
}

TEST(Pgm, Errors) {
  testkit::TempDir dir("pgm");
  std::string subject;
  EXPECT_EQ(input_error_kind([&] { read_pgm(dir / "absent.pgm"); }, &subject), Kind::kMissingFile);
  EXPECT_NE(subject.find("absent.pgm"), std::string::npos);
  io::write_text(dir / "p2.pgm", "P2\n1 1\n255\n0\n");
  EXPECT_EQ(input_error_kind([&] { read_pgm(dir / "p2.pgm"); }), Kind::kMalformed);
  io::write_text(dir / "short.pgm", "P5\n4 4\n65535\n\x01\x02");
  EXPECT_EQ(input_error_kind([&] { read_pgm(dir / "short.pgm"); }), Kind::kMalformed);
  io::write_text(dir / "hdr.pgm", "P5\nfour 4\n255\n");
  EXPECT_EQ(input_error_kind([&] { read_pgm(dir / "hdr.pgm"); }), Kind::kMalformed);
}

TEST(Manifest, FramesInOrderWithRelativePaths) {
  testkit::TempDir dir("manifest");
  CameraIntrinsics intr;
  intr.width = 4;
  intr.height = 3;
  intr.cx = 2.0;
  intr.cy = 1.5;
  std::vector<std::pair<std::string, CameraPose>> frames;
  for (int i = 0; i < 3; ++i) {
    DepthImage d(4, 3);
    std::fill(d.data.begin(), d.data.end(), 1000.0 + i);
    const std::string name = "f" + std::to_string(i) + ".pgm";
    write_pgm(dir / name, d);
    CameraPose p;
    p.translation = Vec3(i, 0, 0);
    p.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.1 * i, Vec3::UnitZ()));
    frames.emplace_back(name, p);
  }
  io::write_manifest(dir / "manifest.json", intr, frames);
  const io::Sequence seq = io::load_sequence(dir / "manifest.json");
  ASSERT_EQ(seq.frames.size(), 3u);
  EXPECT_EQ(seq.intrinsics.width, 4);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(seq.frames[i].depth.data[0], 1000.0 + i);
    EXPECT_LT((seq.frames[i].pose.translation - Vec3(i, 0, 0)).norm(), 1e-15);
    EXPECT_LT(seq.frames[i].pose.rotation.angularDistance(frames[i].second.rotation), 1e-12);
  }
  const io::Sequence lazy = io::load_sequence(dir / "manifest.json", false);
  EXPECT_EQ(lazy.frames.size(), 3u);
  EXPECT_TRUE(lazy.frames[0].depth.data.empty());
}

TEST(Manifest, Errors) {
  testkit::TempDir dir("manifest");
  std::string subject;
  EXPECT_EQ(input_error_kind([&] { io::load_sequence(dir / "none.json"); }), Kind::kMissingFile);

  io::write_manifest(dir / "missing.json", CameraIntrinsics{}, {{"gone.pgm", CameraPose{}}});
  EXPECT_EQ(input_error_kind([&] { io::load_sequence(dir / "missing.json"); }, &subject), Kind::kMissingFile);
  EXPECT_NE(subject.find("gone.pgm"), std::string::npos);

  write_pgm(dir / "small.pgm", DepthImage(320, 240));
  io::write_manifest(dir / "mismatch.json", CameraIntrinsics{}, {{"small.pgm", CameraPose{}}});
  EXPECT_EQ(input_error_kind([&] { io::load_sequence(dir / "mismatch.json"); }, &subject), Kind::kDimensionMismatch);
  EXPECT_NE(subject.find("small.pgm"), std::string::npos);

  io::write_text(dir / "broken.json", "{\"intrinsics\": {");
  EXPECT_EQ(input_error_kind([&] { io::load_sequence(dir / "broken.json"); }), Kind::kMalformed);

  io::write_text(dir / "nofr.json", R"({"intrinsics": {"f": 525, "cx": 319.5, "cy": 239.5, "width": 640, "height": 480}})");
  EXPECT_EQ(input_error_kind([&] { io::load_sequence(dir / "nofr.json"); }, &subject), Kind::kMalformed);
  EXPECT_NE(subject.find("frames"), std::string::npos);

  io::write_text(dir / "badq.json",
                 R"({"intrinsics": {"f": 525, "cx": 319.5, "cy": 239.5, "width": 640, "height": 480},
                    "frames": [{"depth": "small.pgm", "pose": {"t": [0, 0, 0], "q": [2, 0, 0, 0]}}]})");
  EXPECT_EQ(input_error_kind([&] { io::load_sequence(dir / "badq.json"); }, &subject), Kind::kMalformed);
  EXPECT_NE(subject.find(".q"), std::string::npos);
}

TEST(GroundTruth, RoundTrip) {
  testkit::TempDir dir("gt");
  const scene::Scene sc = testkit::five_steps();
  io::write_ground_truth(dir / "gt.json", sc);
  const scene::Scene back = io::read_ground_truth(dir / "gt.json");
  ASSERT_EQ(back.planes.size(), sc.planes.size());
  for (std::size_t i = 0; i < sc.planes.size(); ++i) {
    EXPECT_EQ(back.planes[i].id, sc.planes[i].id);
    EXPECT_LT((back.planes[i].normal - sc.planes[i].normal).norm(), 1e-15);
    EXPECT_EQ(back.planes[i].boundary, sc.planes[i].boundary);
  }
}

TEST(MapJson, RoundTripIsExact) {
  const PlanarMap m = sample_map();
  const std::string text = io::map_to_json(m);
  const PlanarMap back = io::map_from_json(text);
  ASSERT_EQ(back.regions.size(), m.regions.size());
  ASSERT_EQ(back.polygons.size(), m.polygons.size());
  for (std::size_t r = 0; r < m.regions.size(); ++r) {
    EXPECT_EQ(back.regions[r].normal, m.regions[r].normal);
    EXPECT_EQ(back.regions[r].centroid, m.regions[r].centroid);
    EXPECT_EQ(back.regions[r].mse, m.regions[r].mse);
    EXPECT_EQ(back.regions[r].n_points, m.regions[r].n_points);
    EXPECT_EQ(back.regions[r].contour, m.regions[r].contour);
    EXPECT_EQ(back.regions[r].holes, m.regions[r].holes);
    ASSERT_EQ(back.polygons[r].size(), m.polygons[r].size());
    for (std::size_t p = 0; p < m.polygons[r].size(); ++p)
      EXPECT_EQ(back.polygons[r][p].vertices, m.polygons[r][p].vertices);
  }
  EXPECT_EQ(io::map_to_json(back), text);
}

TEST(MapJson, FileRoundTripAndEmptyMap) {
  testkit::TempDir dir("map");
  io::write_map(dir / "m.json", PlanarMap{});
  EXPECT_TRUE(io::read_map(dir / "m.json").regions.empty());
  const PlanarMap m = sample_map();
  io::write_map(dir / "m.json", m);
  EXPECT_EQ(io::map_to_json(io::read_map(dir / "m.json")), io::map_to_json(m));
}

TEST(MapJson, MalformedIsRejected) {
  EXPECT_EQ(input_error_kind([] { io::map_from_json("{\"regions\": [{\"normal\": [1, 0]}]}"); }), Kind::kMalformed);
  EXPECT_EQ(input_error_kind([] { io::map_from_json("[]"); }), Kind::kMalformed);
}

TEST(ConfigJson, OverridesDefaults) {
  const PipelineConfig c = io::config_from_json(R"({"epsilon": 0.0016, "cell_size": 16})");
  EXPECT_EQ(c.epsilon, 0.0016);
  EXPECT_EQ(c.cell_size, 16);
  EXPECT_EQ(c.tau_b, PipelineConfig{}.tau_b);
  const PipelineConfig back = io::config_from_json(io::config_to_json(c));
  EXPECT_EQ(back.epsilon, c.epsilon);
  EXPECT_EQ(back.tau_theta, c.tau_theta);
}

TEST(ConfigJson, UnknownKeyAndBadValue) {
  EXPECT_EQ(input_error_kind([] { io::config_from_json(R"({"epsilom": 1})"); }), Kind::kMalformed);
  EXPECT_EQ(input_error_kind([] { io::config_from_json(R"({"epsilon": "big"})"); }), Kind::kMalformed);
  EXPECT_THROW(io::config_from_json(R"({"epsilon": -1})"), ContractViolation);
}

TEST(SynthSpec, ParsesSceneTypesAndPoses) {
  const io::SynthSpec s = io::synth_spec_from_json(R"({
    "scene": {"type": "staircase", "steps": 3, "rise": 0.17, "run": 0.3, "width": 1.0},
    "noise": {"sigma_at_2m": 0.008, "quantization": 1},
    "seed": 12,
    "poses": [{"eye": [0.5, -1, 1.5], "target": [0.5, 0.5, 0.3]}, {"t": [0, 0, 1], "q": [1, 0, 0, 0]}]})");
  EXPECT_EQ(s.scene.planes.size(), 6u);
  EXPECT_EQ(s.seed, 12u);
  EXPECT_EQ(s.noise.sigma_at_2m, 0.008);
  ASSERT_EQ(s.poses.size(), 2u);
  EXPECT_LT((s.poses[1].translation - Vec3(0, 0, 1)).norm(), 1e-15);

  const io::SynthSpec t = io::synth_spec_from_json(R"({
    "scene": {"type": "tile_wall", "rows": 2, "cols": 2, "tile_w": 0.5, "tile_h": 0.4, "y0": 1, "depth_step": 0.03},
    "poses": []})");
  EXPECT_EQ(t.scene.planes.size(), 4u);
  EXPECT_TRUE(t.poses.empty());
}

TEST(SynthSpec, Errors) {
  EXPECT_EQ(input_error_kind([] { io::synth_spec_from_json(R"({"scene": {"type": "dome"}, "poses": []})"); }),
            Kind::kMalformed);
  EXPECT_EQ(input_error_kind([] {
              io::synth_spec_from_json(
                  R"({"scene": {"type": "staircase", "steps": 0, "rise": 1, "run": 1, "width": 1}, "poses": []})");
            }),
            Kind::kMalformed);
  EXPECT_EQ(input_error_kind([] {
              io::synth_spec_from_json(R"({"scene": {"type": "staircase", "steps": 1, "rise": 1, "run": 1, "width": 1},
                                         "poses": [{"eye": [1, 1, 1], "target": [1, 1, 1]}]})");
            }),
            Kind::kMalformed);
}
