#pragma once

// Small scene and file helpers shared by the tests.

#include "polyterrain/scene.hpp"
#include "polyterrain/types.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

namespace testkit {

namespace scene = polyterrain::scene;
using polyterrain::Vec3;

// Plane z = depth (camera frame of the identity pose), far larger than the
// field of view, facing the camera.
inline scene::GroundTruthPlane fronto_plane(int id, double depth, double half = 20.0) {
  return scene::make_rectangle(id, Vec3(-half, -half, depth), Vec3(0, 2 * half, 0), Vec3(2 * half, 0, 0));
}

// Five-step staircase and a pose that sees every tread and riser in full.
inline scene::Scene five_steps() { return scene::make_staircase(5, 0.17, 0.3, 1.0); }
inline polyterrain::CameraPose five_steps_pose() {
  return scene::look_at(Vec3(0.5, -1.2, 1.5), Vec3(0.5, 0.7, 0.3));
}

// Four-step staircase seen from close range.
inline scene::Scene four_steps() { return scene::make_staircase(4, 0.17, 0.3, 1.0); }
inline polyterrain::CameraPose four_steps_pose() {
  return scene::look_at(Vec3(0.5, -0.6, 1.4), Vec3(0.5, 0.5, 0.3));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("polyterrain_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testkit
