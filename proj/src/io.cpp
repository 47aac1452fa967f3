#include "polyterrain/io.hpp"

#include "polyterrain/error.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace polyterrain::io {

namespace fs = std::filesystem;
using nlohmann::json;
using Kind = InputError::Kind;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(Kind::kMissingFile, path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(Kind::kIo, path.string(), "cannot write file");
  out << text;
  if (!out) throw InputError(Kind::kIo, path.string(), "write failed");
}

// ---------------------------------------------------------------------------
// PGM

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int pgm_int(std::istream& in, const fs::path& path, const char* field) {
  const std::string tok = pgm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw InputError(Kind::kMalformed, path.string() + " (" + field + ")", "malformed PGM header");
  }
}

}  // namespace

DepthImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(Kind::kMissingFile, path.string(), "missing depth file");
  if (pgm_token(in) != "P5") throw InputError(Kind::kMalformed, path.string(), "not a binary PGM (P5)");
  const int w = pgm_int(in, path, "width");
  const int h = pgm_int(in, path, "height");
  const int maxval = pgm_int(in, path, "maxval");
  if (maxval > 65535) throw InputError(Kind::kMalformed, path.string() + " (maxval)", "malformed PGM header");
  // pgm_token consumed exactly one whitespace byte after maxval.
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw InputError(Kind::kMalformed, path.string(), "truncated PGM payload");
  DepthImage d(w, h);
  for (std::size_t i = 0; i < n; ++i) {
    d.data[i] = bytes_per == 2 ? static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
  }
  return d;
}

void write_pgm(const fs::path& path, const DepthImage& depth) {
  depth.validate();
  std::ostringstream header;
  header << "P5\n" << depth.width << ' ' << depth.height << "\n65535\n";
  std::string buf = header.str();
  buf.reserve(buf.size() + depth.data.size() * 2);
  for (double v : depth.data) {
    const auto s = static_cast<std::uint16_t>(std::lround(v));
    buf.push_back(static_cast<char>(s >> 8));
    buf.push_back(static_cast<char>(s & 0xff));
  }
  write_text(path, buf);
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(Kind::kMalformed, origin, std::string("invalid JSON (") + e.what() + ")");
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw InputError(Kind::kMalformed, where + "." + key, "missing field");
  return obj.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(Kind::kMalformed, where, "expected a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw InputError(Kind::kMalformed, where, "expected [x, y, z]");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Loop3 loop3(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(Kind::kMalformed, where, "expected a vertex list");
  Loop3 out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec3(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json to_json(const Loop3& loop) {
  json a = json::array();
  for (const Vec3& v : loop) a.push_back(to_json(v));
  return a;
}

CameraPose pose_from(const json& j, const std::string& where) {
  CameraPose p;
  p.translation = vec3(field(j, "t", where), where + ".t");
  const json& q = field(j, "q", where);
  if (!q.is_array() || q.size() != 4) throw InputError(Kind::kMalformed, where + ".q", "expected [w, x, y, z]");
  p.rotation = Eigen::Quaterniond(number(q[0], where + ".q"), number(q[1], where + ".q"), number(q[2], where + ".q"),
                                  number(q[3], where + ".q"));
  if (std::abs(p.rotation.norm() - 1.0) > 1e-6)
    throw InputError(Kind::kMalformed, where + ".q", "quaternion is not unit length");
  p.rotation.normalize();
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

Sequence load_sequence(const fs::path& manifest_path, bool load_depth) {
  const json doc = parse_json(read_text(manifest_path), manifest_path.string());
  const std::string where = manifest_path.string();
  Sequence seq;
  const json& in = field(doc, "intrinsics", where);
  const std::string iw = where + ":intrinsics";
  seq.intrinsics.f = number(field(in, "f", iw), iw + ".f");
  seq.intrinsics.cx = number(field(in, "cx", iw), iw + ".cx");
  seq.intrinsics.cy = number(field(in, "cy", iw), iw + ".cy");
  seq.intrinsics.width = static_cast<int>(number(field(in, "width", iw), iw + ".width"));
  seq.intrinsics.height = static_cast<int>(number(field(in, "height", iw), iw + ".height"));
  try {
    seq.intrinsics.validate();
  } catch (const ContractViolation& e) {
    throw InputError(Kind::kMalformed, iw, e.what());
  }
  const json& frames = field(doc, "frames", where);
  if (!frames.is_array()) throw InputError(Kind::kMalformed, where + ":frames", "expected an array");
  const fs::path base = manifest_path.parent_path();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string fw = where + ":frames[" + std::to_string(i) + "]";
    Frame fr;
    const json& d = field(frames[i], "depth", fw);
    if (!d.is_string()) throw InputError(Kind::kMalformed, fw + ".depth", "expected a path");
    fr.depth_path = fs::path(d.get<std::string>());
    if (fr.depth_path.is_relative()) fr.depth_path = base / fr.depth_path;
    fr.pose = pose_from(field(frames[i], "pose", fw), fw + ".pose");
    if (load_depth) {
      if (!fs::exists(fr.depth_path))
        throw InputError(Kind::kMissingFile, fr.depth_path.string(), "missing depth file");
      fr.depth = read_pgm(fr.depth_path);
      if (fr.depth.width != seq.intrinsics.width || fr.depth.height != seq.intrinsics.height) {
        throw InputError(Kind::kDimensionMismatch, fr.depth_path.string(),
                         "depth is " + std::to_string(fr.depth.width) + "x" + std::to_string(fr.depth.height) +
                             " but intrinsics are " + std::to_string(seq.intrinsics.width) + "x" +
                             std::to_string(seq.intrinsics.height));
      }
    }
    seq.frames.push_back(std::move(fr));
  }
  return seq;
}

void write_manifest(const fs::path& manifest_path, const CameraIntrinsics& intr,
                    const std::vector<std::pair<std::string, CameraPose>>& frames) {
  json doc;
  doc["intrinsics"] = {{"f", intr.f}, {"cx", intr.cx}, {"cy", intr.cy}, {"width", intr.width}, {"height", intr.height}};
  doc["frames"] = json::array();
  for (const auto& [path, pose] : frames) {
    const auto& q = pose.rotation;
    doc["frames"].push_back(
        {{"depth", path}, {"pose", {{"t", to_json(pose.translation)}, {"q", json::array({q.w(), q.x(), q.y(), q.z()})}}}});
  }
  write_text(manifest_path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Ground truth

scene::Scene read_ground_truth(const fs::path& path) {
  const json doc = parse_json(read_text(path), path.string());
  const std::string where = path.string();
  const json& planes = field(doc, "planes", where);
  if (!planes.is_array()) throw InputError(Kind::kMalformed, where + ":planes", "expected an array");
  scene::Scene s;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const std::string pw = where + ":planes[" + std::to_string(i) + "]";
    scene::GroundTruthPlane p;
    p.id = static_cast<int>(number(field(planes[i], "id", pw), pw + ".id"));
    p.normal = vec3(field(planes[i], "normal", pw), pw + ".normal").normalized();
    p.boundary = loop3(field(planes[i], "boundary", pw), pw + ".boundary");
    if (p.boundary.size() < 3) throw InputError(Kind::kMalformed, pw + ".boundary", "needs at least 3 vertices");
    s.planes.push_back(std::move(p));
  }
  return s;
}

void write_ground_truth(const fs::path& path, const scene::Scene& s) {
  json doc;
  doc["planes"] = json::array();
  for (const auto& p : s.planes)
    doc["planes"].push_back({{"id", p.id}, {"normal", to_json(p.normal)}, {"boundary", to_json(p.boundary)}});
  write_text(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Map

std::string map_to_json(const PlanarMap& map) {
  json doc;
  doc["regions"] = json::array();
  for (std::size_t i = 0; i < map.regions.size(); ++i) {
    const PlanarRegion& r = map.regions[i];
    json jr;
    jr["normal"] = to_json(r.normal);
    jr["centroid"] = to_json(r.centroid);
    jr["mse"] = r.mse;
    jr["n_points"] = r.n_points;
    jr["contour"] = to_json(r.contour);
    jr["holes"] = json::array();
    for (const Loop3& h : r.holes) jr["holes"].push_back(to_json(h));
    jr["polygons"] = json::array();
    if (i < map.polygons.size())
      for (const ConvexPolygon& c : map.polygons[i]) jr["polygons"].push_back({{"vertices", to_json(c.vertices)}});
    doc["regions"].push_back(std::move(jr));
  }
  return doc.dump(1) + "\n";
}

PlanarMap map_from_json(const std::string& text, const std::string& origin) {
  const json doc = parse_json(text, origin);
  const json& regions = field(doc, "regions", origin);
  if (!regions.is_array()) throw InputError(Kind::kMalformed, origin + ":regions", "expected an array");
  PlanarMap map;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string rw = origin + ":regions[" + std::to_string(i) + "]";
    const json& jr = regions[i];
    PlanarRegion r;
    r.normal = vec3(field(jr, "normal", rw), rw + ".normal");
    r.centroid = vec3(field(jr, "centroid", rw), rw + ".centroid");
    r.mse = number(field(jr, "mse", rw), rw + ".mse");
    const json& np = field(jr, "n_points", rw);
    if (!np.is_number_integer()) throw InputError(Kind::kMalformed, rw + ".n_points", "expected an integer");
    r.n_points = np.get<std::int64_t>();
    r.contour = loop3(field(jr, "contour", rw), rw + ".contour");
    if (jr.contains("holes")) {
      const json& holes = jr.at("holes");
      for (std::size_t h = 0; h < holes.size(); ++h)
        r.holes.push_back(loop3(holes[h], rw + ".holes[" + std::to_string(h) + "]"));
    }
    std::vector<ConvexPolygon> polys;
    if (jr.contains("polygons")) {
      const json& jp = jr.at("polygons");
      for (std::size_t k = 0; k < jp.size(); ++k) {
        const std::string pw = rw + ".polygons[" + std::to_string(k) + "]";
        ConvexPolygon c;
        c.normal = r.normal;
        c.vertices = loop3(field(jp[k], "vertices", pw), pw + ".vertices");
        polys.push_back(std::move(c));
      }
    }
    map.regions.push_back(std::move(r));
    map.polygons.push_back(std::move(polys));
  }
  return map;
}

void write_map(const fs::path& path, const PlanarMap& map) { write_text(path, map_to_json(map)); }

PlanarMap read_map(const fs::path& path) { return map_from_json(read_text(path), path.string()); }

// ---------------------------------------------------------------------------
// Config

PipelineConfig config_from_json(const std::string& text, const std::string& origin) {
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) throw InputError(Kind::kMalformed, origin, "config must be a JSON object");
  PipelineConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    const std::string where = origin + "." + key;
    if (key == "cell_size") cfg.cell_size = static_cast<int>(number(value, where));
    else if (key == "seed_mse_max") cfg.seed_mse_max = number(value, where);
    else if (key == "discontinuity_max") cfg.discontinuity_max = number(value, where);
    else if (key == "tau_theta") cfg.tau_theta = number(value, where);
    else if (key == "tau_b") cfg.tau_b = number(value, where);
    else if (key == "raster_resolution") cfg.raster_resolution = number(value, where);
    else if (key == "epsilon") cfg.epsilon = number(value, where);
    else if (key == "foot_diameter") cfg.foot_diameter = number(value, where);
    else if (key == "refine_dist_max") cfg.refine_dist_max = number(value, where);
    else if (key == "min_region_cells") cfg.min_region_cells = static_cast<int>(number(value, where));
    else throw InputError(Kind::kMalformed, where, "unknown config key");
  }
  cfg.validate();
  return cfg;
}

PipelineConfig read_config(const fs::path& path) { return config_from_json(read_text(path), path.string()); }

std::string config_to_json(const PipelineConfig& c) {
  json doc = {{"cell_size", c.cell_size},
              {"seed_mse_max", c.seed_mse_max},
              {"discontinuity_max", c.discontinuity_max},
              {"tau_theta", c.tau_theta},
              {"tau_b", c.tau_b},
              {"raster_resolution", c.raster_resolution},
              {"epsilon", c.epsilon},
              {"foot_diameter", c.foot_diameter},
              {"refine_dist_max", c.refine_dist_max},
              {"min_region_cells", c.min_region_cells}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Synthetic dataset spec

namespace {

double opt_number(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), where + "." + key);
}

scene::Scene scene_from(const json& js, const std::string& where) {
  const json& type = field(js, "type", where);
  if (!type.is_string()) throw InputError(Kind::kMalformed, where + ".type", "expected a string");
  const std::string t = type.get<std::string>();
  auto num = [&](const char* key) { return number(field(js, key, where), where + "." + key); };
  auto positive = [&](const char* key) {
    const double v = num(key);
    if (!(v > 0.0)) throw InputError(Kind::kMalformed, where + "." + key, "must be positive");
    return v;
  };
  if (t == "staircase") {
    const int steps = static_cast<int>(positive("steps"));
    return scene::make_staircase(steps, positive("rise"), positive("run"), positive("width"));
  }
  if (t == "tile_wall") {
    return scene::make_tile_wall(static_cast<int>(positive("rows")), static_cast<int>(positive("cols")),
                                 positive("tile_w"), positive("tile_h"), num("y0"), num("depth_step"));
  }
  if (t == "planes") {
    const json& planes = field(js, "planes", where);
    if (!planes.is_array()) throw InputError(Kind::kMalformed, where + ".planes", "expected an array");
    scene::Scene s;
    for (std::size_t i = 0; i < planes.size(); ++i) {
      const std::string pw = where + ".planes[" + std::to_string(i) + "]";
      scene::GroundTruthPlane p;
      p.id = planes[i].contains("id") ? static_cast<int>(number(planes[i].at("id"), pw + ".id")) : static_cast<int>(i);
      p.normal = vec3(field(planes[i], "normal", pw), pw + ".normal").normalized();
      p.boundary = loop3(field(planes[i], "boundary", pw), pw + ".boundary");
      if (p.boundary.size() < 3) throw InputError(Kind::kMalformed, pw + ".boundary", "needs at least 3 vertices");
      s.planes.push_back(std::move(p));
    }
    return s;
  }
  throw InputError(Kind::kMalformed, where + ".type", "unknown scene type '" + t + "'");
}

}  // namespace

SynthSpec synth_spec_from_json(const std::string& text, const std::string& origin) {
  const json doc = parse_json(text, origin);
  SynthSpec spec;
  spec.scene = scene_from(field(doc, "scene", origin), origin + ":scene");
  if (doc.contains("intrinsics")) {
    const json& in = doc.at("intrinsics");
    const std::string iw = origin + ":intrinsics";
    spec.intrinsics.f = opt_number(in, "f", spec.intrinsics.f, iw);
    spec.intrinsics.cx = opt_number(in, "cx", spec.intrinsics.cx, iw);
    spec.intrinsics.cy = opt_number(in, "cy", spec.intrinsics.cy, iw);
    spec.intrinsics.width = static_cast<int>(opt_number(in, "width", spec.intrinsics.width, iw));
    spec.intrinsics.height = static_cast<int>(opt_number(in, "height", spec.intrinsics.height, iw));
    try {
      spec.intrinsics.validate();
    } catch (const ContractViolation& e) {
      throw InputError(Kind::kMalformed, iw, e.what());
    }
  }
  if (doc.contains("noise")) {
    const json& n = doc.at("noise");
    const std::string nw = origin + ":noise";
    spec.noise.sigma_at_2m = opt_number(n, "sigma_at_2m", 0.0, nw);
    spec.noise.quantization = opt_number(n, "quantization", 0.0, nw);
    if (spec.noise.sigma_at_2m < 0.0 || spec.noise.quantization < 0.0)
      throw InputError(Kind::kMalformed, nw, "noise parameters must be non-negative");
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw InputError(Kind::kMalformed, origin + ":seed", "expected a non-negative integer");
    spec.seed = s.get<std::uint64_t>();
  }
  const json& poses = field(doc, "poses", origin);
  if (!poses.is_array()) throw InputError(Kind::kMalformed, origin + ":poses", "expected an array");
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const std::string pw = origin + ":poses[" + std::to_string(i) + "]";
    if (poses[i].contains("eye")) {
      const Vec3 eye = vec3(poses[i].at("eye"), pw + ".eye");
      const Vec3 target = vec3(field(poses[i], "target", pw), pw + ".target");
      if ((target - eye).norm() < 1e-9) throw InputError(Kind::kMalformed, pw, "eye and target coincide");
      spec.poses.push_back(scene::look_at(eye, target));
    } else {
      spec.poses.push_back(pose_from(poses[i], pw));
    }
  }
  return spec;
}

SynthSpec read_synth_spec(const fs::path& path) { return synth_spec_from_json(read_text(path), path.string()); }

}  // namespace polyterrain::io
