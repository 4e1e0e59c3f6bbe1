#include "wrapbench/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "wrapbench/error.hpp"

namespace wrapbench {

CameraModel default_camera() {
  CameraModel cam;
  Eigen::Matrix3d r;
  r.col(0) = Eigen::Vector3d(0, -1, 0);
  r.col(1) = Eigen::Vector3d(0, 0, -1);
  r.col(2) = Eigen::Vector3d(1, 0, 0);
  cam.world_from_camera.linear() = r;
  cam.world_from_camera.translation() = Eigen::Vector3d(0.0, 0.0, 0.162);
  return cam;
}

RodConfig rod_preset(int index) {
  RodConfig rod;
  switch (index) {
    case 1: rod.radius = 0.021; rod.hue = 215.0; break;
    case 2: rod.radius = 0.017; rod.hue = 150.0; break;
    default: throw Error(ErrorCode::InvalidConfig, "rod preset must be 1 or 2");
  }
  return rod;
}

RopeConfig rope_preset(int index) {
  RopeConfig rope;
  switch (index) {
    case 1:  // compliant and light
      rope.diameter = 0.006; rope.hue = 5.0; rope.alpha = 0.40; rope.beta = 0.0;
      break;
    case 2:
      rope.diameter = 0.008; rope.hue = 330.0; rope.alpha = 0.30; rope.beta = 0.0005;
      break;
    case 3:  // stiff: springs back and needs negative advances
      rope.diameter = 0.004; rope.hue = 45.0; rope.alpha = 0.08; rope.beta = 0.006;
      break;
    default: throw Error(ErrorCode::InvalidConfig, "rope preset must be 1, 2 or 3");
  }
  return rope;
}

WorldConfig world_preset(const std::string& name) {
  int rod = 0, rope = 0;
  if (std::sscanf(name.c_str(), "rod%d-rope%d", &rod, &rope) != 2)
    throw Error(ErrorCode::InvalidConfig, "unknown preset " + name);
  WorldConfig c;
  c.name = name;
  c.rod = rod_preset(rod);
  c.rope = rope_preset(rope);
  c.sensor.camera = default_camera();
  c.pre_wrap = rope == 3;
  return c;
}

std::vector<std::string> preset_names() {
  return {"rod1-rope1", "rod1-rope2", "rod1-rope3", "rod2-rope1", "rod2-rope2", "rod2-rope3"};
}

namespace {

Eigen::Vector3d parse_vec3(const std::string& key, const std::string& v) {
  Eigen::Vector3d out;
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  if (!(is >> out.x() >> out.y() >> out.z())) throw Error(ErrorCode::InvalidConfig, key + " needs three values");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, key + " is not a number: " + v);
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string vec3(const Eigen::Vector3d& v) {
  std::ostringstream os;
  os << std::setprecision(12) << v.x() << ',' << v.y() << ',' << v.z();
  return os.str();
}

}  // namespace

WorldConfig parse_config(std::istream& in, WorldConfig c) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + " has no '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    auto num = [&] { return parse_double(key, v); };
    auto& cam = c.sensor.camera;
    if (key == "preset") c = world_preset(v);
    else if (key == "name") c.name = v;
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(num());
    else if (key == "rod.radius") c.rod.radius = num();
    else if (key == "rod.length") c.rod.length = num();
    else if (key == "rod.center") c.rod.center = parse_vec3(key, v);
    else if (key == "rod.axis") c.rod.axis = parse_vec3(key, v).normalized();
    else if (key == "rod.hue") c.rod.hue = num();
    else if (key == "rod.saturation") c.rod.saturation = num();
    else if (key == "rope.diameter") c.rope.diameter = num();
    else if (key == "rope.hue") c.rope.hue = num();
    else if (key == "rope.saturation") c.rope.saturation = num();
    else if (key == "rope.alpha") c.rope.alpha = num();
    else if (key == "rope.beta") c.rope.beta = num();
    else if (key == "rope.kappa") c.rope.kappa = num();
    else if (key == "rope.length") c.rope.total_length = num();
    else if (key == "rope.shift_threshold") c.rope.shift_threshold = num();
    else if (key == "camera.position") cam.world_from_camera.translation() = parse_vec3(key, v);
    else if (key == "camera.fx") cam.intrinsics.fx = num();
    else if (key == "camera.fy") cam.intrinsics.fy = num();
    else if (key == "camera.cx") cam.intrinsics.cx = num();
    else if (key == "camera.cy") cam.intrinsics.cy = num();
    else if (key == "camera.width") cam.width = static_cast<int>(num());
    else if (key == "camera.height") cam.height = static_cast<int>(num());
    else if (key == "camera.depth_noise") c.sensor.depth_noise = num();
    else if (key == "camera.dropout_deg") c.sensor.dropout_deg = num();
    else if (key == "camera.hue_jitter") c.sensor.hue_jitter = num();
    else if (key == "workspace.lo") c.workspace.lo = parse_vec3(key, v);
    else if (key == "workspace.hi") c.workspace.hi = parse_vec3(key, v);
    else if (key == "scene.robot_plane_x") c.robot_plane_x = num();
    else if (key == "scene.table_z") c.table_z = num();
    else if (key == "scene.ride_over") c.ride_over = num();
    else if (key == "scenario.pre_wrap") c.pre_wrap = v == "1" || v == "true";
    else throw Error(ErrorCode::InvalidConfig, "unknown key " + key);
  }
  validate(c);
  return c;
}

WorldConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  WorldConfig base;
  base.sensor.camera = default_camera();
  return parse_config(in, base);
}

void write_config(std::ostream& out, const WorldConfig& c) {
  const auto& cam = c.sensor.camera;
  out << std::setprecision(12);
  out << "name = " << c.name << "\nseed = " << c.seed << '\n';
  out << "rod.radius = " << c.rod.radius << "\nrod.length = " << c.rod.length << "\nrod.center = "
      << vec3(c.rod.center) << "\nrod.axis = " << vec3(c.rod.axis) << "\nrod.hue = " << c.rod.hue
      << "\nrod.saturation = " << c.rod.saturation << '\n';
  out << "# rope response values are simulator calibration targets\n";
  out << "rope.diameter = " << c.rope.diameter << "\nrope.hue = " << c.rope.hue << "\nrope.saturation = "
      << c.rope.saturation << "\nrope.alpha = " << c.rope.alpha << "\nrope.beta = " << c.rope.beta
      << "\nrope.kappa = " << c.rope.kappa << "\nrope.length = " << c.rope.total_length
      << "\nrope.shift_threshold = " << c.rope.shift_threshold << '\n';
  out << "camera.position = " << vec3(cam.position()) << "\ncamera.fx = " << cam.intrinsics.fx
      << "\ncamera.fy = " << cam.intrinsics.fy << "\ncamera.cx = " << cam.intrinsics.cx
      << "\ncamera.cy = " << cam.intrinsics.cy << "\ncamera.width = " << cam.width
      << "\ncamera.height = " << cam.height << "\ncamera.depth_noise = " << c.sensor.depth_noise
      << "\ncamera.dropout_deg = " << c.sensor.dropout_deg << "\ncamera.hue_jitter = " << c.sensor.hue_jitter
      << '\n';
  out << "workspace.lo = " << vec3(c.workspace.lo) << "\nworkspace.hi = " << vec3(c.workspace.hi) << '\n';
  out << "scene.robot_plane_x = " << c.robot_plane_x << "\nscene.table_z = " << c.table_z
      << "\nscene.ride_over = " << c.ride_over << "\nscenario.pre_wrap = " << (c.pre_wrap ? 1 : 0) << '\n';
}

void validate(const WorldConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be positive");
  };
  positive(c.rod.radius, "rod.radius");
  positive(c.rod.length, "rod.length");
  positive(c.rope.diameter, "rope.diameter");
  positive(c.rope.total_length, "rope.length");
  positive(c.rope.alpha, "rope.alpha");
  if (c.rope.alpha > 1.0) throw Error(ErrorCode::InvalidConfig, "rope.alpha must not exceed 1");
  if (c.rope.beta < 0.0 || c.rope.kappa < 0.0) throw Error(ErrorCode::InvalidConfig, "beta and kappa are >= 0");
  if (c.sensor.camera.width <= 0 || c.sensor.camera.height <= 0)
    throw Error(ErrorCode::InvalidConfig, "camera size must be positive");
  if (std::fabs(c.ride_over) >= 0.5 * c.rod.length)
    throw Error(ErrorCode::InvalidConfig, "ride-over position is off the rod");
}

WrapState initial_state(const WorldConfig& config) {
  WrapState s;
  s.ride_over = config.ride_over;
  s.fixed_strand = config.ride_over;
  s.active_strand = config.ride_over + 0.03;
  s.total_nm = std::llround(config.rope.total_length * 1e9);
  return s;
}

namespace {
double strand_offset(const WorldConfig& c) { return 1.5 * c.rope.diameter + 0.005; }
}  // namespace

WrapState add_pre_wrap(WrapState state, const WorldConfig& config) {
  const double center = state.last_center() + config.rope.diameter;
  state.wraps.push_back({center, 0.0, 0.0, true});
  state.active_strand = center + strand_offset(config);
  state.pre_wrap = true;
  return state;
}

double consumed_length(double R, const WorldConfig& config) {
  const double contact = config.rod.radius + 0.5 * config.rope.diameter;
  return 2.0 * std::numbers::pi * std::clamp(contact, 0.9 * R, 1.1 * R);
}

WrapState execute_wrap(const WrapState& state, const WrapTrajectory& trajectory, const WorldConfig& config) {
  if (!trajectory.complete()) throw Error(ErrorCode::TrajectoryIncomplete, "pick, spiral and release are required");
  const auto& p = trajectory.params;
  if (state.total_nm - state.consumed_nm < std::llround(p.rope_length() * 1e9))
    throw Error(ErrorCode::RopeExhausted, "remaining rope is shorter than one wrap's reach");

  const auto& rope = config.rope;
  WrapState next = state;
  const double achieved = rope.alpha * p.a + rope.beta;
  Wrap w;
  w.gap = std::max(0.0, achieved - rope.diameter);
  w.contact = w.gap == 0.0;
  w.center = state.last_center() + std::max(rope.diameter, achieved);
  w.sag = rope.kappa * std::max(0.0, p.R - config.rod.radius);
  if (w.center + 0.5 * rope.diameter > 0.5 * config.rod.length)
    throw Error(ErrorCode::RodFull, "next wrap would leave the rod");

  if (state.executed == 0 && !state.pre_wrap && rope.beta > rope.shift_threshold)
    next.fixed_strand -= rope.beta;
  next.wraps.push_back(w);
  next.active_strand = w.center + strand_offset(config);
  next.consumed_nm += std::llround(consumed_length(p.R, config) * 1e9);
  next.consumed_nm = std::min(next.consumed_nm, next.total_nm);
  ++next.executed;
  return next;
}

bool reachable(const GripperPose& pose, const WorldConfig& config) { return config.workspace(pose); }

// --- rendering -----------------------------------------------------------------

namespace {

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  Label label = Label::Background;
};

struct Box {
  Eigen::Vector3d lo, hi;
  Label label;
};

std::optional<Hit> hit_cylinder(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const Eigen::Vector3d& c,
                                const Eigen::Vector3d& axis, double r, double half_len) {
  const Eigen::Vector3d w = o - c;
  const Eigen::Vector3d dp = d - d.dot(axis) * axis;
  const Eigen::Vector3d wp = w - w.dot(axis) * axis;
  const double qa = dp.squaredNorm();
  const double qb = 2.0 * dp.dot(wp);
  const double qc = wp.squaredNorm() - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (qa < 1e-15 || disc < 0.0) return std::nullopt;
  const double t = (-qb - std::sqrt(disc)) / (2.0 * qa);
  if (t <= 0.0) return std::nullopt;
  const Eigen::Vector3d p = w + t * d;
  if (std::fabs(p.dot(axis)) > half_len) return std::nullopt;
  Hit h;
  h.t = t;
  h.normal = (p - p.dot(axis) * axis) / r;
  return h;
}

std::optional<Hit> hit_box(const Eigen::Vector3d& o, const Eigen::Vector3d& d, const Box& b) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  int face = -1;
  double sign = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (std::fabs(d[k]) < 1e-15) {
      if (o[k] < b.lo[k] || o[k] > b.hi[k]) return std::nullopt;
      continue;
    }
    double ta = (b.lo[k] - o[k]) / d[k], tb = (b.hi[k] - o[k]) / d[k];
    double s = -1.0;
    if (ta > tb) {
      std::swap(ta, tb);
      s = 1.0;
    }
    if (ta > t0) {
      t0 = ta;
      face = k;
      sign = s;
    }
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  if (face < 0) return std::nullopt;
  Hit h;
  h.t = t0;
  h.normal = Eigen::Vector3d::Zero();
  h.normal[face] = sign;
  h.label = b.label;
  return h;
}

std::vector<Box> scene_boxes(const WorldConfig& c) {
  // Posts carry the rod at its ends without covering it.
  const double rx = c.rod.center.x();
  const double end = 0.5 * c.rod.length;
  return {
      {{rx - 0.01, end, c.table_z}, {rx + 0.01, end + 0.02, c.rod.center.z()}, Label::Support},
      {{rx - 0.01, -end - 0.02, c.table_z}, {rx + 0.01, -end, c.rod.center.z()}, Label::Support},
      {{0.50, -0.10, 0.28}, {0.58, 0.0, 0.34}, Label::RobotArm},
      {{c.robot_plane_x + 0.05, -0.30, c.table_z}, {c.robot_plane_x + 0.35, 0.30, 0.50}, Label::RobotBody},
  };
}

struct Shade {
  double hue, sat, value;
};

Shade base_color(Label label, const WorldConfig& c, double cos_inc) {
  switch (label) {
    case Label::Rod: return {c.rod.hue, c.rod.saturation, 0.25 + 0.7 * cos_inc};
    case Label::Support: return {30.0, 0.2, 0.3 + 0.4 * cos_inc};
    case Label::RobotArm: return {0.0, 0.0, 0.55};
    case Label::RobotBody: return {220.0, 0.05, 0.35};
    case Label::Table: return {40.0, 0.1, 0.45};
    default: return {0.0, 0.0, 0.0};
  }
}

class Renderer {
 public:
  Renderer(const WrapState& state, const WorldConfig& config)
      : s_(state), c_(config), cam_(config.sensor.camera), rng_(seed_for(state, config)) {
    out_.color = HsvImage(cam_.width, cam_.height);
    out_.depth = DepthImage(cam_.width, cam_.height, 0);
    out_.labels = Raster<std::uint8_t>(cam_.width, cam_.height, 0);
    out_.map.width = cam_.width;
    out_.map.height = cam_.height;
    out_.map.intrinsics = cam_.intrinsics;
    points_ = Raster<Eigen::Vector3d>(cam_.width, cam_.height, Eigen::Vector3d::Zero());
    valid_ = Raster<std::uint8_t>(cam_.width, cam_.height, 0);
    cos_dropout_ = std::cos(c_.sensor.dropout_deg * std::numbers::pi / 180.0);
    scale_ = cam_.scale_at_depth(cam_.depth_of(c_.rod.center)) / 1000.0;  // px per mm
  }

  Frame run() {
    surfaces();
    if (s_.has_rope) rope_overlays();
    for (int y = 0; y < cam_.height; ++y)
      for (int x = 0; x < cam_.width; ++x) {
        if (!valid_(x, y)) continue;
        const Eigen::Vector3d pc = cam_.world_from_camera.inverse() * points_(x, y);
        const double mm = std::round(pc.z() * 1000.0);
        out_.depth(x, y) = static_cast<std::uint16_t>(std::clamp(mm, 0.0, 65535.0));
        out_.map.samples.push_back({pc, Pixel(x, y), out_.color(x, y)});
      }
    return std::move(out_);
  }

 private:
  static std::uint64_t seed_for(const WrapState& s, const WorldConfig& c) {
    return c.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(s.executed) * 1000003ull +
           static_cast<std::uint64_t>(s.wraps.size());
  }

  double jitter() { return c_.sensor.hue_jitter > 0 ? hue_noise_(rng_) * c_.sensor.hue_jitter : 0.0; }
  double depth_noise() { return c_.sensor.depth_noise > 0 ? hue_noise_(rng_) * c_.sensor.depth_noise : 0.0; }

  // Stores a surface sample; depth is dropped at grazing incidence.
  void store(int x, int y, const Eigen::Vector3d& o, const Eigen::Vector3d& d, double t, double cos_inc) {
    const double noise = depth_noise();
    if (cos_inc < cos_dropout_) {
      valid_(x, y) = 0;
      return;
    }
    points_(x, y) = o + (t + noise) * d;
    valid_(x, y) = 1;
  }

  void surfaces() {
    const auto boxes = scene_boxes(c_);
    const Eigen::Vector3d o = cam_.position();
    const Eigen::Vector3d axis = c_.rod.axis.normalized();
    for (int y = 0; y < cam_.height; ++y)
      for (int x = 0; x < cam_.width; ++x) {
        const Eigen::Vector3d d = cam_.ray(x, y);
        Hit best;
        if (auto h = hit_cylinder(o, d, c_.rod.center, axis, c_.rod.radius, 0.5 * c_.rod.length)) {
          best = *h;
          best.label = Label::Rod;
        }
        for (const auto& b : boxes)
          if (auto h = hit_box(o, d, b); h && h->t < best.t) best = *h;
        if (d.z() < 0.0) {
          const double t = (c_.table_z - o.z()) / d.z();
          const Eigen::Vector3d p = o + t * d;
          if (t < best.t && p.x() > 0.05 && p.x() < 1.2 && std::fabs(p.y()) < 0.8) {
            best.t = t;
            best.normal = Eigen::Vector3d::UnitZ();
            best.label = Label::Table;
          }
        }
        if (best.label == Label::Background) continue;
        const double cos_inc = std::max(0.0, -best.normal.dot(d));
        Shade sh = base_color(best.label, c_, cos_inc);
        if (best.label == Label::Rod) sh.hue += jitter();
        out_.color(x, y) = {normalize_hue(sh.hue), sh.sat, std::clamp(sh.value, 0.0, 1.0)};
        out_.labels(x, y) = static_cast<std::uint8_t>(best.label);
        store(x, y, o, d, best.t, cos_inc);
      }
  }

  int band_start(double axial, int width) const {
    const Eigen::Vector3d p = c_.rod.center + axial * c_.rod.axis.normalized();
    const auto uv = cam_.project(p);
    return static_cast<int>(std::lround(uv->x() - 0.5 * width));
  }

  void paint_rope(int x, int y, double value) {
    out_.color(x, y) = {normalize_hue(c_.rope.hue + jitter()), c_.rope.saturation, value};
    out_.labels(x, y) = static_cast<std::uint8_t>(Label::Rope);
  }

  void rope_overlays() {
    const int w = std::max(1, static_cast<int>(std::lround(c_.rope.diameter * 1000.0 * scale_)));
    const Eigen::Vector3d o = cam_.position();
    const Eigen::Vector3d axis = c_.rod.axis.normalized();

    // Lowest rod row of every column, before rope covers anything.
    std::vector<int> rod_bottom(cam_.width, -1);
    for (int x = 0; x < cam_.width; ++x)
      for (int y = 0; y < cam_.height; ++y)
        if (out_.labels(x, y) == static_cast<std::uint8_t>(Label::Rod)) rod_bottom[x] = y;

    auto band = [&](double axial) {
      const int x0 = band_start(axial, w);
      for (int x = std::max(0, x0); x < std::min(cam_.width, x0 + w); ++x)
        for (int y = 0; y < cam_.height; ++y) {
          if (out_.labels(x, y) != static_cast<std::uint8_t>(Label::Rod)) continue;
          const Eigen::Vector3d d = cam_.ray(x, y);
          const auto h = hit_cylinder(o, d, c_.rod.center, axis, c_.rod.radius + c_.rope.diameter,
                                      0.5 * c_.rod.length + c_.rope.diameter);
          const double t = h ? h->t : (points_(x, y) - o).norm();
          const double cos_inc = h ? std::max(0.0, -h->normal.dot(d)) : 0.0;
          paint_rope(x, y, 0.35 + 0.55 * cos_inc);
          store(x, y, o, d, t, cos_inc);
        }
    };

    Eigen::Vector3d plane_n = axis.cross(Eigen::Vector3d::UnitZ()).normalized();
    auto hang = [&](double axial, int width, int rows) {
      const int x0 = band_start(axial, width);
      for (int x = std::max(0, x0); x < std::min(cam_.width, x0 + width); ++x) {
        if (rod_bottom[x] < 0) continue;
        const int last = rows < 0 ? cam_.height - 1 : std::min(cam_.height - 1, rod_bottom[x] + rows);
        for (int y = rod_bottom[x] + 1; y <= last; ++y) {
          const Eigen::Vector3d d = cam_.ray(x, y);
          const double t = (c_.rod.center - o).dot(plane_n) / d.dot(plane_n);
          paint_rope(x, y, 0.8);
          store(x, y, o, d, t, std::fabs(d.dot(plane_n)));
        }
      }
    };

    band(s_.ride_over);
    for (const auto& wr : s_.wraps) band(wr.center);
    hang(s_.fixed_strand, w, -1);
    hang(s_.active_strand, w, -1);
    if (!s_.wraps.empty() && s_.wraps.back().sag > 0.0) {
      const int rows = static_cast<int>(std::lround(s_.wraps.back().sag * 1000.0 * scale_));
      if (rows > 0) hang(s_.wraps.back().center, std::max(1, w / 2), rows);
    }
  }

  const WrapState& s_;
  const WorldConfig& c_;
  const CameraModel& cam_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> hue_noise_{0.0, 1.0};
  Frame out_;
  Raster<Eigen::Vector3d> points_;
  Raster<std::uint8_t> valid_;
  double cos_dropout_ = 0.0;
  double scale_ = 2.0;
};

}  // namespace

Frame render(const WrapState& state, const WorldConfig& config) { return Renderer(state, config).run(); }

// --- state dump ------------------------------------------------------------------

std::string dump_state(const WrapState& s) {
  nlohmann::json j;
  j["ride_over"] = s.ride_over;
  j["fixed_strand"] = s.fixed_strand;
  j["active_strand"] = s.active_strand;
  j["pre_wrap"] = s.pre_wrap;
  j["has_rope"] = s.has_rope;
  j["executed"] = s.executed;
  j["total_nm"] = s.total_nm;
  j["consumed_nm"] = s.consumed_nm;
  j["wraps"] = nlohmann::json::array();
  for (const auto& w : s.wraps)
    j["wraps"].push_back({{"center", w.center}, {"sag", w.sag}, {"gap", w.gap}, {"contact", w.contact}});
  return j.dump(2);
}

WrapState load_state(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    WrapState s;
    s.ride_over = j.at("ride_over").get<double>();
    s.fixed_strand = j.at("fixed_strand").get<double>();
    s.active_strand = j.at("active_strand").get<double>();
    s.pre_wrap = j.at("pre_wrap").get<bool>();
    s.has_rope = j.value("has_rope", true);
    s.executed = j.at("executed").get<int>();
    s.total_nm = j.at("total_nm").get<std::int64_t>();
    s.consumed_nm = j.at("consumed_nm").get<std::int64_t>();
    for (const auto& w : j.at("wraps"))
      s.wraps.push_back({w.at("center").get<double>(), w.at("sag").get<double>(), w.at("gap").get<double>(),
                         w.at("contact").get<bool>()});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad state dump: ") + e.what());
  }
}

}  // namespace wrapbench
