#ifndef WRAPBENCH_SIMWORLD_HPP
#define WRAPBENCH_SIMWORLD_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wrapbench/imaging.hpp"
#include "wrapbench/wrap_planner.hpp"

namespace wrapbench {

// World frame: x from the camera toward the robot, z up, table at z = 0.

struct RodConfig {
  double radius = 0.021;
  double length = 0.28;
  Eigen::Vector3d center{0.40, 0.0, 0.25};
  Eigen::Vector3d axis{0.0, -1.0, 0.0};  // toward the free end
  double hue = 215.0;
  double saturation = 0.7;
};

/// alpha, beta and kappa are calibration targets for the simulator, not
/// measured rope properties.
struct RopeConfig {
  double diameter = 0.006;
  double hue = 5.0;
  double saturation = 0.8;
  double alpha = 0.40;   // compliance: achieved advance = alpha * a + beta
  double beta = 0.0;     // springback, m
  double kappa = 1.0;    // sag per metre of spiral radius beyond the rod
  double total_length = 1.0;
  double shift_threshold = 0.003;  // first-wrap springback above this drags the fixed section
};

struct SensorConfig {
  CameraModel camera;
  double depth_noise = 0.001;  // m, along the ray
  double dropout_deg = 80.0;   // no depth beyond this incidence angle
  double hue_jitter = 2.0;     // degrees
};

struct WorldConfig {
  std::string name = "rod1-rope1";
  RodConfig rod;
  RopeConfig rope;
  SensorConfig sensor;
  WorkspaceBox workspace{Eigen::Vector3d(0.15, -0.45, 0.05), Eigen::Vector3d(0.65, 0.45, 0.55)};
  double robot_plane_x = 0.60;
  double table_z = 0.0;
  double ride_over = -0.08;  // axial position where the rope first crosses the rod
  bool pre_wrap = false;     // scenario default; the harness may force it on
  std::uint64_t seed = 1;
};

/// Camera at (0, 0, 0.162) looking along +x, 2 px/mm at the rod axis.
CameraModel default_camera();

RodConfig rod_preset(int index);    // 1 or 2
RopeConfig rope_preset(int index);  // 1, 2 or 3
/// "rodN-ropeM".
WorldConfig world_preset(const std::string& name);
std::vector<std::string> preset_names();

/// key=value lines, '#' comments. Unknown keys are InvalidConfig.
WorldConfig parse_config(std::istream& in, WorldConfig base = {});
WorldConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const WorldConfig& config);
void validate(const WorldConfig& config);

struct Wrap {
  double center = 0.0;  // axial, m
  double sag = 0.0;     // m below the rod bottom
  double gap = 0.0;     // m to the previous wrap
  bool contact = true;
};

struct WrapState {
  double ride_over = 0.0;
  double fixed_strand = 0.0;
  double active_strand = 0.0;
  std::vector<Wrap> wraps;  // a pre-wrap, when present, is the first entry
  bool pre_wrap = false;
  bool has_rope = true;  // false renders the bare rod
  int executed = 0;
  std::int64_t total_nm = 0;
  std::int64_t consumed_nm = 0;

  double remaining() const { return static_cast<double>(total_nm - consumed_nm) * 1e-9; }
  double consumed() const { return static_cast<double>(consumed_nm) * 1e-9; }
  /// Axial centre of the newest band, the ride-over band when unwrapped.
  double last_center() const { return wraps.empty() ? ride_over : wraps.back().center; }
};

WrapState initial_state(const WorldConfig& config);
/// Contact wrap next to the ride-over band; keeps a stiff rope's first wrap
/// from dragging the fixed section.
WrapState add_pre_wrap(WrapState state, const WorldConfig& config);

/// Rope consumed by one wrap at spiral radius R.
double consumed_length(double R, const WorldConfig& config);

WrapState execute_wrap(const WrapState& state, const WrapTrajectory& trajectory, const WorldConfig& config);

enum class Label : std::uint8_t { Background, Rod, Rope, Support, RobotArm, RobotBody, Table };

struct Frame {
  HsvImage color;
  DepthImage depth;
  ColorizedDepthMap map;  // camera frame
  Raster<std::uint8_t> labels;
};

/// Deterministic for a given (state, config).
Frame render(const WrapState& state, const WorldConfig& config);

bool reachable(const GripperPose& pose, const WorldConfig& config);

std::string dump_state(const WrapState& state);
WrapState load_state(const std::string& json);

}  // namespace wrapbench

#endif  // WRAPBENCH_SIMWORLD_HPP
