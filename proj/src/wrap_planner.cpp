#include "wrapbench/wrap_planner.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "wrapbench/error.hpp"

namespace wrapbench {

Eigen::Isometry3d rod_frame(const Eigen::Vector3d& center, const Eigen::Vector3d& axis, double axial_offset) {
  const Eigen::Vector3d z = axis.normalized();
  Eigen::Vector3d down = -Eigen::Vector3d::UnitZ();
  down -= down.dot(z) * z;
  if (down.norm() < 1e-9) throw Error(ErrorCode::DegenerateGeometry, "rod axis is vertical");
  const Eigen::Vector3d y = down.normalized();
  Eigen::Isometry3d frame = Eigen::Isometry3d::Identity();
  frame.linear().col(0) = y.cross(z);
  frame.linear().col(1) = y;
  frame.linear().col(2) = z;
  frame.translation() = center + axial_offset * z;
  return frame;
}

int SpiralParams::sample_count() const {
  const double lever = rope_length();
  const double speed = std::hypot(lever, a / (2.0 * std::numbers::pi));
  const int needed = static_cast<int>(std::ceil(2.0 * std::numbers::pi * speed / max_step)) + 1;
  return std::max(min_samples, needed);
}

GripperPose spiral_point(const SpiralParams& params, double theta) {
  GripperPose pose;
  pose.theta = theta;
  pose.position = params.frame * spiral_local(params.R, params.a, params.l_prime, theta);
  const Eigen::Vector3d axis = params.frame.linear().col(2);
  pose.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(theta, axis)) * params.base_orientation;
  return pose;
}

std::vector<GripperPose> build_spiral(const SpiralParams& params, const ReachabilityModel& reach) {
  if (!(params.R > 0.0)) throw Error(ErrorCode::InvalidConfig, "spiral radius must be positive");
  const int n = params.sample_count();
  std::vector<GripperPose> out;
  out.reserve(static_cast<std::size_t>(n) - 2);
  for (int i = 1; i + 1 < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / (n - 1);
    auto pose = spiral_point(params, theta);
    if (!reach(pose)) {
      std::ostringstream os;
      os << "spiral sample at theta=" << theta << " rad is outside the workspace";
      throw Error(ErrorCode::Unreachable, os.str());
    }
    out.push_back(pose);
  }
  return out;
}

double search_safe_distance(SpiralParams params, double lo, double hi, const ReachabilityModel& reach,
                            double step) {
  if (!(lo > 0.0) || hi < lo || !(step > 0.0)) throw Error(ErrorCode::InvalidConfig, "bad safe-distance bounds");
  const int steps = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    params.l_prime = hi - k * step;
    try {
      build_spiral(params, reach);
      return params.l_prime;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unreachable) throw;
    }
  }
  throw Error(ErrorCode::NoFeasibleSafeDistance, "no safe distance in bounds is reachable");
}

double shrink_radius_until_reachable(SpiralParams params, double r_rod, const ReachabilityModel& reach,
                                     double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidConfig, "radius step must be positive");
  while (params.R >= 0.5 * r_rod) {
    try {
      build_spiral(params, reach);
      return params.R;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Unreachable) throw;
    }
    params.R -= step;
  }
  throw Error(ErrorCode::RadiusUnderflow, "spiral radius fell below half the rod radius");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Pick: return "pick";
    case Phase::Spiral: return "spiral";
    case Phase::Release: return "release";
    case Phase::Align: return "align";
  }
  return "?";
}

const std::vector<GripperPose>& WrapTrajectory::phase(Phase p) const {
  switch (p) {
    case Phase::Pick: return pick;
    case Phase::Spiral: return spiral;
    case Phase::Release: return release;
    default: return align;
  }
}

Eigen::Quaterniond grasp_orientation(const Eigen::Vector3d& approach, const Eigen::Vector3d& axis) {
  const Eigen::Vector3d z = approach.normalized();
  Eigen::Vector3d x = axis - axis.dot(z) * z;
  x.normalize();
  Eigen::Matrix3d m;
  m.col(0) = x;
  m.col(1) = z.cross(x);
  m.col(2) = z;
  return Eigen::Quaterniond(m).normalized();
}

WrapTrajectory auxiliary_waypoints(const GraspPose& grasp, std::vector<GripperPose> spiral,
                                   const SpiralParams& params, const RodEstimate& rod, double remaining_rope,
                                   const AuxiliaryOptions& options) {
  WrapTrajectory t;
  t.params = params;
  t.spiral = std::move(spiral);
  if (t.spiral.empty()) return t;

  const Eigen::Quaterniond hold = grasp_orientation(grasp.approach, rod.axis);
  GripperPose entry{grasp.position - options.entry_offset * grasp.approach, hold, 0.0};
  GripperPose at_grasp{grasp.position, hold, 0.0};
  t.pick = {entry, at_grasp, t.spiral.front()};

  const GripperPose& last = t.spiral.back();
  GripperPose straight = last;
  straight.position.z() -= params.l_prime;
  GripperPose withdraw = straight;
  withdraw.position -= options.entry_offset * grasp.approach;
  t.release = {last, straight, withdraw};

  const double rod_height = rod.center.z() - rod.radius - options.table_z;
  if (remaining_rope > rod_height) {
    GripperPose turned = withdraw;
    turned.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi / 2, grasp.approach)) *
                         withdraw.orientation;
    GripperPose push = turned;
    // Toward the robot, away from the rope side.
    push.position -= options.push_distance * grasp.approach;
    t.align = {withdraw, turned, push};
  }
  return t;
}

void write_trajectory(std::ostream& out, const WrapTrajectory& trajectory) {
  const auto& p = trajectory.params;
  out << std::setprecision(12);
  out << "# params R=" << p.R << " a=" << p.a << " Lprime=" << p.l_prime << '\n';
  for (const Phase phase : {Phase::Pick, Phase::Spiral, Phase::Release, Phase::Align})
    for (const auto& pose : trajectory.phase(phase)) {
      const auto& q = pose.orientation;
      out << to_string(phase) << ' ' << pose.theta << ' ' << pose.position.x() << ' ' << pose.position.y() << ' '
          << pose.position.z() << ' ' << q.w() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z() << '\n';
    }
}

WrapTrajectory read_trajectory(std::istream& in) {
  WrapTrajectory t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const double value = std::stod(tok.substr(eq + 1));
        if (key == "R") t.params.R = value;
        else if (key == "a") t.params.a = value;
        else if (key == "Lprime") t.params.l_prime = value;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string phase;
    GripperPose pose;
    double qw, qx, qy, qz;
    if (!(ls >> phase >> pose.theta >> pose.position.x() >> pose.position.y() >> pose.position.z() >> qw >> qx >>
          qy >> qz))
      throw Error(ErrorCode::Io, "malformed trajectory line: " + line);
    pose.orientation = Eigen::Quaterniond(qw, qx, qy, qz);
    if (phase == "pick") t.pick.push_back(pose);
    else if (phase == "spiral") t.spiral.push_back(pose);
    else if (phase == "release") t.release.push_back(pose);
    else if (phase == "align") t.align.push_back(pose);
    else throw Error(ErrorCode::Io, "unknown trajectory phase: " + phase);
  }
  return t;
}

}  // namespace wrapbench
