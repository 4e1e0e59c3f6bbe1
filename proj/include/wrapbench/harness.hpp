#ifndef WRAPBENCH_HARNESS_HPP
#define WRAPBENCH_HARNESS_HPP

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wrapbench/error.hpp"
#include "wrapbench/feedback.hpp"
#include "wrapbench/rod_estimation.hpp"
#include "wrapbench/rope_estimation.hpp"
#include "wrapbench/rope_tracing.hpp"
#include "wrapbench/simworld.hpp"
#include "wrapbench/wrap_planner.hpp"

namespace wrapbench {

struct RunOptions {
  int max_wraps = 8;
  std::optional<bool> pre_wrap;  // unset: the scenario's default
  bool unravel = false;          // restore the rope before every wrap, keep the controller
  bool frozen = false;           // after learning, replay the final (R, a) without updates
  double a0 = 0.020;
  double l_prime_min = 0.020;
  double l_prime_max = 0.060;
  double radius_step = 0.005;
  std::shared_ptr<const MaskProvider> m1_provider;  // hue threshold when null
  std::filesystem::path out_dir;                    // no artifacts when empty
};

struct Perception {
  RodEstimate rod;
  RopeEstimate rope;
  double pixels_per_mm = 0.0;
};

/// Camera-frame samples moved into the world frame.
ColorizedDepthMap world_map(const Frame& frame, const WorldConfig& config);

/// Rod and rope estimation on one frame.
Perception perceive(const Frame& frame, const WorldConfig& config);

struct PlanResult {
  double R = 0.0;
  double l_prime = 0.0;
};

/// R from 1.5 r_rod shrunk until reachable at L'_max, then the largest
/// feasible L'.
PlanResult initial_plan(const RodEstimate& rod, const WorldConfig& config, const RunOptions& options);

struct WrapRecord {
  int n = 0;
  double R = 0.0;  // parameters the wrap was executed with
  double a = 0.0;
  WrapQuality quality;
  FeedbackState after;
  Eigen::Vector3d grasp = Eigen::Vector3d::Zero();
  double cycle_seconds = 0.0;  // perceive + plan + evaluate, rendering excluded
  std::string frame;
};

struct RunRecord {
  std::string scenario;
  Perception perception;
  double l_prime = 0.0;
  std::vector<WrapRecord> wraps;
  std::vector<WrapRecord> test_wraps;  // frozen replay
  int wraps_to_convergence = 0;        // 0 when not converged
  double final_R = 0.0;
  double final_a = 0.0;
  WrapState final_state;

  bool converged() const { return wraps_to_convergence > 0; }
};

/// Full loop. Returns the record whether or not it converged.
RunRecord run_loop(const WorldConfig& config, const RunOptions& options);
/// As run_loop, but throws NonConvergence when max_wraps is exhausted.
RunRecord run_scenario(const WorldConfig& config, const RunOptions& options);

struct ScenarioOutcome {
  std::string name;
  std::optional<RunRecord> record;
  std::optional<ErrorCode> error;
  std::string message;
};

std::vector<ScenarioOutcome> run_many(const std::vector<WorldConfig>& configs, const RunOptions& options,
                                      bool parallel);

/// Table with one row per record: a_i per trial in mm, then "(complete)".
void write_report(std::ostream& out, const std::vector<RunRecord>& records);
void write_record_csv(std::ostream& out, const RunRecord& record);
/// Scenario name and a_i values as CSV, the inverse of read_summary.
void write_summary(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_summary(std::istream& in);

/// 0 converged, 2 NonConvergence, 3 perception, 4 planning, 1 anything else.
int exit_code(ErrorCode code);

}  // namespace wrapbench

#endif  // WRAPBENCH_HARNESS_HPP
