// Command-line front end: perception, planning and simulation steps one at a
// time, or the full closed loop over one or more scenarios.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wrapbench/harness.hpp"
#include "wrapbench/image_io.hpp"

using namespace wrapbench;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> presets;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c, bool many) {
  cmd->add_option("--config", c.config, "key=value world file");
  if (many)
    cmd->add_option("--preset", c.presets, "preset name (rodN-ropeM), repeatable, or 'all'");
  else
    cmd->add_option("--preset", c.presets, "preset name (rodN-ropeM)")->expected(1);
  cmd->add_option("--seed", c.seed, "noise seed");
  cmd->add_option("--out-dir", c.out_dir, "artifact directory");
}

std::vector<WorldConfig> configs_of(const Common& c) {
  std::vector<WorldConfig> out;
  if (!c.config.empty()) out.push_back(load_config(c.config));
  for (const auto& p : c.presets) {
    if (p == "all")
      for (const auto& name : preset_names()) out.push_back(world_preset(name));
    else
      out.push_back(world_preset(p));
  }
  if (out.empty()) out.push_back(world_preset("rod1-rope1"));
  if (c.seed)
    for (auto& w : out) w.seed = *c.seed;
  return out;
}

WorldConfig single(const Common& c) {
  auto all = configs_of(c);
  if (all.size() != 1) throw Error(ErrorCode::Usage, "this command takes exactly one scenario");
  return all.front();
}

std::filesystem::path ensure_dir(const std::string& dir) {
  if (dir.empty()) return {};
  std::filesystem::create_directories(dir);
  return dir;
}

WrapState state_from(const std::string& path, const WorldConfig& config) {
  if (path.empty()) return initial_state(config);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_state(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop rope wrapping workbench"};
  app.require_subcommand(1);

  Common rod_c, rope_c, plan_c, sim_c, run_c;
  std::string state_path, traj_path;
  auto* rod_cmd = app.add_subcommand("estimate-rod", "estimate the rod from a rendered or loaded frame");
  add_common(rod_cmd, rod_c, false);
  std::string points_path;
  rod_cmd->add_option("--points", points_path, "camera-frame point list instead of a render");

  auto* rope_cmd = app.add_subcommand("estimate-rope", "estimate rope hue range and diameter");
  add_common(rope_cmd, rope_c, false);

  auto* plan_cmd = app.add_subcommand("plan", "plan the next wrap trajectory");
  add_common(plan_cmd, plan_c, false);
  plan_cmd->add_option("--state", state_path, "state JSON (initial state when omitted)");

  auto* sim_cmd = app.add_subcommand("simulate-wrap", "execute a trajectory file in the simulator");
  add_common(sim_cmd, sim_c, false);
  sim_cmd->add_option("--trajectory", traj_path, "trajectory file")->required();
  sim_cmd->add_option("--state", state_path, "state JSON (initial state when omitted)");

  RunOptions run_opts;
  bool pre_wrap = false, parallel = false;
  auto* run_cmd = app.add_subcommand("run", "full closed loop");
  add_common(run_cmd, run_c, true);
  run_cmd->add_option("--max-wraps", run_opts.max_wraps, "wrap budget")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--pre-wrap", pre_wrap, "leave one contact wrap on the rod first");
  run_cmd->add_flag("--unravel", run_opts.unravel, "restore the rope before every wrap");
  run_cmd->add_flag("--frozen", run_opts.frozen, "replay the learned parameters after convergence");
  run_cmd->add_flag("--parallel", parallel, "one worker thread per scenario");

  std::vector<std::string> summaries;
  auto* report_cmd = app.add_subcommand("report", "convergence table from run summaries");
  report_cmd->add_option("summaries", summaries, "summary.csv files written by run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rod_cmd) {
      const auto config = single(rod_c);
      Frame frame;
      if (!points_path.empty()) frame.map = load_point_list(points_path);
      else frame = render(initial_state(config), config);
      RodPipelineOptions opts;
      opts.robot_plane_x = config.robot_plane_x;
      opts.table_z = config.table_z + 0.01;
      const auto rod = estimate_rod(world_map(frame, config), config.sensor.camera, opts);
      std::cout << to_record(rod) << '\n';
      return 0;
    }
    if (*rope_cmd) {
      const auto config = single(rope_c);
      const auto p = perceive(render(initial_state(config), config), config);
      std::cout << to_record(p.rope) << " d_mm=" << p.rope.diameter_mm << '\n';
      return 0;
    }
    if (*plan_cmd) {
      const auto config = single(plan_c);
      const auto p = perceive(render(initial_state(config), config), config);
      RunOptions opts;
      const auto plan = initial_plan(p.rod, config, opts);
      const WrapState state = state_from(state_path, config);
      const Frame frame = render(state, config);
      const auto trace = trace_rope(frame.color, p.rod, p.rope, config.sensor.camera,
                                    HueMaskProvider(p.rope), config.table_z);
      SpiralParams params;
      params.R = plan.R;
      params.a = opts.a0;
      params.l_prime = plan.l_prime;
      params.frame = rod_frame(p.rod.center, p.rod.axis, (trace.sections.tangent_active - p.rod.center).dot(p.rod.axis));
      const auto grasp = grasp_point(trace.sections, {Section::Active, params.rope_length()}, p.rod,
                                     config.sensor.camera, p.pixels_per_mm);
      params.base_orientation = grasp_orientation(grasp.approach, p.rod.axis);
      const ReachabilityModel reach = [&](const GripperPose& pose) { return reachable(pose, config); };
      const auto traj = auxiliary_waypoints(grasp, build_spiral(params, reach), params, p.rod, state.remaining());
      if (const auto dir = ensure_dir(plan_c.out_dir); !dir.empty()) {
        std::ofstream out(dir / "trajectory.txt");
        write_trajectory(out, traj);
      } else {
        write_trajectory(std::cout, traj);
      }
      return 0;
    }
    if (*sim_cmd) {
      const auto config = single(sim_c);
      std::ifstream tin(traj_path);
      if (!tin) throw Error(ErrorCode::Io, "cannot read " + traj_path);
      const auto next = execute_wrap(state_from(state_path, config), read_trajectory(tin), config);
      if (const auto dir = ensure_dir(sim_c.out_dir); !dir.empty()) {
        const Frame frame = render(next, config);
        save_ppm(dir / "frame.ppm", to_rgb(frame.color));
        save_pgm16(dir / "depth.pgm", frame.depth);
        save_point_list(dir / "points.txt", frame.map);
        std::ofstream(dir / "state.json") << dump_state(next) << '\n';
      }
      std::cout << dump_state(next) << '\n';
      return 0;
    }
    if (*run_cmd) {
      if (pre_wrap) run_opts.pre_wrap = true;
      run_opts.out_dir = run_c.out_dir;
      const auto outcomes = run_many(configs_of(run_c), run_opts, parallel);
      std::vector<RunRecord> records;
      int code = 0;
      for (const auto& o : outcomes) {
        if (o.record) records.push_back(*o.record);
        if (o.error) {
          std::cerr << o.message << '\n';
          code = std::max(code, exit_code(*o.error));
        }
      }
      if (!records.empty()) write_report(std::cout, records);
      if (const auto dir = ensure_dir(run_c.out_dir); !dir.empty()) {
        std::ofstream s(dir / "summary.csv");
        write_summary(s, records);
      }
      return code;
    }
    if (*report_cmd) {
      std::vector<RunRecord> records;
      for (const auto& path : summaries) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
        auto part = read_summary(in);
        records.insert(records.end(), part.begin(), part.end());
      }
      write_report(std::cout, records);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code(e.code());
  }
  return 1;
}
