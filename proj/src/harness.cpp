#include "wrapbench/harness.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "wrapbench/image_io.hpp"

namespace wrapbench {

ColorizedDepthMap world_map(const Frame& frame, const WorldConfig& config) {
  return transform_points(frame.map, config.sensor.camera.world_from_camera);
}

Perception perceive(const Frame& frame, const WorldConfig& config) {
  const auto& cam = config.sensor.camera;
  RodPipelineOptions rod_options;
  rod_options.robot_plane_x = config.robot_plane_x;
  rod_options.table_z = config.table_z + 0.01;
  Perception p;
  p.rod = estimate_rod(world_map(frame, config), cam, rod_options);
  p.pixels_per_mm = cam.scale_at_depth(cam.depth_of(p.rod.center)) / 1000.0;
  p.rope = estimate_rope(p.rod.region, frame.map.width, frame.map.height, p.pixels_per_mm);
  return p;
}

PlanResult initial_plan(const RodEstimate& rod, const WorldConfig& config, const RunOptions& options) {
  const ReachabilityModel reach = [&](const GripperPose& pose) { return reachable(pose, config); };
  SpiralParams params;
  params.frame = rod_frame(rod.center, rod.axis, 0.0);
  params.a = options.a0;
  params.l_prime = options.l_prime_max;
  params.R = 1.5 * rod.radius;
  PlanResult out;
  out.R = shrink_radius_until_reachable(params, rod.radius, reach, options.radius_step);
  params.R = out.R;
  out.l_prime = search_safe_distance(params, options.l_prime_min, options.l_prime_max, reach);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string wrap_name(const char* stem, int n, const char* ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(2) << std::setfill('0') << n << ext;
  return os.str();
}

class Loop {
 public:
  Loop(const WorldConfig& config, const RunOptions& options) : c_(config), o_(options) {
    if (!o_.out_dir.empty()) {
      dir_ = o_.out_dir / c_.name;
      std::filesystem::create_directories(dir_);
    }
  }

  RunRecord run() {
    RunRecord rec;
    rec.scenario = c_.name;
    WrapState start = initial_state(c_);
    const Frame first = render(start, c_);
    rec.perception = perceive(first, c_);
    const auto& rod = rec.perception.rod;
    const auto& rope = rec.perception.rope;
    if (!dir_.empty()) {
      save_ppm(dir_ / "initial.ppm", to_rgb(first.color));
      save_pgm16(dir_ / "initial_depth.pgm", first.depth);
      save_point_list(dir_ / "initial_points.txt", first.map);
    }

    if (o_.pre_wrap.value_or(c_.pre_wrap)) start = add_pre_wrap(start, c_);
    const PlanResult plan = initial_plan(rod, c_, o_);
    rec.l_prime = plan.l_prime;
    FeedbackState fb = make_feedback_state(plan.R, o_.a0, rope.diameter_px);

    WrapState state = start;
    for (int n = 1; n <= o_.max_wraps; ++n) {
      if (o_.unravel && n > 1) state = start;
      WrapRecord w = wrap_once(state, fb, rec, n, "wrap");
      fb = update_advance(update_radius(fb, w.quality.h), w.quality.q_a);
      w.after = fb;
      rec.wraps.push_back(w);
      if (fb.radial_converged && fb.axial_converged) {
        rec.wraps_to_convergence = n;
        break;
      }
    }
    rec.final_R = fb.R;
    rec.final_a = fb.a;

    if (o_.frozen && rec.converged()) {
      FeedbackState frozen = fb;
      frozen.radial_converged = frozen.axial_converged = true;
      state = start;
      for (int n = 1; n <= rec.wraps_to_convergence; ++n) {
        WrapRecord w = wrap_once(state, frozen, rec, n, "test");
        w.after = frozen;
        rec.test_wraps.push_back(w);
      }
    }
    rec.final_state = state;

    if (!dir_.empty()) {
      std::ofstream csv(dir_ / "feedback.csv");
      write_record_csv(csv, rec);
      std::ofstream js(dir_ / "state.json");
      js << dump_state(state) << '\n';
    }
    return rec;
  }

 private:
  // One wrap: trace, plan, execute, evaluate. `state` advances in place.
  WrapRecord wrap_once(WrapState& state, const FeedbackState& fb, const RunRecord& rec, int n, const char* stem) {
    const auto& cam = c_.sensor.camera;
    const auto& rod = rec.perception.rod;
    const auto& rope = rec.perception.rope;
    const Frame before = render(state, c_);

    auto t0 = Clock::now();
    const HueMaskProvider hue(rope);
    const MaskProvider& m1 = o_.m1_provider ? *o_.m1_provider : static_cast<const MaskProvider&>(hue);
    const TraceResult trace = trace_rope(before.color, rod, rope, cam, m1, c_.table_z);

    SpiralParams params;
    params.R = fb.R;
    params.a = fb.a;
    params.l_prime = rec.l_prime;
    const double active_axial = (trace.sections.tangent_active - rod.center).dot(rod.axis);
    params.frame = rod_frame(rod.center, rod.axis, active_axial);
    const GraspPose grasp = grasp_point(trace.sections, {Section::Active, params.rope_length()}, rod, cam,
                                        rec.perception.pixels_per_mm);
    params.base_orientation = grasp_orientation(grasp.approach, rod.axis);
    const ReachabilityModel reach = [&](const GripperPose& pose) { return reachable(pose, c_); };
    auto spiral = build_spiral(params, reach);
    AuxiliaryOptions aux;
    aux.table_z = c_.table_z;
    const WrapTrajectory traj = auxiliary_waypoints(grasp, std::move(spiral), params, rod, state.remaining(), aux);
    double seconds = std::chrono::duration<double>(Clock::now() - t0).count();

    state = execute_wrap(state, traj, c_);
    const Frame after = render(state, c_);

    t0 = Clock::now();
    WrapRecord w;
    w.n = n;
    w.R = params.R;
    w.a = params.a;
    w.grasp = grasp.position;
    w.quality = evaluate_wrap(after.color, rod.silhouette, rope, fb.t_R);
    seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    w.cycle_seconds = seconds;

    if (!dir_.empty()) {
      w.frame = (dir_ / wrap_name(stem, n, ".ppm")).string();
      save_ppm(w.frame, to_rgb(after.color));
      save_pgm16(dir_ / wrap_name(stem, n, "_depth.pgm"), after.depth);
      Rgb8Image dbg = to_rgb(before.color);
      annotate(dbg, trace.sections, grasp.pixel);
      save_ppm(dir_ / wrap_name(stem, n, "_trace.ppm"), dbg);
      std::ofstream tf(dir_ / wrap_name(stem, n, "_trajectory.txt"));
      write_trajectory(tf, traj);
    }
    return w;
  }

  const WorldConfig& c_;
  const RunOptions& o_;
  std::filesystem::path dir_;
};

}  // namespace

RunRecord run_loop(const WorldConfig& config, const RunOptions& options) {
  try {
    return Loop(config, options).run();
  } catch (const Error& e) {
    throw Error(e.code(), config.name + ": " + e.what());
  }
}

RunRecord run_scenario(const WorldConfig& config, const RunOptions& options) {
  RunRecord rec = run_loop(config, options);
  if (!rec.converged())
    throw Error(ErrorCode::NonConvergence,
                config.name + ": no convergence within " + std::to_string(options.max_wraps) + " wraps");
  return rec;
}

std::vector<ScenarioOutcome> run_many(const std::vector<WorldConfig>& configs, const RunOptions& options,
                                      bool parallel) {
  auto one = [&options](const WorldConfig& c) {
    ScenarioOutcome out;
    out.name = c.name;
    try {
      out.record = run_loop(c, options);
      if (!out.record->converged()) {
        out.error = ErrorCode::NonConvergence;
        out.message = c.name + ": no convergence within " + std::to_string(options.max_wraps) + " wraps";
      }
    } catch (const Error& e) {
      out.error = e.code();
      out.message = e.what();
    }
    return out;
  };
  std::vector<ScenarioOutcome> outcomes;
  if (!parallel) {
    for (const auto& c : configs) outcomes.push_back(one(c));
    return outcomes;
  }
  std::vector<std::future<ScenarioOutcome>> jobs;
  for (const auto& c : configs) jobs.push_back(std::async(std::launch::async, one, std::cref(c)));
  for (auto& j : jobs) outcomes.push_back(j.get());
  return outcomes;
}

void write_report(std::ostream& out, const std::vector<RunRecord>& records) {
  if (records.empty()) throw Error(ErrorCode::Usage, "report needs at least one run record");
  std::size_t trials = 0;
  for (const auto& r : records) trials = std::max(trials, r.wraps.size());
  out << std::left << std::setw(14) << "scenario";
  for (std::size_t i = 1; i <= trials; ++i) out << std::right << std::setw(9) << ("a_" + std::to_string(i));
  out << "  result\n";
  out << std::fixed << std::setprecision(1);
  for (const auto& r : records) {
    out << std::left << std::setw(14) << r.scenario << std::right;
    for (std::size_t i = 0; i < trials; ++i) {
      if (i < r.wraps.size()) out << std::setw(9) << r.wraps[i].a * 1000.0;
      else out << std::setw(9) << "";
    }
    out << "  " << (r.converged() ? "(complete)" : "(incomplete)") << '\n';
  }
  out.unsetf(std::ios::fixed);
}

void write_record_csv(std::ostream& out, const RunRecord& record) {
  write_csv_header(out);
  for (const auto& w : record.wraps) write_csv_row(out, w.n, w.quality, w.after);
}

void write_summary(std::ostream& out, const std::vector<RunRecord>& records) {
  out << std::setprecision(12);
  for (const auto& r : records) {
    out << r.scenario << ',' << r.wraps_to_convergence;
    for (const auto& w : r.wraps) out << ',' << w.a;
    out << '\n';
  }
}

std::vector<RunRecord> read_summary(std::istream& in) {
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string field;
    RunRecord r;
    if (!std::getline(ls, r.scenario, ',') || !std::getline(ls, field, ','))
      throw Error(ErrorCode::Io, "malformed summary line: " + line);
    try {
      r.wraps_to_convergence = std::stoi(field);
      int n = 0;
      while (std::getline(ls, field, ',')) {
        WrapRecord w;
        w.n = ++n;
        w.a = std::stod(field);
        r.wraps.push_back(w);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::Io, "bad number in summary line: " + line);
    }
    out.push_back(std::move(r));
  }
  return out;
}

int exit_code(ErrorCode code) {
  if (code == ErrorCode::NonConvergence) return 2;
  switch (stage_of(code)) {
    case ErrorStage::Perception: return 3;
    case ErrorStage::Planning: return 4;
    default: return 1;
  }
}

}  // namespace wrapbench
