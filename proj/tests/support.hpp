#ifndef WRAPBENCH_TESTS_SUPPORT_HPP
#define WRAPBENCH_TESTS_SUPPORT_HPP

#include <algorithm>
#include <numeric>

#include "wrapbench/error.hpp"
#include "wrapbench/simworld.hpp"

namespace wbtest {

template <typename F>
bool throws_code(wrapbench::ErrorCode code, F&& f) {
  try {
    f();
  } catch (const wrapbench::Error& e) {
    return e.code() == code;
  }
  return false;
}

inline wrapbench::WorldConfig noiseless(wrapbench::WorldConfig c) {
  c.sensor.depth_noise = 0.0;
  c.sensor.hue_jitter = 0.0;
  return c;
}

/// Pixels whose renderer label is `label`.
inline std::size_t label_count(const wrapbench::Frame& f, wrapbench::Label label) {
  return std::count(f.labels.pixels().begin(), f.labels.pixels().end(), static_cast<std::uint8_t>(label));
}

/// Smallest trajectory execute_wrap accepts: one pose per required phase.
inline wrapbench::WrapTrajectory stub_trajectory(double R, double a, double l_prime = 0.06) {
  wrapbench::WrapTrajectory t;
  t.params.R = R;
  t.params.a = a;
  t.params.l_prime = l_prime;
  t.pick.resize(1);
  t.spiral.resize(1);
  t.release.resize(1);
  return t;
}

inline bool has_label(const wrapbench::Frame& f, const wrapbench::Pixel& p, wrapbench::Label label) {
  return f.labels(p.x(), p.y()) == static_cast<std::uint8_t>(label);
}

}  // namespace wbtest

#endif  // WRAPBENCH_TESTS_SUPPORT_HPP
