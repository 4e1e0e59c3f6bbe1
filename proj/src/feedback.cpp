#include "wrapbench/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wrapbench/error.hpp"

namespace wrapbench {

FeedbackState make_feedback_state(double R, double a, double d_px) {
  FeedbackState s;
  s.R = R;
  s.a = a;
  s.t_R = 1.5 * d_px;
  return s;
}

FeedbackState update_radius(FeedbackState state, double h) {
  if (state.radial_converged) return state;
  if (h <= state.t_R) {
    state.radial_converged = true;
    return state;
  }
  state.R -= state.K_PR * (h - state.t_R);
  return state;
}

FeedbackState update_advance(FeedbackState state, double q_a) {
  if (state.axial_converged) return state;
  const bool settled =
      q_a == 0.0 || (!state.q_a_history.empty() && std::fabs(state.q_a_history.back() - q_a) < state.t_a);
  state.q_a_history.push_back(q_a);
  if (settled) {
    state.axial_converged = true;
    return state;
  }
  state.a -= state.K_Pa * q_a;
  return state;
}

double measure_height(const BinaryMask& rope, const AxisRect& rod, double d_px) {
  const int d = std::max(1, static_cast<int>(std::lround(d_px)));
  const int x0 = std::max(0, rod.min.x());
  const int x1 = std::min(rope.width() - 1, rod.max.x());
  const int y0 = std::max(0, rod.min.y());
  const int y1 = std::min(rope.height() - 1, rod.max.y() + 2 * rod.height());

  bool any = false;
  BinaryMask kept(rope.width(), rope.height());
  for (int y = y0; y <= y1; ++y) {
    int x = x1;
    // First white run from the right: the hanging strand.
    while (x >= x0 && !rope.get(x, y)) --x;
    if (x < x0) continue;
    any = true;
    // Drop d white pixels, then whatever is left of the run they end in, so
    // a one-pixel misestimate of d cannot leave a strand sliver behind.
    int skipped = 0;
    while (x >= x0 && skipped < d) {
      if (rope.get(x, y)) ++skipped;
      --x;
    }
    while (x >= x0 && rope.get(x, y)) --x;
    while (x >= x0 && !rope.get(x, y)) --x;
    const int end = x;
    while (x >= x0 && rope.get(x, y)) --x;
    const int run = end - x;
    if (end >= x0 && run < d)
      for (int k = x + 1; k <= end; ++k) kept.set(k, y);
  }
  if (!any) throw Error(ErrorCode::NoWrapDetected, "no rope pixel near the rod");

  // Only the part hanging below the rod can sag.
  for (int y = 0; y <= rod.max.y() && y < kept.height(); ++y)
    for (int x = 0; x < kept.width(); ++x) kept.set(x, y, false);
  const BinaryMask skel = skeletonize(kept);
  int vy = -1, vx = -1;
  for (int y = 0; y < skel.height(); ++y)
    for (int x = 0; x < skel.width(); ++x)
      if (skel.get(x, y) && (y > vy || (y == vy && x > vx))) {
        vy = y;
        vx = x;
      }
  if (vy < 0) return 0.0;
  while (kept.at(vx, vy + 1)) ++vy;  // down to the segment's lower edge
  return std::max(0, vy - rod.max.y());
}

AdvanceMeasure measure_advance(const BinaryMask& rope, const AxisRect& rod, double d_px) {
  const int x0 = std::max(0, rod.min.x());
  const int x1 = std::min(rope.width() - 1, rod.max.x());
  AdvanceMeasure m;
  bool any = false;
  for (int y = std::max(0, rod.min.y()); y <= std::min(rope.height() - 1, rod.max.y()); ++y) {
    int x = x1;
    while (x >= x0 && !rope.get(x, y)) --x;
    if (x < x0) continue;
    any = true;
    const int run_end = x;
    while (x >= x0 && rope.get(x, y)) --x;
    const int run = run_end - x;
    m.S_r += run;
    if (run > 1.5 * d_px) continue;  // close contact
    const int gap_end = x;
    while (x >= x0 && !rope.get(x, y)) --x;
    if (x >= x0) m.S_g += gap_end - x;
  }
  if (!any) throw Error(ErrorCode::NoWrapDetected, "no wrap visible on the rod");
  return m;
}

WrapQuality evaluate_wrap(const HsvImage& image, const AxisRect& rod, const RopeEstimate& rope, double t_R) {
  const BinaryMask mask = rope_mask(image, rope);
  WrapQuality q;
  q.h = measure_height(mask, rod, rope.diameter_px);
  const auto adv = measure_advance(mask, rod, rope.diameter_px);
  q.S_r = adv.S_r;
  q.S_g = adv.S_g;
  q.q_r = q.h - t_R;
  q.q_a = adv.q_a();
  return q;
}

void write_csv_header(std::ostream& out) {
  out << "n,h_px,S_r,S_g,q_r,q_a,R_mm,a_mm,radial_converged,axial_converged\n";
}

void write_csv_row(std::ostream& out, int n, const WrapQuality& q, const FeedbackState& s) {
  out << n << ',' << q.h << ',' << q.S_r << ',' << q.S_g << ',' << q.q_r << ',' << q.q_a << ',' << s.R * 1000.0
      << ',' << s.a * 1000.0 << ',' << (s.radial_converged ? 1 : 0) << ',' << (s.axial_converged ? 1 : 0) << '\n';
}

}  // namespace wrapbench
