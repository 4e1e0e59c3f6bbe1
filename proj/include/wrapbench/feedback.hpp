#ifndef WRAPBENCH_FEEDBACK_HPP
#define WRAPBENCH_FEEDBACK_HPP

#include <iosfwd>
#include <vector>

#include "wrapbench/imaging.hpp"
#include "wrapbench/rope_estimation.hpp"

namespace wrapbench {

struct WrapQuality {
  double h = 0.0;    // px
  double S_r = 0.0;  // px^2
  double S_g = 0.0;  // px^2
  double q_r = 0.0;  // px
  double q_a = 0.0;
};

struct FeedbackState {
  double R = 0.0;       // m
  double a = 0.0;       // m
  double K_PR = 0.001;  // m per px
  double K_Pa = 0.04;   // m
  double t_R = 0.0;     // px
  double t_a = 0.05;
  std::vector<double> q_a_history;
  bool radial_converged = false;
  bool axial_converged = false;
  int n = 0;  // wraps evaluated
};

/// t_R = 1.5 d.
FeedbackState make_feedback_state(double R, double a, double d_px);

FeedbackState update_radius(FeedbackState state, double h);
FeedbackState update_advance(FeedbackState state, double q_a);

/// Valley depth of the last wrap below the rod's bottom edge, in pixels.
/// `rod` spans the rod's silhouette rows. Throws NoWrapDetected when the
/// rope mask has no pixel around the rod.
double measure_height(const BinaryMask& rope, const AxisRect& rod, double d_px);

struct AdvanceMeasure {
  double S_r = 0.0;
  double S_g = 0.0;
  double q_a() const { return S_g + S_r > 0.0 ? S_g / (S_g + S_r) : 0.0; }
};

/// Gap and last-wrap areas over the rod rows, scanning from the free end
/// (larger x). Throws NoWrapDetected.
AdvanceMeasure measure_advance(const BinaryMask& rope, const AxisRect& rod, double d_px);

WrapQuality evaluate_wrap(const HsvImage& image, const AxisRect& rod, const RopeEstimate& rope, double t_R);

/// "n,h_px,S_r,S_g,q_r,q_a,R_mm,a_mm,radial_converged,axial_converged".
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, int n, const WrapQuality& q, const FeedbackState& s);

}  // namespace wrapbench

#endif  // WRAPBENCH_FEEDBACK_HPP
