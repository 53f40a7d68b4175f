#pragma once

#include "hdpid/matrix.hpp"
#include "hdpid/plant.hpp"

namespace hdpid {

/// Matrix PID gains, each m x n (full cross-channel coupling).
struct GainSet {
  Mat kp, ki, kd;

  GainSet() = default;
  GainSet(Mat p, Mat i, Mat d);

  std::size_t inputs() const { return kp.rows(); }
  std::size_t states() const { return kp.cols(); }
  bool kd_is_zero() const;
};

/// udot = Ki*e + Kp*edot + Kd*eddot, unclamped.
Vec control_rate(const GainSet& gains, const Vec& e, const Vec& edot, const Vec& eddot);

/// Componentwise clamp of the commanded rate.
Vec clamp_rate(const Vec& udot_raw, const BoxBounds& rate_box);

Vec clamp_box(const Vec& v, const BoxBounds& box);

/// Returns gains with Kp+dKp, Ki+dKi; Kd unchanged.
GainSet apply_compensation(const GainSet& gains, const Mat& d_kp, const Mat& d_ki);

/// Backward-difference estimate of eddot from successive edot samples, with
/// an optional single-pole low-pass (pole in rad/s, <=0 disables). Only used
/// when Kd is nonzero; the fixed-wing experiment runs with Kd = O and eddot
/// pinned to zero.
class ErrorAccelEstimator {
 public:
  ErrorAccelEstimator(std::size_t dim, double dt, double lp_pole_rad = 20.0);

  Vec update(const Vec& edot);
  void reset();

 private:
  std::size_t dim_;
  double dt_;
  double alpha_;  // low-pass blend per step
  bool primed_ = false;
  Vec prev_edot_;
  Vec filtered_;
};

}  // namespace hdpid
