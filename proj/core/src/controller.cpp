#include "hdpid/controller.hpp"

#include <algorithm>
#include <cmath>

namespace hdpid {

GainSet::GainSet(Mat p, Mat i, Mat d) : kp(std::move(p)), ki(std::move(i)), kd(std::move(d)) {
  if (kp.rows() != ki.rows() || kp.cols() != ki.cols() || kp.rows() != kd.rows() ||
      kp.cols() != kd.cols())
    throw InvalidInput("GainSet: inconsistent gain dimensions");
  if (!kp.all_finite() || !ki.all_finite() || !kd.all_finite())
    throw InvalidInput("GainSet: non-finite gains");
}

bool GainSet::kd_is_zero() const { return kd.max_abs() == 0.0; }

Vec control_rate(const GainSet& gains, const Vec& e, const Vec& edot, const Vec& eddot) {
  if (e.size() != gains.states() || edot.size() != gains.states() ||
      eddot.size() != gains.states())
    throw InvalidInput("control_rate: error dimension mismatch");
  Vec udot = gains.ki * e;
  const Vec p = gains.kp * edot;
  const Vec d = gains.kd * eddot;
  for (std::size_t i = 0; i < udot.size(); ++i) udot[i] += p[i] + d[i];
  return udot;
}

Vec clamp_box(const Vec& v, const BoxBounds& box) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp(v[i], box.lo[i], box.hi[i]);
  return out;
}

Vec clamp_rate(const Vec& udot_raw, const BoxBounds& rate_box) {
  return clamp_box(udot_raw, rate_box);
}

GainSet apply_compensation(const GainSet& gains, const Mat& d_kp, const Mat& d_ki) {
  if (d_kp.rows() != gains.kp.rows() || d_kp.cols() != gains.kp.cols() ||
      d_ki.rows() != gains.ki.rows() || d_ki.cols() != gains.ki.cols())
    throw InvalidInput("apply_compensation: dimension mismatch");
  return GainSet(gains.kp + d_kp, gains.ki + d_ki, gains.kd);
}

ErrorAccelEstimator::ErrorAccelEstimator(std::size_t dim, double dt, double lp_pole_rad)
    : dim_(dim), dt_(dt), prev_edot_(dim, 0.0), filtered_(dim, 0.0) {
  alpha_ = (lp_pole_rad > 0.0) ? 1.0 - std::exp(-lp_pole_rad * dt) : 1.0;
}

void ErrorAccelEstimator::reset() {
  primed_ = false;
  std::fill(prev_edot_.begin(), prev_edot_.end(), 0.0);
  std::fill(filtered_.begin(), filtered_.end(), 0.0);
}

Vec ErrorAccelEstimator::update(const Vec& edot) {
  if (edot.size() != dim_) throw InvalidInput("ErrorAccelEstimator: dimension mismatch");
  if (!primed_) {
    // Initial derivatives are declared zero, so the first estimate is zero.
    primed_ = true;
    prev_edot_ = edot;
    return Vec(dim_, 0.0);
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    const double raw = (edot[i] - prev_edot_[i]) / dt_;
    filtered_[i] += alpha_ * (raw - filtered_[i]);
  }
  prev_edot_ = edot;
  return filtered_;
}

}  // namespace hdpid
