#pragma once

#include <array>
#include <string>

#include "hdpid/simulator.hpp"

namespace hdpid {

struct ChannelMetrics {
  double itae = 0.0;       // integral of t*|e|
  double peak_time = 0.0;  // time of max |signal|, earliest on ties
  double max_overshoot = 0.0;
};

/// Trapezoidal integral of t*|e(t)| over the uniform grid.
double itae(const Vec& signal, double dt);

/// Grid time of the largest |signal|; earliest index wins ties.
double peak_time(const Vec& signal, double dt);

/// Maximum excess past final_value in the direction the signal approaches it
/// from; never negative.
double max_overshoot(const Vec& signal, double final_value);

/// Trailing-window mean (last 5% of samples) used as the final value for the
/// regulation-to-zero overshoot definition.
double settle_value(const Vec& signal);

ChannelMetrics channel_metrics(const Vec& signal, double dt);

/// Four error channels (e_chi, e_gamma, de_chi, de_gamma) x three metrics,
/// for the uncompensated and compensated runs, plus improvement ratios
/// (uncompensated / compensated; >1 means the compensated run is better).
struct CompareReport {
  static constexpr std::array<const char*, 4> channel_names = {"e_chi", "e_gamma", "de_chi",
                                                               "de_gamma"};
  std::array<ChannelMetrics, 4> base;
  std::array<ChannelMetrics, 4> compensated;
  std::array<std::array<double, 3>, 4> ratios;  // itae, pt, mo per channel
};

CompareReport compare_report(const Trajectory& traj_base, const Trajectory& traj_comp);

void write_report_csv(const CompareReport& rep, const std::string& path);
std::string format_report_table(const CompareReport& rep);

}  // namespace hdpid
