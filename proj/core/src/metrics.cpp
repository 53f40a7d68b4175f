#include "hdpid/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hdpid {

double itae(const Vec& signal, double dt) {
  if (signal.empty()) throw InvalidInput("itae: empty series");
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < signal.size(); ++k) {
    const double f0 = static_cast<double>(k) * dt * std::abs(signal[k]);
    const double f1 = static_cast<double>(k + 1) * dt * std::abs(signal[k + 1]);
    acc += 0.5 * (f0 + f1) * dt;
  }
  return acc;
}

double peak_time(const Vec& signal, double dt) {
  if (signal.empty()) throw InvalidInput("peak_time: empty series");
  std::size_t best = 0;
  for (std::size_t k = 1; k < signal.size(); ++k)
    if (std::abs(signal[k]) > std::abs(signal[best])) best = k;
  return static_cast<double>(best) * dt;
}

double settle_value(const Vec& signal) {
  if (signal.empty()) throw InvalidInput("settle_value: empty series");
  const std::size_t tail = std::max<std::size_t>(1, signal.size() / 20);
  double s = 0.0;
  for (std::size_t k = signal.size() - tail; k < signal.size(); ++k) s += signal[k];
  return s / static_cast<double>(tail);
}

double max_overshoot(const Vec& signal, double final_value) {
  if (signal.empty()) throw InvalidInput("max_overshoot: empty series");
  // Direction of approach: where the signal started relative to its final
  // value decides what counts as "surpassing" it.
  const double dir = (final_value >= signal.front()) ? 1.0 : -1.0;
  double mo = 0.0;
  for (double v : signal) mo = std::max(mo, dir * (v - final_value));
  return mo;
}

ChannelMetrics channel_metrics(const Vec& signal, double dt) {
  ChannelMetrics m;
  m.itae = itae(signal, dt);
  m.peak_time = peak_time(signal, dt);
  m.max_overshoot = max_overshoot(signal, settle_value(signal));
  return m;
}

namespace {

Vec channel(const Trajectory& traj, std::size_t idx) {
  Vec out(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k)
    out[k] = idx < 2 ? traj.e[k][idx] : traj.edot[k][idx - 2];
  return out;
}

double ratio(double a, double b) {
  if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return a / b;
}

}  // namespace

CompareReport compare_report(const Trajectory& traj_base, const Trajectory& traj_comp) {
  if (traj_base.size() != traj_comp.size() || traj_base.size() < 2)
    throw InvalidInput("compare_report: trajectory grids differ");
  for (std::size_t k = 0; k < traj_base.size(); ++k)
    if (traj_base.t[k] != traj_comp.t[k]) throw InvalidInput("compare_report: time grids differ");
  const double dt = traj_base.t[1] - traj_base.t[0];

  CompareReport rep;
  for (std::size_t c = 0; c < 4; ++c) {
    rep.base[c] = channel_metrics(channel(traj_base, c), dt);
    rep.compensated[c] = channel_metrics(channel(traj_comp, c), dt);
    rep.ratios[c] = {ratio(rep.base[c].itae, rep.compensated[c].itae),
                     ratio(rep.base[c].peak_time, rep.compensated[c].peak_time),
                     ratio(rep.base[c].max_overshoot, rep.compensated[c].max_overshoot)};
  }
  return rep;
}

void write_report_csv(const CompareReport& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("write_report_csv: cannot open " + path);
  out << "channel,itae_base,itae_comp,itae_ratio,pt_base,pt_comp,pt_ratio,"
         "mo_base,mo_comp,mo_ratio\n";
  for (std::size_t c = 0; c < 4; ++c) {
    out << CompareReport::channel_names[c] << ',' << format_double(rep.base[c].itae) << ','
        << format_double(rep.compensated[c].itae) << ',' << format_double(rep.ratios[c][0]) << ','
        << format_double(rep.base[c].peak_time) << ',' << format_double(rep.compensated[c].peak_time)
        << ',' << format_double(rep.ratios[c][1]) << ',' << format_double(rep.base[c].max_overshoot)
        << ',' << format_double(rep.compensated[c].max_overshoot) << ','
        << format_double(rep.ratios[c][2]) << '\n';
  }
}

std::string format_report_table(const CompareReport& rep) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %12s %12s %8s %10s %10s %8s %10s %10s %8s\n", "channel",
                "itae(K)", "itae(K+dK)", "ratio", "pt(K)", "pt(K+dK)", "ratio", "mo(K)",
                "mo(K+dK)", "ratio");
  os << line;
  for (std::size_t c = 0; c < 4; ++c) {
    std::snprintf(line, sizeof(line),
                  "%-10s %12.5g %12.5g %8.3g %10.4g %10.4g %8.3g %10.4g %10.4g %8.3g\n",
                  CompareReport::channel_names[c], rep.base[c].itae, rep.compensated[c].itae,
                  rep.ratios[c][0], rep.base[c].peak_time, rep.compensated[c].peak_time,
                  rep.ratios[c][1], rep.base[c].max_overshoot, rep.compensated[c].max_overshoot,
                  rep.ratios[c][2]);
    os << line;
  }
  return os.str();
}

}  // namespace hdpid
