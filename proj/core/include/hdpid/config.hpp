#pragma once

#include <string>

#include "hdpid/simulator.hpp"
#include "hdpid/tuner.hpp"

namespace hdpid {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full pipeline configuration. Defaults mirror the fixed-wing experiment's
/// hyperparameter table; the file format is `key = value` with [section]
/// headers, unknown keys rejected.
struct RunConfig {
  // [plant]
  AircraftPlant::Params plant;
  double l_d_chi = 0.5;
  double l_d_gamma = 0.5;

  // [sim]
  double t_end = 20.0;
  double dt = 1e-3;
  double gamma0 = M_PI / 4.0;
  double chi0 = M_PI / 3.0;
  double phi0 = M_PI / 3.0;
  double nz0 = 1.0;
  double gamma_c = 0.0;
  double chi_c = 0.0;
  double phi_c = 0.0;   // trim input used as the origin evaluation point
  double nz_c = 1.0;
  std::uint64_t seed = 0;
  double hold_interval = 0.0;  // 0 -> dt

  // [certificate]
  double eps_p = 1.0;
  double eps_q = 1.0;
  double tau = 1.0;
  double ref_accel = 0.0;

  // [solver]
  LmiOptions solver;
  double gain_box = 50.0;

  // [gains]
  GainSet gains;      // defaults to the reference K with Kd = O
  Mat d_kp, d_ki;     // compensation fixture; empty -> computed via the EVP
  bool has_dk = false;

  // [schedule]
  CompensationSchedule schedule{CompensationMode::Once, 0, 0.0};

  // [output]
  std::string out_dir = "out";

  RunConfig();

  double disturbance_amplitude() const;
  SimConfig sim_config(const GainSet& g) const;
  Vec x0() const { return {chi0, gamma0}; }
  Vec u0() const { return {phi0, nz0}; }
  Vec x_ref() const { return {chi_c, gamma_c}; }
  Vec u_origin() const { return {phi_c, nz_c}; }
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

Mat parse_matrix(const std::string& text);

}  // namespace hdpid
