#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "hdpid/controller.hpp"
#include "hdpid/plant.hpp"

namespace hdpid {

struct IntegrationBlowup : std::runtime_error {
  IntegrationBlowup(const std::string& msg, std::size_t step) : std::runtime_error(msg), step_index(step) {}
  std::size_t step_index;
};

/// Classical 4-stage Runge-Kutta update.
Vec rk4_step(const std::function<Vec(double, const Vec&)>& derivative_fn, const Vec& state,
             double t, double dt);

enum class CompensationMode { None, Once, EveryN, Threshold };

struct CompensationSchedule {
  CompensationMode mode = CompensationMode::None;
  std::size_t every_n = 0;      // EveryN
  double threshold = 0.0;       // Threshold: trigger when ||e_tilde|| exceeds
};

struct SimConfig {
  double t_end = 20.0;
  double dt = 1e-3;
  Vec x0;       // initial state
  Vec u0;       // initial input
  Vec x_ref;    // constant reference
  double l_d = 0.5;
  std::uint64_t seed = 0;
  double hold_interval = 0.0;  // 0 -> dt
  double eps_p = 1.0;          // for the recorded sqrt(e~'Pe~) column
  GainSet gains;
  CompensationSchedule schedule;
};

struct Trajectory {
  Vec t;
  std::vector<Vec> x, e, edot, u, udot_applied, d;
  Vec lyap_norm;  // sqrt(eps_p)*||(edot, e)||

  std::size_t size() const { return t.size(); }
};

/// Hook invoked when the compensation schedule fires; receives the current
/// state/input/gains and returns the gain set to use from this step on.
using CompensationHook =
    std::function<GainSet(const Vec& x, const Vec& u, const GainSet& gains)>;

/// Fixed-step closed-loop run: the augmented state (x, u) is integrated
/// jointly with udot held constant over each step, the disturbance is
/// sample-and-hold, and u is projected onto the input box after every step.
Trajectory run_closed_loop(const PlantModel& plant, const SimConfig& config,
                           const CompensationHook& compensate = nullptr);

/// Error-space linear surrogate edot = J(t) e + d(t), recording
/// sqrt(e' P e) in lyap_norm. Used by the invariant-set and convergence-rate
/// checks.
Trajectory run_ltv_surrogate(const std::function<Mat(double)>& j_fn,
                             const std::function<Vec(double)>& d_fn, const Vec& e0,
                             const SymMatrix& p, double t_end, double dt);

/// CSV export with the fixed column set
/// t, chi, gamma, e_chi, e_gamma, de_chi, de_gamma, phi, nz, d_chi, d_gamma, lyap_norm.
/// Formatting is locale-free and deterministic.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

std::string format_double(double v);

}  // namespace hdpid
