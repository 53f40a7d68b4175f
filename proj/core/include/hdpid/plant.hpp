#pragma once

#include <cstdint>

#include "hdpid/matrix.hpp"

namespace hdpid {

struct NearSingularInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BoxBounds {
  Vec lo, hi;  // componentwise, lo < hi
};

/// Nonlinear MIMO plant xdot = f(x,u) + d with analytic Jacobians and
/// actuator boxes. Implementations are immutable after construction.
class PlantModel {
 public:
  virtual ~PlantModel() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t input_dim() const = 0;

  virtual Vec eval_f(const Vec& x, const Vec& u) const = 0;
  virtual Mat jac_x(const Vec& x, const Vec& u) const = 0;
  virtual Mat jac_u(const Vec& x, const Vec& u) const = 0;

  virtual BoxBounds input_box() const = 0;
  virtual BoxBounds rate_box() const = 0;

  /// Bound on ||d_dot||_2 used by the disturbance-propagation certificate.
  virtual double l_ddot() const = 0;
};

/// Fixed-wing kinematic model in (chi, gamma) with inputs (phi, n_z):
///   chi_dot   = g*tan(phi)/V
///   gamma_dot = g*(n_z*cos(phi) - cos(gamma))/V
/// Rejects |phi| >= pi/2 - guard, where the tan/sec^2 terms blow up and the
/// input Jacobian loses rank.
class AircraftPlant final : public PlantModel {
 public:
  struct Params {
    double g = 9.81;   // m/s^2
    double v = 25.0;   // consolidated velocity, m/s
    double phi_guard = 1e-3;  // rad, singularity guard at |phi| = pi/2
    double l_ddot = 0.5;
    BoxBounds input_box{{-1.48, -5.0}, {1.48, 5.0}};  // (phi, n_z)
    BoxBounds rate_box{{-10.0, -10.0}, {10.0, 10.0}};
  };

  AircraftPlant();
  explicit AircraftPlant(Params p);

  std::size_t state_dim() const override { return 2; }
  std::size_t input_dim() const override { return 2; }

  Vec eval_f(const Vec& x, const Vec& u) const override;
  Mat jac_x(const Vec& x, const Vec& u) const override;
  Mat jac_u(const Vec& x, const Vec& u) const override;

  BoxBounds input_box() const override { return params_.input_box; }
  BoxBounds rate_box() const override { return params_.rate_box; }
  double l_ddot() const override { return params_.l_ddot; }

  const Params& params() const { return params_; }

 private:
  void check_input(const Vec& u) const;
  Params params_;
};

/// Sample-and-hold uniform disturbance: each component i.i.d. uniform on
/// [-L_d/2, L_d/2], constant over each hold interval, generated by a
/// counter-based splitmix64 keyed on (seed, interval index, component) so a
/// given (seed, t) always yields the same vector on every platform.
class DisturbanceSampler {
 public:
  DisturbanceSampler(std::size_t dim, double l_d, std::uint64_t seed, double hold_interval);

  Vec sample(double t) const;

  double amplitude() const { return l_d_; }
  double hold_interval() const { return hold_; }

 private:
  std::size_t dim_;
  double l_d_;
  std::uint64_t seed_;
  double hold_;
};

/// splitmix64 output for a given key; exposed for the deterministic seed
/// sweeps in the CLI.
std::uint64_t splitmix64(std::uint64_t key);

}  // namespace hdpid
