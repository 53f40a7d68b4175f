#pragma once

#include <optional>

#include "hdpid/matrix.hpp"

namespace hdpid {

struct NotStrictlyFeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimize c^T y subject to G(y) = G0 + sum_i y_i G_i <= 0 (negative
/// semidefinite), with optional per-variable box bounds. The EVPs of the
/// tuning pipeline are all instances of this canonical form.
struct LmiProblem {
  std::size_t num_vars = 0;
  Vec objective;               // length num_vars
  Mat constant_block;          // G0, symmetric
  std::vector<Mat> coeff_blocks;  // G_1..G_p, each symmetric, same dim as G0

  struct Bound {
    double lo, hi;
  };
  std::vector<std::optional<Bound>> var_bounds;  // empty or length num_vars

  void validate() const;
  std::size_t block_dim() const { return constant_block.rows(); }
  Mat eval(const Vec& y) const;  // G(y)
};

enum class LmiStatus { Optimal, Infeasible, MaxIterations };

struct LmiSolution {
  Vec y_star;
  double objective_value = 0.0;
  double max_eig_at_solution = 0.0;
  int iterations = 0;  // total Newton steps
  LmiStatus status = LmiStatus::Infeasible;
  Vec outer_objectives;  // objective after each outer barrier stage
};

struct LmiOptions {
  double strict_margin = 1e-6;  // realize "< 0" as <= -margin*I
  double gap_tol = 1e-6;        // stop when nu/t <= gap_tol
  double newton_tol = 1e-8;     // Newton decrement threshold
  double mu = 10.0;             // outer t scaling
  double tikhonov = 1e-4;       // rho*||y||^2 tie-break, not scaled by t
  double default_box = 50.0;    // box applied to variables without bounds
  int max_newton_steps = 200;
};

/// Phase-I: find y with lambda_max(G(y)) <= -strict_margin by minimizing s
/// subject to G(y) - s*I <= 0 with the same barrier machinery. Returns
/// nullopt when the phase-I optimum cannot reach -strict_margin.
std::optional<Vec> phase1_feasible_point(const LmiProblem& prob, const LmiOptions& opt = {});

/// Log-det barrier path-following solve of the full problem.
LmiSolution solve(const LmiProblem& prob, const LmiOptions& opt = {});

/// value = -log det(-G(y)), gradient_i = trace((-G(y))^{-1} G_i).
/// Exposed for finite-difference testing; throws NotStrictlyFeasible when
/// -G(y) is not positive definite.
std::pair<double, Vec> barrier_value_grad(const LmiProblem& prob, const Vec& y);

}  // namespace hdpid
