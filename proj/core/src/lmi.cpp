#include "hdpid/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace hdpid {

void LmiProblem::validate() const {
  if (objective.size() != num_vars) throw InvalidInput("LmiProblem: objective length");
  if (coeff_blocks.size() != num_vars) throw InvalidInput("LmiProblem: block count");
  if (constant_block.rows() != constant_block.cols())
    throw InvalidInput("LmiProblem: G0 not square");
  for (const auto& g : coeff_blocks)
    if (g.rows() != constant_block.rows() || g.cols() != constant_block.cols())
      throw InvalidInput("LmiProblem: block dimension mismatch");
  for (double c : objective)
    if (!std::isfinite(c)) throw InvalidInput("LmiProblem: non-finite objective");
  if (!var_bounds.empty() && var_bounds.size() != num_vars)
    throw InvalidInput("LmiProblem: var_bounds length");
  for (const auto& b : var_bounds)
    if (b && !(b->lo < b->hi)) throw InvalidInput("LmiProblem: empty box");
}

Mat LmiProblem::eval(const Vec& y) const {
  Mat g = constant_block;
  for (std::size_t i = 0; i < num_vars; ++i) g += coeff_blocks[i] * y[i];
  return g;
}

std::pair<double, Vec> barrier_value_grad(const LmiProblem& prob, const Vec& y) {
  prob.validate();
  Mat s = -prob.eval(y);
  auto l = cholesky(SymMatrix(s));
  if (!l) throw NotStrictlyFeasible("barrier_value_grad: y is not strictly feasible");
  double value = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) value -= 2.0 * std::log((*l)(i, i));
  Mat sinv = inverse(s);
  Vec grad(prob.num_vars);
  for (std::size_t i = 0; i < prob.num_vars; ++i) grad[i] = trace(sinv * prob.coeff_blocks[i]);
  return {value, grad};
}

namespace {

struct Box {
  double lo, hi;
};

std::vector<Box> effective_bounds(const LmiProblem& prob, const LmiOptions& opt) {
  std::vector<Box> b(prob.num_vars, Box{-opt.default_box, opt.default_box});
  for (std::size_t i = 0; i < prob.var_bounds.size(); ++i)
    if (prob.var_bounds[i]) b[i] = Box{prob.var_bounds[i]->lo, prob.var_bounds[i]->hi};
  return b;
}

double lambda_max(const Mat& g) { return sym_eig(SymMatrix(g)).eigenvalues.back(); }

// Centering problem state for  t*c'y + rho*||y||^2 - logdet(-G(y)-shift*I)
// - sum log(hi-y) - sum log(y-lo).
struct BarrierObjective {
  const LmiProblem& prob;
  const std::vector<Box>& bounds;
  double shift;
  double rho;

  bool strictly_feasible(const Vec& y) const {
    for (std::size_t i = 0; i < y.size(); ++i)
      if (!(y[i] > bounds[i].lo && y[i] < bounds[i].hi)) return false;
    Mat s = -prob.eval(y);
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) -= shift;
    return cholesky(SymMatrix(s)).has_value();
  }

  // value only (for line search); requires strict feasibility
  double value(double t, const Vec& y) const {
    Mat s = -prob.eval(y);
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) -= shift;
    auto l = cholesky(SymMatrix(s));
    if (!l) return std::numeric_limits<double>::infinity();
    double v = t * dot(prob.objective, y) + rho * dot(y, y);
    for (std::size_t i = 0; i < s.rows(); ++i) v -= 2.0 * std::log((*l)(i, i));
    for (std::size_t i = 0; i < y.size(); ++i)
      v -= std::log(bounds[i].hi - y[i]) + std::log(y[i] - bounds[i].lo);
    return v;
  }

  void grad_hess(double t, const Vec& y, Vec& g, Mat& h) const {
    const std::size_t p = prob.num_vars;
    Mat s = -prob.eval(y);
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) -= shift;
    Mat sinv = inverse(s);
    std::vector<Mat> m(p);
    for (std::size_t i = 0; i < p; ++i) m[i] = sinv * prob.coeff_blocks[i];

    g.assign(p, 0.0);
    h = Mat(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      g[i] = t * prob.objective[i] + 2.0 * rho * y[i] + trace(m[i]) +
             1.0 / (bounds[i].hi - y[i]) - 1.0 / (y[i] - bounds[i].lo);
      for (std::size_t j = i; j < p; ++j) {
        double hij = trace(m[i] * m[j]);
        if (i == j) {
          const double dhi = bounds[i].hi - y[i], dlo = y[i] - bounds[i].lo;
          hij += 2.0 * rho + 1.0 / (dhi * dhi) + 1.0 / (dlo * dlo);
        }
        h(i, j) = h(j, i) = hij;
      }
    }
  }
};

struct CenterResult {
  Vec y;
  int newton_steps = 0;
  bool hit_cap = false;
};

// Damped Newton with backtracking on the centering objective. early_stop is
// polled after every accepted step (phase-I uses it to bail out as soon as a
// strictly feasible point appears).
CenterResult run_barrier(const LmiProblem& prob, const LmiOptions& opt,
                         const std::vector<Box>& bounds, double shift, Vec y,
                         Vec* outer_objectives,
                         const std::function<bool(const Vec&)>& early_stop = nullptr) {
  BarrierObjective f{prob, bounds, shift, opt.tikhonov};
  const double nu = static_cast<double>(prob.block_dim()) + 2.0 * static_cast<double>(prob.num_vars);

  CenterResult res;
  double t = 1.0;
  Vec g;
  Mat h;
  while (true) {
    for (int inner = 0; inner < 100; ++inner) {
      if (res.newton_steps >= opt.max_newton_steps) {
        res.hit_cap = true;
        res.y = y;
        return res;
      }
      f.grad_hess(t, y, g, h);
      Vec step = solve_spd(SymMatrix(h), g);
      for (double& v : step) v = -v;
      const double decrement2 = -dot(g, step);
      if (decrement2 / 2.0 <= opt.newton_tol) break;

      const double f0 = f.value(t, y);
      double alpha = 1.0;
      Vec cand(y.size());
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        for (std::size_t i = 0; i < y.size(); ++i) cand[i] = y[i] + alpha * step[i];
        if (!f.strictly_feasible(cand)) continue;
        if (f.value(t, cand) <= f0 + 0.01 * alpha * dot(g, step)) break;
      }
      y = cand;
      ++res.newton_steps;
      if (early_stop && early_stop(y)) {
        res.y = y;
        return res;
      }
    }
    if (outer_objectives) outer_objectives->push_back(dot(prob.objective, y));
    if (nu / t <= opt.gap_tol) break;
    t *= opt.mu;
  }
  res.y = y;
  return res;
}

}  // namespace

std::optional<Vec> phase1_feasible_point(const LmiProblem& prob, const LmiOptions& opt) {
  prob.validate();
  const std::size_t p = prob.num_vars;
  const std::size_t d = prob.block_dim();

  auto bounds = effective_bounds(prob, opt);
  Vec y0(p);
  for (std::size_t i = 0; i < p; ++i) y0[i] = 0.5 * (bounds[i].lo + bounds[i].hi);

  const double s0 = lambda_max(prob.eval(y0)) + 1.0;
  if (s0 - 1.0 <= -10.0 * opt.strict_margin) return y0;  // already deep inside

  // Augmented problem: min s  s.t.  G(y) - s*I <= 0.
  LmiProblem aug;
  aug.num_vars = p + 1;
  aug.objective.assign(p + 1, 0.0);
  aug.objective[p] = 1.0;
  aug.constant_block = prob.constant_block;
  aug.coeff_blocks = prob.coeff_blocks;
  aug.coeff_blocks.push_back(-Mat::identity(d));
  aug.var_bounds.resize(p + 1);
  for (std::size_t i = 0; i < prob.var_bounds.size(); ++i) aug.var_bounds[i] = prob.var_bounds[i];
  aug.var_bounds[p] = LmiProblem::Bound{std::min(-1e4, s0 - 1.0), s0 + 1.0};

  auto aug_bounds = effective_bounds(aug, opt);
  Vec z0 = y0;
  z0.push_back(s0);

  const double target = -10.0 * opt.strict_margin;
  auto early = [&](const Vec& z) {
    if (z.back() > target) return false;
    Vec y(z.begin(), z.end() - 1);
    return lambda_max(prob.eval(y)) <= target;
  };

  LmiOptions aug_opt = opt;
  aug_opt.tikhonov = std::max(opt.tikhonov, 1e-6);
  auto res = run_barrier(aug, aug_opt, aug_bounds, 0.0, z0, nullptr, early);

  Vec y(res.y.begin(), res.y.end() - 1);
  if (lambda_max(prob.eval(y)) <= -opt.strict_margin) return y;
  return std::nullopt;
}

LmiSolution solve(const LmiProblem& prob, const LmiOptions& opt) {
  prob.validate();
  LmiSolution sol;

  if (prob.num_vars == 0) {
    const double lm = lambda_max(prob.constant_block);
    sol.max_eig_at_solution = lm;
    sol.status = (lm <= -opt.strict_margin) ? LmiStatus::Optimal : LmiStatus::Infeasible;
    return sol;
  }

  auto y0 = phase1_feasible_point(prob, opt);
  if (!y0) {
    sol.status = LmiStatus::Infeasible;
    return sol;
  }

  auto bounds = effective_bounds(prob, opt);
  const double shift = opt.strict_margin;
  BarrierObjective probe{prob, bounds, shift, opt.tikhonov};
  if (!probe.strictly_feasible(*y0)) {
    // Phase-I landed exactly on the shifted boundary: marginal problem.
    sol.status = LmiStatus::Infeasible;
    sol.y_star = *y0;
    return sol;
  }

  auto res = run_barrier(prob, opt, bounds, shift, *y0, &sol.outer_objectives);
  sol.y_star = res.y;
  sol.iterations = res.newton_steps;
  sol.objective_value = dot(prob.objective, res.y);
  sol.max_eig_at_solution = lambda_max(prob.eval(res.y));
  sol.status = res.hit_cap ? LmiStatus::MaxIterations : LmiStatus::Optimal;
  return sol;
}

}  // namespace hdpid
