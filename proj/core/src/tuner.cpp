#include "hdpid/tuner.hpp"

#include <cmath>
#include <limits>

namespace hdpid {

namespace {

Mat embed(std::size_t dim, std::size_t ri, std::size_t ci, const Mat& block) {
  Mat out(dim, dim);
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) out(ri + i, ci + j) = block(i, j);
  return out;
}

// sym(L2[:,i] * e_j^T) at full block dimension: coefficient block of gain
// entry (i, j) in the affine constraint.
Mat gain_coeff_block(const Mat& l2, std::size_t i, std::size_t j) {
  const std::size_t d = l2.rows();
  Mat g(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    g(r, j) += l2(r, i);
    g(j, r) += l2(r, i);
  }
  return g;
}

void set_lambda_box(LmiProblem& prob) {
  prob.var_bounds.back() = LmiProblem::Bound{-1e3, 1e3};
}

}  // namespace

VelocityBlocks velocity_blocks(const PlantModel& plant, const Vec& x, const Vec& u, const Mat& kd) {
  const std::size_t n = plant.state_dim();
  const std::size_t m = plant.input_dim();
  if (kd.rows() != m || kd.cols() != n) throw InvalidInput("velocity_blocks: Kd dimension");

  const Mat jx = plant.jac_x(x, u);
  const Mat ju = plant.jac_u(x, u);
  const Mat ikd = Mat::identity(n) + ju * kd;
  if (cond2(ikd) > 1e8) throw SingularIKd("velocity_blocks: I + (df/du)Kd ill-conditioned");

  VelocityBlocks b;
  b.ikd_inv = inverse(ikd);
  b.l1 = Mat(2 * n, 2 * n);
  const Mat a = b.ikd_inv * jx;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b.l1(i, j) = a(i, j);
    b.l1(n + i, i) = 1.0;
  }
  b.l2 = Mat(2 * n, m);
  const Mat bu = b.ikd_inv * ju;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) b.l2(i, j) = -bu(i, j);
  b.x = x;
  b.u = u;
  return b;
}

LmiProblem assemble_evp1(const VelocityBlocks& blocks, double gain_box) {
  const std::size_t d = blocks.l1.rows();  // 2n
  const std::size_t m = blocks.l2.cols();
  const std::size_t p = m * d + 1;

  LmiProblem prob;
  prob.num_vars = p;
  prob.objective.assign(p, 0.0);
  prob.objective[p - 1] = 1.0;
  prob.constant_block = sym2(blocks.l1);
  prob.coeff_blocks.reserve(p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) prob.coeff_blocks.push_back(gain_coeff_block(blocks.l2, i, j));
  prob.coeff_blocks.push_back(-Mat::identity(d));
  prob.var_bounds.assign(p, LmiProblem::Bound{-gain_box, gain_box});
  set_lambda_box(prob);
  return prob;
}

LmiProblem assemble_evp1_hinf(const VelocityBlocks& blocks, double eps_p, double gain_box) {
  if (!(eps_p > 0.0)) throw InvalidInput("assemble_evp1_hinf: eps_p must be positive");
  const std::size_t d = blocks.l1.rows();
  const std::size_t m = blocks.l2.cols();
  const std::size_t big = 3 * d;
  const std::size_t p = m * d + 1;

  LmiProblem prob;
  prob.num_vars = p;
  prob.objective.assign(p, 0.0);
  prob.objective[p - 1] = 1.0;

  Mat g0 = embed(big, 0, 0, sym2(blocks.l1));
  const Mat coupling = Mat::identity(d) * (1.0 / eps_p);
  g0 += embed(big, 0, 2 * d, coupling);
  g0 += embed(big, 2 * d, 0, coupling);
  prob.constant_block = g0;

  prob.coeff_blocks.reserve(p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j)
      prob.coeff_blocks.push_back(embed(big, 0, 0, gain_coeff_block(blocks.l2, i, j)));
  Mat g_lambda(big, big);
  for (std::size_t i = d; i < big; ++i) g_lambda(i, i) = -1.0;
  prob.coeff_blocks.push_back(g_lambda);

  prob.var_bounds.assign(p, LmiProblem::Bound{-gain_box, gain_box});
  set_lambda_box(prob);
  return prob;
}

LmiProblem assemble_evp2(const VelocityBlocks& blocks_at_e, const VelocityBlocks& blocks_at_origin,
                         const Mat& k, double eps_p, double eps_q, double gain_box) {
  const std::size_t d = blocks_at_e.l1.rows();
  const std::size_t m = blocks_at_e.l2.cols();
  if (k.rows() != m || k.cols() != d) throw InvalidInput("assemble_evp2: K dimension");
  if (blocks_at_origin.l1.rows() != d || blocks_at_origin.l2.cols() != m)
    throw InvalidInput("assemble_evp2: block dimension mismatch");

  const Mat dl1 = blocks_at_e.l1 - blocks_at_origin.l1;
  const Mat dl2 = blocks_at_e.l2 - blocks_at_origin.l2;

  const std::size_t p = m * d + 1;
  LmiProblem prob;
  prob.num_vars = p;
  prob.objective.assign(p, 0.0);
  prob.objective[p - 1] = 1.0;
  prob.constant_block =
      (sym2(dl2 * k) + sym2(dl1)) * eps_p - Mat::identity(d) * eps_q;
  prob.coeff_blocks.reserve(p);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j)
      prob.coeff_blocks.push_back(gain_coeff_block(blocks_at_e.l2, i, j) * eps_p);
  prob.coeff_blocks.push_back(-Mat::identity(d));
  prob.var_bounds.assign(p, LmiProblem::Bound{-gain_box, gain_box});
  set_lambda_box(prob);
  return prob;
}

std::pair<Mat, Mat> extract_gains(const Vec& y, std::size_t m, std::size_t n) {
  if (y.size() < 2 * m * n) throw InvalidInput("extract_gains: decision vector too short");
  Mat p(m, n), i(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < 2 * n; ++c) {
      const double v = y[r * 2 * n + c];
      if (c < n)
        p(r, c) = v;
      else
        i(r, c - n) = v;
    }
  return {p, i};
}

Vec pack_gains(const Mat& p_part, const Mat& i_part) {
  const std::size_t m = p_part.rows(), n = p_part.cols();
  Vec y(2 * m * n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      y[r * 2 * n + c] = p_part(r, c);
      y[r * 2 * n + n + c] = i_part(r, c);
    }
  return y;
}

Mat stack_gains(const Mat& kp, const Mat& ki) {
  const std::size_t m = kp.rows(), n = kp.cols();
  Mat k(m, 2 * n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      k(r, c) = kp(r, c);
      k(r, n + c) = ki(r, c);
    }
  return k;
}

double disturbance_bound(const VelocityBlocks& blocks, double l_ddot, double ref_accel) {
  return spectral_norm(blocks.ikd_inv) * (l_ddot + ref_accel);
}

double eta_bound(double l_dtilde, double eps_p, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("eta_bound: tau must be positive");
  if (!(eps_p > 0.0)) throw InvalidInput("eta_bound: eps_p must be positive");
  return 2.0 * l_dtilde * std::pow(eps_p, 1.5) / tau;
}

double eta_bound_general(double l_dtilde, const SymMatrix& p, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("eta_bound_general: tau must be positive");
  auto d = sym_eig(p);
  const double lmin = d.eigenvalues.front(), lmax = d.eigenvalues.back();
  if (!(lmin > 0.0)) throw InvalidInput("eta_bound_general: P must be positive definite");
  return 2.0 * l_dtilde * lmax * lmax / (tau * std::sqrt(lmin));
}

Thm3Check check_thm3_condition(const VelocityBlocks& blocks_at_e,
                               const VelocityBlocks& blocks_at_origin, const Mat& k, const Mat& dk,
                               double eps_p, double eps_q, double tau) {
  const std::size_t d = blocks_at_e.l1.rows();
  const Mat dl1 = blocks_at_e.l1 - blocks_at_origin.l1;
  const Mat dl2 = blocks_at_e.l2 - blocks_at_origin.l2;
  Mat cond = sym2(blocks_at_e.l2 * dk) + sym2(dl2 * k) + sym2(dl1) +
             Mat::identity(d) * ((tau - eps_q) / eps_p);
  Thm3Check out;
  out.margin = sym_eig(SymMatrix(cond)).eigenvalues.back();
  out.holds = out.margin <= 0.0;
  return out;
}

double hurwitz_check(const Mat& j) {
  auto eigs = eigenvalues_general(j);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigs) abscissa = std::max(abscissa, z.real());
  return abscissa;
}

double lemma3_bound(double v0, double alpha, double beta, double t) {
  if (!(alpha > 0.0) || beta < 0.0 || t < 0.0 || v0 < 0.0)
    throw InvalidInput("lemma3_bound: parameter out of range");
  const double ba = beta / alpha;
  return ba + (std::sqrt(v0) - ba) * std::exp(-0.5 * alpha * t);
}

TuningResult tune_gains(const PlantModel& plant, const Vec& x_origin, const Vec& u_origin,
                        const Mat& kd, double eps_p, bool hinf, const LmiOptions& opt,
                        double gain_box) {
  const std::size_t n = plant.state_dim();
  const std::size_t m = plant.input_dim();
  auto blocks = velocity_blocks(plant, x_origin, u_origin, kd);
  LmiProblem prob =
      hinf ? assemble_evp1_hinf(blocks, eps_p, gain_box) : assemble_evp1(blocks, gain_box);
  LmiSolution sol = solve(prob, opt);

  TuningResult result;
  result.solver_status = sol.status;
  result.iterations = sol.iterations;
  if (sol.status == LmiStatus::Infeasible) return result;

  auto [kp, ki] = extract_gains(sol.y_star, m, n);
  result.k = stack_gains(kp, ki);
  result.lambda_star = sol.objective_value;
  result.spectral_abscissa_at_origin = hurwitz_check(blocks.l1 + blocks.l2 * result.k);
  return result;
}

}  // namespace hdpid
