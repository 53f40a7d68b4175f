#pragma once

#include "hdpid/controller.hpp"
#include "hdpid/lmi.hpp"
#include "hdpid/plant.hpp"

namespace hdpid {

struct SingularIKd : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Velocity-form blocks of the augmented error dynamics at one (x, u) point:
///   L1 = [[inv(I+Ju*Kd)*Jx, O], [I, O]],  L2 = [[-inv(I+Ju*Kd)*Ju], [O]],
/// with the closed-loop matrix Jtilde = L1 + L2*K on the stacked error
/// (edot, e).
struct VelocityBlocks {
  Mat ikd_inv;  // n x n
  Mat l1;       // 2n x 2n
  Mat l2;       // 2n x m
  Vec x, u;     // evaluation point
};

VelocityBlocks velocity_blocks(const PlantModel& plant, const Vec& x, const Vec& u, const Mat& kd);

/// P = eps_p*I, Q = eps_q*I scalar Lyapunov certificates; tau is the
/// convergence-rate parameter of the invariant-set bound.
struct CertificateParams {
  double eps_p = 1.0;
  double eps_q = 1.0;
  double tau = 1.0;
  double l_dtilde = 0.0;
};

struct TuningResult {
  Mat k;  // m x 2n, stacked (Kp, Ki)
  double lambda_star = 0.0;
  LmiStatus solver_status = LmiStatus::Infeasible;
  double spectral_abscissa_at_origin = 0.0;
  int iterations = 0;
};

/// min lambda s.t. L1+L1' + L2*K + K'*L2' <= lambda*I, decision vars = K
/// entries (row-major) then lambda.
LmiProblem assemble_evp1(const VelocityBlocks& blocks_at_origin, double gain_box = 50.0);

/// Bounded-real-lemma variant: 3x3 block constraint
///   [[L_K, O, (1/eps_p) I], [*, -lambda I, O], [*, *, -lambda I]] < 0.
LmiProblem assemble_evp1_hinf(const VelocityBlocks& blocks_at_origin, double eps_p,
                              double gain_box = 50.0);

/// Compensation stage: decision vars = dK entries then lambda, constraint
///   eps_p*(sym(L2(e)*dK) + sym(dL2*K) + sym(dL1)) - eps_q*I <= lambda*I
/// where dL1 = L1(e)-L1(0), dL2 = L2(e)-L2(0).
LmiProblem assemble_evp2(const VelocityBlocks& blocks_at_e, const VelocityBlocks& blocks_at_origin,
                         const Mat& k, double eps_p, double eps_q, double gain_box = 50.0);

/// Unpack the solver's decision vector back into (proportional, integral)
/// m x n gain blocks: first n columns of the stacked matrix are the
/// proportional part, last n the integral part.
std::pair<Mat, Mat> extract_gains(const Vec& y, std::size_t m, std::size_t n);
Vec pack_gains(const Mat& p_part, const Mat& i_part);

/// Stacked K = (Kp, Ki) as the m x 2n matrix used by the EVPs.
Mat stack_gains(const Mat& kp, const Mat& ki);

/// L_dtilde = ||inv(I(Kd))||_2 * (L_ddot + ref_accel).
double disturbance_bound(const VelocityBlocks& blocks, double l_ddot, double ref_accel);

/// Invariant-set radius 2*L*eps_p^(3/2)/tau (scalar-P case).
double eta_bound(double l_dtilde, double eps_p, double tau);

/// General-P invariant-set radius 2*L*lmax(P)^2 / (tau*sqrt(lmin(P))).
double eta_bound_general(double l_dtilde, const SymMatrix& p, double tau);

struct Thm3Check {
  bool holds = false;
  double margin = 0.0;  // lambda_max of the condition matrix
};

/// Robust-stability condition for the compensated closed loop: holds iff
/// lambda_max(sym(L2(e)dK) + sym(dL2 K) + sym(dL1) + ((tau-eps_q)/eps_p) I) <= 0.
Thm3Check check_thm3_condition(const VelocityBlocks& blocks_at_e,
                               const VelocityBlocks& blocks_at_origin, const Mat& k, const Mat& dk,
                               double eps_p, double eps_q, double tau);

/// Spectral abscissa (max real part of eigenvalues) of a general real matrix.
double hurwitz_check(const Mat& j);

/// Comparison-lemma envelope beta/alpha + (sqrt(V0) - beta/alpha)e^{-alpha t/2}.
double lemma3_bound(double v0, double alpha, double beta, double t);

/// End-to-end gain synthesis: solve the origin EVP (plain or H-inf flavored)
/// and report the resulting stacked K with its independently recomputed
/// spectral abscissa.
TuningResult tune_gains(const PlantModel& plant, const Vec& x_origin, const Vec& u_origin,
                        const Mat& kd, double eps_p, bool hinf, const LmiOptions& opt = {},
                        double gain_box = 50.0);

}  // namespace hdpid
