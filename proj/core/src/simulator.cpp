#include "hdpid/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hdpid {

Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, const Vec& state, double t,
             double dt) {
  const auto add_scaled = [](const Vec& a, const Vec& b, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const Vec k1 = f(t, state);
  const Vec k2 = f(t + 0.5 * dt, add_scaled(state, k1, 0.5 * dt));
  const Vec k3 = f(t + 0.5 * dt, add_scaled(state, k2, 0.5 * dt));
  const Vec k4 = f(t + dt, add_scaled(state, k3, dt));
  Vec next(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    next[i] = state[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(next[i])) throw IntegrationBlowup("rk4_step: non-finite state", 0);
  }
  return next;
}

namespace {

double lyap_norm_scalar(double eps_p, const Vec& edot, const Vec& e) {
  double s = 0.0;
  for (double v : edot) s += v * v;
  for (double v : e) s += v * v;
  return std::sqrt(eps_p * s);
}

}  // namespace

Trajectory run_closed_loop(const PlantModel& plant, const SimConfig& cfg,
                           const CompensationHook& compensate) {
  const std::size_t n = plant.state_dim();
  const std::size_t m = plant.input_dim();
  if (cfg.x0.size() != n || cfg.u0.size() != m || cfg.x_ref.size() != n)
    throw InvalidInput("run_closed_loop: config dimensions");
  if (!(cfg.dt > 0.0)) throw InvalidInput("run_closed_loop: dt must be positive");
  const double steps_real = cfg.t_end / cfg.dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
    throw InvalidInput("run_closed_loop: T/dt must be an integer step count");

  const double hold = cfg.hold_interval > 0.0 ? cfg.hold_interval : cfg.dt;
  DisturbanceSampler sampler(n, cfg.l_d, cfg.seed, hold);
  const BoxBounds ibox = plant.input_box();
  const BoxBounds rbox = plant.rate_box();

  GainSet gains = cfg.gains;
  ErrorAccelEstimator accel(n, cfg.dt);

  Trajectory traj;
  traj.t.reserve(steps + 1);

  Vec x = cfg.x0;
  Vec u = clamp_box(cfg.u0, ibox);

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    const Vec d = sampler.sample(t);

    Vec fx, e(n), edot(n);
    try {
      fx = plant.eval_f(x, u);
    } catch (const NearSingularInput& ex) {
      throw NearSingularInput(std::string(ex.what()) + " at step " + std::to_string(k));
    }
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = cfg.x_ref[i] - x[i];
      edot[i] = -(fx[i] + d[i]);  // constant reference: xr_dot = 0
    }
    const Vec eddot = gains.kd_is_zero() ? Vec(n, 0.0) : accel.update(edot);

    const bool last = (k == steps);
    if (!last && compensate) {
      bool fire = false;
      switch (cfg.schedule.mode) {
        case CompensationMode::None: break;
        case CompensationMode::Once: fire = (k == 0); break;
        case CompensationMode::EveryN:
          fire = cfg.schedule.every_n > 0 && k % cfg.schedule.every_n == 0;
          break;
        case CompensationMode::Threshold:
          fire = lyap_norm_scalar(1.0, edot, e) > cfg.schedule.threshold;
          break;
      }
      if (fire) gains = compensate(x, u, gains);
    }

    const Vec udot = clamp_rate(control_rate(gains, e, edot, eddot), rbox);

    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.e.push_back(e);
    traj.edot.push_back(edot);
    traj.u.push_back(u);
    traj.udot_applied.push_back(udot);
    traj.d.push_back(d);
    traj.lyap_norm.push_back(lyap_norm_scalar(cfg.eps_p, edot, e));
    if (last) break;

    // Joint (x, u) step with d and udot frozen over the interval.
    Vec z(n + m);
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i];
    for (std::size_t i = 0; i < m; ++i) z[n + i] = u[i];
    auto deriv = [&](double, const Vec& zz) {
      Vec xs(zz.begin(), zz.begin() + n);
      Vec us(zz.begin() + n, zz.end());
      Vec fs = plant.eval_f(xs, us);
      Vec dz(n + m);
      for (std::size_t i = 0; i < n; ++i) dz[i] = fs[i] + d[i];
      for (std::size_t i = 0; i < m; ++i) dz[n + i] = udot[i];
      return dz;
    };
    try {
      z = rk4_step(deriv, z, t, cfg.dt);
    } catch (const IntegrationBlowup& ex) {
      throw IntegrationBlowup(ex.what(), k);
    } catch (const NearSingularInput& ex) {
      throw NearSingularInput(std::string(ex.what()) + " at step " + std::to_string(k));
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i];
    for (std::size_t i = 0; i < m; ++i) u[i] = z[n + i];
    u = clamp_box(u, ibox);
  }
  return traj;
}

Trajectory run_ltv_surrogate(const std::function<Mat(double)>& j_fn,
                             const std::function<Vec(double)>& d_fn, const Vec& e0,
                             const SymMatrix& p, double t_end, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("run_ltv_surrogate: dt must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));

  Trajectory traj;
  Vec e = e0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec d = d_fn(t);
    Vec edot = j_fn(t) * e;
    for (std::size_t i = 0; i < e.size(); ++i) edot[i] += d[i];

    traj.t.push_back(t);
    traj.x.push_back(e);
    traj.e.push_back(e);
    traj.edot.push_back(edot);
    traj.d.push_back(d);
    traj.lyap_norm.push_back(std::sqrt(std::max(0.0, dot(e, p.mat() * e))));
    if (k == steps) break;

    auto deriv = [&](double tt, const Vec& ee) {
      Vec de = j_fn(tt) * ee;
      const Vec dd = d_fn(tt);
      for (std::size_t i = 0; i < de.size(); ++i) de[i] += dd[i];
      return de;
    };
    try {
      e = rk4_step(deriv, e, t, dt);
    } catch (const IntegrationBlowup& ex) {
      throw IntegrationBlowup(ex.what(), k);
    }
  }
  return traj;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  if (!traj.x.empty() && (traj.x[0].size() != 2 || traj.u.empty() || traj.u[0].size() != 2))
    throw InvalidInput("write_trajectory_csv: expects the 2-state/2-input layout");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("write_trajectory_csv: cannot open " + path);
  out << "t,chi,gamma,e_chi,e_gamma,de_chi,de_gamma,phi,nz,d_chi,d_gamma,lyap_norm\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.t[k]) << ',' << format_double(traj.x[k][0]) << ','
        << format_double(traj.x[k][1]) << ',' << format_double(traj.e[k][0]) << ','
        << format_double(traj.e[k][1]) << ',' << format_double(traj.edot[k][0]) << ','
        << format_double(traj.edot[k][1]) << ',' << format_double(traj.u[k][0]) << ','
        << format_double(traj.u[k][1]) << ',' << format_double(traj.d[k][0]) << ','
        << format_double(traj.d[k][1]) << ',' << format_double(traj.lyap_norm[k]) << '\n';
  }
}

}  // namespace hdpid
