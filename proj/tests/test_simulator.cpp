#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hdpid/simulator.hpp"

using namespace hdpid;

namespace {

SimConfig baseline_config() {
  SimConfig cfg;
  cfg.t_end = 2.0;
  cfg.dt = 1e-3;
  cfg.x0 = {M_PI / 3, M_PI / 4};
  cfg.u0 = {M_PI / 3, 1.0};
  cfg.x_ref = {0.0, 0.0};
  cfg.l_d = 0.5;
  cfg.seed = 7;
  cfg.gains = GainSet(Mat::identity(2) * 1.0159, Mat::identity(2) * 2.0406, Mat(2, 2));
  return cfg;
}

}  // namespace

TEST_CASE("rk4_step integrates polynomial derivatives exactly") {
  // xdot = t^3 has a degree-4 solution; RK4 is exact through order 4.
  auto f = [](double t, const Vec&) { return Vec{t * t * t}; };
  Vec x = rk4_step(f, {0.0}, 0.0, 2.0);
  CHECK(x[0] == doctest::Approx(4.0).epsilon(1e-12));

  auto lin = [](double, const Vec& s) { return Vec{s[0]}; };
  Vec y = {1.0};
  const double dt = 0.01;
  for (int i = 0; i < 100; ++i) y = rk4_step(lin, y, i * dt, dt);
  CHECK(y[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("rk4_step shows fourth-order error scaling") {
  auto f = [](double, const Vec& s) { return Vec{-2.0 * s[0]}; };
  auto err_at = [&](double dt) {
    Vec y = {1.0};
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) y = rk4_step(f, y, i * dt, dt);
    return std::abs(y[0] - std::exp(-2.0));
  };
  const double ratio = err_at(0.02) / err_at(0.01);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("rk4_step throws on non-finite derivatives") {
  auto f = [](double, const Vec&) { return Vec{std::nan("")}; };
  CHECK_THROWS_AS(rk4_step(f, {1.0}, 0.0, 0.1), IntegrationBlowup);
}

TEST_CASE("run_closed_loop holds the equilibrium without disturbance") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  cfg.x0 = {0.0, 0.0};
  cfg.u0 = {0.0, 1.0};
  cfg.l_d = 0.0;
  cfg.t_end = 1.0;
  auto traj = run_closed_loop(plant, cfg);
  REQUIRE(traj.size() == 1001);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(std::abs(traj.e[k][0]) <= 1e-12);
    CHECK(std::abs(traj.e[k][1]) <= 1e-12);
    CHECK(std::abs(traj.u[k][0]) <= 1e-12);
    CHECK(std::abs(traj.u[k][1] - 1.0) <= 1e-12);
  }
}

TEST_CASE("run_closed_loop record invariants") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  auto traj = run_closed_loop(plant, cfg);
  REQUIRE(traj.size() == 2001);
  const auto box = plant.input_box();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CHECK(traj.t[k] == doctest::Approx(k * cfg.dt).epsilon(1e-12));
    // e = x_ref - x
    CHECK(traj.e[k][0] == doctest::Approx(cfg.x_ref[0] - traj.x[k][0]).epsilon(1e-12));
    CHECK(traj.e[k][1] == doctest::Approx(cfg.x_ref[1] - traj.x[k][1]).epsilon(1e-12));
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(traj.u[k][i] >= box.lo[i] - 1e-12);
      CHECK(traj.u[k][i] <= box.hi[i] + 1e-12);
      CHECK(std::abs(traj.d[k][i]) <= cfg.l_d / 2);
    }
    const double n = std::sqrt(cfg.eps_p) *
                     std::sqrt(dot(traj.edot[k], traj.edot[k]) + dot(traj.e[k], traj.e[k]));
    CHECK(traj.lyap_norm[k] == doctest::Approx(n).epsilon(1e-12));
  }
}

TEST_CASE("run_closed_loop regulates the fixed-wing errors to near zero") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  cfg.t_end = 20.0;
  auto traj = run_closed_loop(plant, cfg);
  const Vec& ef = traj.e.back();
  CHECK(std::abs(ef[0]) < 0.05);
  CHECK(std::abs(ef[1]) < 0.05);
}

TEST_CASE("run_closed_loop is deterministic per seed and diverges across seeds") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  auto a = run_closed_loop(plant, cfg);
  auto b = run_closed_loop(plant, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.x[k][0] == b.x[k][0]);
    CHECK(a.x[k][1] == b.x[k][1]);
    CHECK(a.d[k][0] == b.d[k][0]);
  }

  cfg.seed = 8;
  auto c = run_closed_loop(plant, cfg);
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a.d[k][0] - c.d[k][0]));
  CHECK(diff > 0.0);
}

TEST_CASE("compensation hook fires per schedule") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  cfg.t_end = 0.1;

  int calls = 0;
  CompensationHook hook = [&](const Vec&, const Vec&, const GainSet& g) {
    ++calls;
    return g;
  };

  cfg.schedule.mode = CompensationMode::None;
  run_closed_loop(plant, cfg, hook);
  CHECK(calls == 0);

  cfg.schedule.mode = CompensationMode::Once;
  run_closed_loop(plant, cfg, hook);
  CHECK(calls == 1);

  calls = 0;
  cfg.schedule.mode = CompensationMode::EveryN;
  cfg.schedule.every_n = 25;
  run_closed_loop(plant, cfg, hook);
  CHECK(calls == 4);

  calls = 0;
  cfg.schedule.mode = CompensationMode::Threshold;
  cfg.schedule.threshold = 1e9;
  run_closed_loop(plant, cfg, hook);
  CHECK(calls == 0);

  cfg.schedule.threshold = 0.0;
  run_closed_loop(plant, cfg, hook);
  CHECK(calls >= 1);
}

TEST_CASE("compensated gains actually change the trajectory") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  auto base = run_closed_loop(plant, cfg);

  cfg.schedule.mode = CompensationMode::Once;
  CompensationHook hook = [](const Vec&, const Vec&, const GainSet& g) {
    return apply_compensation(g, Mat::identity(2) * 0.5, Mat(2, 2));
  };
  auto comp = run_closed_loop(plant, cfg, hook);
  double diff = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k)
    diff = std::max(diff, std::abs(base.x[k][1] - comp.x[k][1]));
  CHECK(diff > 1e-6);
}

TEST_CASE("run_ltv_surrogate matches the scalar analytic solution") {
  // edot = -e + 1  ->  e(t) = 1 + (e0 - 1) exp(-t).
  auto j = [](double) { return Mat(1, 1, {-1.0}); };
  auto d = [](double) { return Vec{1.0}; };
  auto traj = run_ltv_surrogate(j, d, {3.0}, SymMatrix(Mat::identity(1)), 2.0, 1e-3);
  REQUIRE(traj.size() == 2001);
  for (std::size_t k = 0; k < traj.size(); k += 100) {
    const double t = traj.t[k];
    CHECK(traj.e[k][0] == doctest::Approx(1.0 + 2.0 * std::exp(-t)).epsilon(1e-9));
    CHECK(traj.lyap_norm[k] == doctest::Approx(std::abs(traj.e[k][0])).epsilon(1e-12));
  }
}

TEST_CASE("run_ltv_surrogate Lyapunov norm decays for a stable system") {
  auto j = [](double) { return Mat(2, 2, {-1.0, 0.2, -0.2, -1.5}); };
  auto d = [](double) { return Vec{0.0, 0.0}; };
  SymMatrix p(Mat::identity(2) * 2.0);
  auto traj = run_ltv_surrogate(j, d, {1.0, -1.0}, p, 3.0, 1e-3);
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.lyap_norm[k] <= traj.lyap_norm[k - 1] + 1e-12);
  CHECK(traj.lyap_norm[0] == doctest::Approx(2.0));
}

TEST_CASE("write_trajectory_csv emits the fixed header and stable formatting") {
  AircraftPlant plant;
  SimConfig cfg = baseline_config();
  cfg.t_end = 0.01;
  auto traj = run_closed_loop(plant, cfg);
  const std::string path = "test_traj_out.csv";
  write_trajectory_csv(traj, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,chi,gamma,e_chi,e_gamma,de_chi,de_gamma,phi,nz,d_chi,d_gamma,lyap_nor"
                  "m");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == traj.size());
  in.close();

  std::ostringstream first;
  {
    std::ifstream again(path);
    std::getline(again, line);
    std::getline(again, line);
    first << line;
  }
  std::stringstream ss(first.str());
  std::string cell;
  std::getline(ss, cell, ',');
  CHECK(cell == format_double(traj.t[0]));
  std::remove(path.c_str());
}

TEST_CASE("format_double round-trips and is minimal") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(std::stod(format_double(M_PI)) == doctest::Approx(M_PI).epsilon(1e-11));
}
