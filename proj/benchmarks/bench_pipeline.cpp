#include <benchmark/benchmark.h>

#include <random>

#include "hdpid/config.hpp"
#include "hdpid/lmi.hpp"
#include "hdpid/simulator.hpp"
#include "hdpid/tuner.hpp"

using namespace hdpid;

namespace {

Mat random_sym(std::size_t d, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = dist(gen);
  return sym2(m) * 0.5;
}

void bench_sym_eig(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Mat a = random_sym(d, 7);
  for (auto _ : state) {
    auto eig = sym_eig(SymMatrix(a));
    benchmark::DoNotOptimize(eig.eigenvalues.data());
  }
}
BENCHMARK(bench_sym_eig)->Arg(4)->Arg(8)->Arg(12);

void bench_evp1_solve(benchmark::State& state) {
  RunConfig cfg;
  AircraftPlant plant(cfg.plant);
  auto blocks = velocity_blocks(plant, cfg.x_ref(), cfg.u_origin(), cfg.gains.kd);
  LmiProblem prob = assemble_evp1(blocks);
  for (auto _ : state) {
    LmiSolution sol = solve(prob);
    benchmark::DoNotOptimize(sol.objective_value);
  }
}
BENCHMARK(bench_evp1_solve)->Unit(benchmark::kMillisecond);

void bench_evp2_solve(benchmark::State& state) {
  RunConfig cfg;
  AircraftPlant plant(cfg.plant);
  auto origin = velocity_blocks(plant, cfg.x_ref(), cfg.u_origin(), cfg.gains.kd);
  auto at_e = velocity_blocks(plant, cfg.x0(), cfg.u0(), cfg.gains.kd);
  Mat k = stack_gains(cfg.gains.kp, cfg.gains.ki);
  LmiProblem prob = assemble_evp2(at_e, origin, k, cfg.eps_p, cfg.eps_q);
  for (auto _ : state) {
    LmiSolution sol = solve(prob);
    benchmark::DoNotOptimize(sol.objective_value);
  }
}
BENCHMARK(bench_evp2_solve)->Unit(benchmark::kMillisecond);

void bench_closed_loop_second(benchmark::State& state) {
  RunConfig cfg;
  cfg.t_end = 1.0;
  AircraftPlant plant(cfg.plant);
  SimConfig sc = cfg.sim_config(cfg.gains);
  for (auto _ : state) {
    Trajectory traj = run_closed_loop(plant, sc);
    benchmark::DoNotOptimize(traj.lyap_norm.data());
  }
}
BENCHMARK(bench_closed_loop_second)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
