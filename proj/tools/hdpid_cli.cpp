// Command-line front end: tune / run / compare / eigs over the fixed-wing
// closed-loop pipeline. See README.md for the config file format.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hdpid/config.hpp"
#include "hdpid/metrics.hpp"
#include "hdpid/simulator.hpp"
#include "hdpid/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hdpid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string schedule;
};

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig() : parse_config_file(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.seed) cfg.seed = *args.seed;
  if (!args.schedule.empty()) {
    if (args.schedule == "once") {
      cfg.schedule = {CompensationMode::Once, 0, 0.0};
    } else if (args.schedule.rfind("every:", 0) == 0) {
      cfg.schedule = {CompensationMode::EveryN,
                      static_cast<std::size_t>(std::stoul(args.schedule.substr(6))), 0.0};
    } else if (args.schedule.rfind("threshold:", 0) == 0) {
      cfg.schedule = {CompensationMode::Threshold, 0, std::stod(args.schedule.substr(10))};
    } else {
      throw ConfigError("unknown --schedule value: " + args.schedule);
    }
  }
  return cfg;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

const char* status_name(LmiStatus s) {
  switch (s) {
    case LmiStatus::Optimal: return "optimal";
    case LmiStatus::Infeasible: return "infeasible";
    case LmiStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

int cmd_tune(const CommonArgs& args, bool hinf) {
  RunConfig cfg = load_config(args);
  AircraftPlant plant(cfg.plant);

  LmiOptions opt = cfg.solver;
  TuningResult res = tune_gains(plant, cfg.x_ref(), cfg.u_origin(), cfg.gains.kd, cfg.eps_p, hinf,
                                opt, cfg.gain_box);
  if (res.solver_status == LmiStatus::Infeasible) {
    std::cerr << "tune: EVP is infeasible at the configured origin\n";
    return kExitRuntime;
  }

  const std::size_t m = res.k.rows(), n = res.k.cols() / 2;
  Mat kp(m, n), ki(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      kp(r, c) = res.k(r, c);
      ki(r, c) = res.k(r, c + n);
    }

  json report;
  report["status"] = status_name(res.solver_status);
  report["lambda_star"] = res.lambda_star;
  report["spectral_abscissa_at_origin"] = res.spectral_abscissa_at_origin;
  report["newton_steps"] = res.iterations;
  report["K"] = mat_to_json(res.k);
  report["K_p"] = mat_to_json(kp);
  report["K_i"] = mat_to_json(ki);
  report["hinf"] = hinf;
  if (hinf) report["hinf_level_proxy"] = res.lambda_star;

  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "tune.json";
  std::ofstream out(path);
  out << report.dump(2) << '\n';
  std::cout << "wrote " << path.string() << "  (lambda* = " << res.lambda_star
            << ", abscissa = " << res.spectral_abscissa_at_origin << ")\n";
  return kExitOk;
}

struct PairedRun {
  Trajectory base, comp;
  Mat d_kp, d_ki;
};

PairedRun run_pair(const RunConfig& cfg) {
  AircraftPlant plant(cfg.plant);

  SimConfig base_cfg = cfg.sim_config(cfg.gains);
  base_cfg.schedule.mode = CompensationMode::None;

  PairedRun pr;
  pr.base = run_closed_loop(plant, base_cfg);

  pr.d_kp = Mat(2, 2);
  pr.d_ki = Mat(2, 2);
  CompensationHook hook = [&](const Vec& x, const Vec& u, const GainSet& g) {
    if (cfg.has_dk) {
      pr.d_kp = cfg.d_kp;
      pr.d_ki = cfg.d_ki;
      return apply_compensation(g, cfg.d_kp, cfg.d_ki);
    }
    auto at_e = velocity_blocks(plant, x, u, g.kd);
    auto at_origin = velocity_blocks(plant, cfg.x_ref(), cfg.u_origin(), g.kd);
    const Mat k = stack_gains(g.kp, g.ki);
    LmiProblem evp2 = assemble_evp2(at_e, at_origin, k, cfg.eps_p, cfg.eps_q, cfg.gain_box);
    LmiSolution sol = solve(evp2, cfg.solver);
    if (sol.status == LmiStatus::Infeasible) return g;
    auto [dkp, dki] = extract_gains(sol.y_star, g.inputs(), g.states());
    pr.d_kp = dkp;
    pr.d_ki = dki;
    return apply_compensation(g, dkp, dki);
  };

  SimConfig comp_cfg = cfg.sim_config(cfg.gains);
  if (comp_cfg.schedule.mode == CompensationMode::None)
    comp_cfg.schedule.mode = CompensationMode::Once;
  pr.comp = run_closed_loop(plant, comp_cfg, hook);
  return pr;
}

void write_eigs_csv(const RunConfig& cfg, const Mat& d_kp, const Mat& d_ki, const fs::path& path) {
  AircraftPlant plant(cfg.plant);
  auto origin = velocity_blocks(plant, cfg.x_ref(), cfg.u_origin(), cfg.gains.kd);
  const Mat k = stack_gains(cfg.gains.kp, cfg.gains.ki);
  const Mat k_comp = stack_gains(cfg.gains.kp + d_kp, cfg.gains.ki + d_ki);

  std::ofstream out(path, std::ios::binary);
  out << "matrix,re,im\n";
  for (const auto& z : eigenvalues_general(origin.l1 + origin.l2 * k))
    out << "J_K," << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
  for (const auto& z : eigenvalues_general(origin.l1 + origin.l2 * k_comp))
    out << "J_KdK," << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
}

int cmd_run(const CommonArgs& args, int sweep, int jobs) {
  RunConfig cfg = load_config(args);
  fs::create_directories(cfg.out_dir);

  if (sweep > 1) {
    // Independent seeds only; each worker gets its own config copy.
    std::vector<std::future<std::string>> futures;
    std::atomic<int> next{0};
    auto worker = [&]() {
      std::ostringstream lines;
      for (int s = next.fetch_add(1); s < sweep; s = next.fetch_add(1)) {
        RunConfig c = cfg;
        c.seed = static_cast<std::uint64_t>(s);
        PairedRun pr = run_pair(c);
        CompareReport rep = compare_report(pr.base, pr.comp);
        lines << s << ',' << format_double(rep.base[0].itae) << ','
              << format_double(rep.compensated[0].itae) << ','
              << format_double(rep.base[0].max_overshoot) << ','
              << format_double(rep.compensated[0].max_overshoot) << '\n';
      }
      return lines.str();
    };
    const int nworkers = std::max(1, std::min(jobs, sweep));
    futures.reserve(nworkers);
    for (int w = 0; w < nworkers; ++w) futures.push_back(std::async(std::launch::async, worker));
    std::ofstream out(fs::path(cfg.out_dir) / "sweep.csv", std::ios::binary);
    out << "seed,itae_e_chi_K,itae_e_chi_KdK,mo_e_chi_K,mo_e_chi_KdK\n";
    for (auto& f : futures) out << f.get();
    std::cout << "wrote " << (fs::path(cfg.out_dir) / "sweep.csv").string() << '\n';
    return kExitOk;
  }

  PairedRun pr = run_pair(cfg);
  write_trajectory_csv(pr.base, (fs::path(cfg.out_dir) / "run_K.csv").string());
  write_trajectory_csv(pr.comp, (fs::path(cfg.out_dir) / "run_KdK.csv").string());

  CompareReport rep = compare_report(pr.base, pr.comp);
  write_report_csv(rep, (fs::path(cfg.out_dir) / "metrics.csv").string());
  write_eigs_csv(cfg, pr.d_kp, pr.d_ki, fs::path(cfg.out_dir) / "eigs.csv");

  std::cout << format_report_table(rep);
  std::cout << "wrote run_K.csv, run_KdK.csv, metrics.csv, eigs.csv under " << cfg.out_dir << '\n';
  return kExitOk;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path);
  Trajectory traj;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    Vec vals;
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 12) throw ConfigError("bad CSV row in " + path);
    traj.t.push_back(vals[0]);
    traj.x.push_back({vals[1], vals[2]});
    traj.e.push_back({vals[3], vals[4]});
    traj.edot.push_back({vals[5], vals[6]});
    traj.u.push_back({vals[7], vals[8]});
    traj.udot_applied.push_back({0.0, 0.0});
    traj.d.push_back({vals[9], vals[10]});
    traj.lyap_norm.push_back(vals[11]);
  }
  return traj;
}

int cmd_compare(const std::string& base_csv, const std::string& comp_csv,
                const std::string& out_dir) {
  Trajectory base = read_trajectory_csv(base_csv);
  Trajectory comp = read_trajectory_csv(comp_csv);
  CompareReport rep = compare_report(base, comp);
  std::cout << format_report_table(rep);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_report_csv(rep, (fs::path(out_dir) / "metrics.csv").string());
  }
  return kExitOk;
}

int cmd_eigs(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  fs::create_directories(cfg.out_dir);
  const Mat d_kp = cfg.has_dk ? cfg.d_kp : Mat(2, 2);
  const Mat d_ki = cfg.has_dk ? cfg.d_ki : Mat(2, 2);
  const fs::path path = fs::path(cfg.out_dir) / "eigs.csv";
  write_eigs_csv(cfg, d_kp, d_ki, path);

  std::ifstream echo(path);
  std::cout << echo.rdbuf();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-gain PID tuning and closed-loop simulation"};
  app.require_subcommand(1);

  CommonArgs common;
  bool hinf = false;
  int sweep = 1, jobs = 1;
  std::string base_csv, comp_csv, compare_out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Config file path");
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_option("--seed", common.seed, "Disturbance seed");
    sub->add_option("--schedule", common.schedule,
                    "Compensation schedule: once, every:N, threshold:X");
  };

  auto* tune = app.add_subcommand("tune", "Solve the origin EVP and write tune.json");
  add_common(tune);
  tune->add_flag("--hinf", hinf, "Use the bounded-real-lemma EVP variant");

  auto* run = app.add_subcommand("run", "Simulate K and K+dK runs, write CSVs and metrics");
  add_common(run);
  run->add_option("--sweep", sweep, "Run seeds 0..N-1 and write sweep.csv");
  run->add_option("--jobs", jobs, "Parallel workers for --sweep");

  auto* compare = app.add_subcommand("compare", "Metrics table for two trajectory CSVs");
  compare->add_option("base_csv", base_csv, "Uncompensated run CSV")->required();
  compare->add_option("comp_csv", comp_csv, "Compensated run CSV")->required();
  compare->add_option("--out", compare_out, "Directory for metrics.csv");

  auto* eigs = app.add_subcommand("eigs", "Eigenvalues of the origin closed-loop matrices");
  add_common(eigs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (tune->parsed()) return cmd_tune(common, hinf);
    if (run->parsed()) return cmd_run(common, sweep, jobs);
    if (compare->parsed()) return cmd_compare(base_csv, comp_csv, compare_out);
    if (eigs->parsed()) return cmd_eigs(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
