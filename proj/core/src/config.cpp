#include "hdpid/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace hdpid {

RunConfig::RunConfig() {
  Mat kp = Mat::identity(2) * 1.0159;
  Mat ki = Mat::identity(2) * 2.0406;
  gains = GainSet(kp, ki, Mat(2, 2));
}

double RunConfig::disturbance_amplitude() const {
  if (l_d_chi != l_d_gamma)
    throw ConfigError("config: per-channel disturbance amplitudes must match");
  return l_d_chi;
}

SimConfig RunConfig::sim_config(const GainSet& g) const {
  SimConfig sc;
  sc.t_end = t_end;
  sc.dt = dt;
  sc.x0 = x0();
  sc.u0 = u0();
  sc.x_ref = x_ref();
  sc.l_d = disturbance_amplitude();
  sc.seed = seed;
  sc.hold_interval = hold_interval;
  sc.eps_p = eps_p;
  sc.gains = g;
  sc.schedule = schedule;
  return sc;
}

Mat parse_matrix(const std::string& text) {
  std::vector<Vec> rows;
  std::stringstream rowstream(text);
  std::string row;
  while (std::getline(rowstream, row, ';')) {
    std::stringstream cell(row);
    Vec vals;
    double v;
    while (cell >> v) vals.push_back(v);
    if (!cell.eof()) throw ConfigError("matrix literal: bad number in '" + row + "'");
    if (!vals.empty()) rows.push_back(vals);
  }
  if (rows.empty()) throw ConfigError("matrix literal: empty");
  Mat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("matrix literal: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  Mat kp = cfg.gains.kp, ki = cfg.gains.ki, kd = cfg.gains.kd;

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: bad section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "plant.g") cfg.plant.g = to_double(key, val);
    else if (qual == "plant.V") cfg.plant.v = to_double(key, val);
    else if (qual == "plant.L_d_chi") cfg.l_d_chi = to_double(key, val);
    else if (qual == "plant.L_d_gamma") cfg.l_d_gamma = to_double(key, val);
    else if (qual == "plant.L_ddot") cfg.plant.l_ddot = to_double(key, val);
    else if (qual == "plant.phi_guard") cfg.plant.phi_guard = to_double(key, val);
    else if (qual == "plant.phi_max") {
      cfg.plant.input_box.hi[0] = to_double(key, val);
      cfg.plant.input_box.lo[0] = -cfg.plant.input_box.hi[0];
    } else if (qual == "plant.n_z_min") cfg.plant.input_box.lo[1] = to_double(key, val);
    else if (qual == "plant.n_z_max") cfg.plant.input_box.hi[1] = to_double(key, val);
    else if (qual == "plant.rate_limit") {
      const double r = to_double(key, val);
      cfg.plant.rate_box = BoxBounds{{-r, -r}, {r, r}};
    }
    else if (qual == "sim.T") cfg.t_end = to_double(key, val);
    else if (qual == "sim.dt") cfg.dt = to_double(key, val);
    else if (qual == "sim.gamma") cfg.gamma0 = to_double(key, val);
    else if (qual == "sim.chi") cfg.chi0 = to_double(key, val);
    else if (qual == "sim.phi") cfg.phi0 = to_double(key, val);
    else if (qual == "sim.n_z") cfg.nz0 = to_double(key, val);
    else if (qual == "sim.gamma_c") cfg.gamma_c = to_double(key, val);
    else if (qual == "sim.chi_c") cfg.chi_c = to_double(key, val);
    else if (qual == "sim.phi_c") cfg.phi_c = to_double(key, val);
    else if (qual == "sim.n_zc") cfg.nz_c = to_double(key, val);
    else if (qual == "sim.seed") cfg.seed = static_cast<std::uint64_t>(to_double(key, val));
    else if (qual == "sim.hold_interval") cfg.hold_interval = to_double(key, val);
    else if (qual == "certificate.eps_P") cfg.eps_p = to_double(key, val);
    else if (qual == "certificate.eps_Q") cfg.eps_q = to_double(key, val);
    else if (qual == "certificate.tau") cfg.tau = to_double(key, val);
    else if (qual == "certificate.ref_accel") cfg.ref_accel = to_double(key, val);
    else if (qual == "solver.gain_box") cfg.gain_box = to_double(key, val);
    else if (qual == "solver.rho") cfg.solver.tikhonov = to_double(key, val);
    else if (qual == "solver.strict_margin") cfg.solver.strict_margin = to_double(key, val);
    else if (qual == "solver.gap_tol") cfg.solver.gap_tol = to_double(key, val);
    else if (qual == "solver.newton_tol") cfg.solver.newton_tol = to_double(key, val);
    else if (qual == "solver.max_newton_steps")
      cfg.solver.max_newton_steps = static_cast<int>(to_double(key, val));
    else if (qual == "gains.K_p") kp = parse_matrix(val);
    else if (qual == "gains.K_i") ki = parse_matrix(val);
    else if (qual == "gains.K_d") kd = parse_matrix(val);
    else if (qual == "gains.dK_p") { cfg.d_kp = parse_matrix(val); cfg.has_dk = true; }
    else if (qual == "gains.dK_i") { cfg.d_ki = parse_matrix(val); cfg.has_dk = true; }
    else if (qual == "schedule.mode") {
      if (val == "none") cfg.schedule.mode = CompensationMode::None;
      else if (val == "once") cfg.schedule.mode = CompensationMode::Once;
      else if (val == "every") cfg.schedule.mode = CompensationMode::EveryN;
      else if (val == "threshold") cfg.schedule.mode = CompensationMode::Threshold;
      else throw ConfigError("config: unknown schedule mode '" + val + "'");
    }
    else if (qual == "schedule.every_n")
      cfg.schedule.every_n = static_cast<std::size_t>(to_double(key, val));
    else if (qual == "schedule.threshold") cfg.schedule.threshold = to_double(key, val);
    else if (qual == "output.dir") cfg.out_dir = val;
    else throw ConfigError("config: unknown key '" + qual + "'");
  }

  try {
    cfg.gains = GainSet(kp, ki, kd);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.has_dk) {
    if (cfg.d_kp.rows() == 0) cfg.d_kp = Mat(kp.rows(), kp.cols());
    if (cfg.d_ki.rows() == 0) cfg.d_ki = Mat(ki.rows(), ki.cols());
    if (cfg.d_kp.rows() != kp.rows() || cfg.d_kp.cols() != kp.cols() ||
        cfg.d_ki.rows() != ki.rows() || cfg.d_ki.cols() != ki.cols())
      throw ConfigError("config: dK dimensions do not match K");
  }

  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw ConfigError("config: T and dt must be positive");
  const double steps = cfg.t_end / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw ConfigError("config: T/dt must be an integer number of steps");
  if (!(cfg.eps_p > 0.0) || !(cfg.eps_q > 0.0) || !(cfg.tau > 0.0))
    throw ConfigError("config: eps_P, eps_Q, tau must be positive");
  if (std::abs(cfg.phi0) >= M_PI / 2.0 - cfg.plant.phi_guard)
    throw ConfigError("config: initial phi violates the singularity guard");
  if (cfg.l_d_chi < 0.0 || cfg.l_d_gamma < 0.0)
    throw ConfigError("config: disturbance bounds must be nonnegative");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace hdpid
