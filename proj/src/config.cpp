#include "pffc/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pffc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
  }
}

/// "auto" maps to the negative marker resolved later against the mesh.
double parse_auto_double(const std::string& v, int line) {
  if (v == "auto") return -1.0;
  return parse_double(v, line);
}

}  // namespace

double ExperimentConfig::resolved_epsilon() const {
  return epsilon > 0.0 ? epsilon : 4.0 * std::sqrt(2.0) / mesh_n;
}

double ExperimentConfig::resolved_phid_halfwidth() const {
  return phid_slit.halfwidth >= 0.0 ? phid_slit.halfwidth
                                    : phid_halfwidth_cells * std::sqrt(2.0) / mesh_n;
}

ModelParams ExperimentConfig::model_params() const {
  ModelParams p;
  p.gc = gc;
  p.eps = resolved_epsilon();
  p.kappa = kappa;
  p.gamma = gamma;
  p.eta = eta;
  p.eta0 = eta0;
  std::tie(p.mu, p.lambda) = lame_from_engineering(youngs_modulus, poisson_ratio);
  return p;
}

CostParams ExperimentConfig::cost_params(const Mesh& mesh) const {
  CostParams c;
  c.alpha = alpha;
  c.phi_d = phid_slit.empty()
                ? ones_field(mesh)
                : interpolate_slit_field(mesh, phid_slit.x0, phid_slit.x1,
                                         resolved_phid_halfwidth());
  c.q_d = Control::Constant(mesh.nodes_per_side(), q_nominal);
  return c;
}

FieldVector ExperimentConfig::initial_state(const Mesh& mesh) const {
  const ScalarField phi0 =
      phi0_slit.empty() ? ones_field(mesh)
                        : interpolate_slit_field(mesh, phi0_slit.x0, phi0_slit.x1,
                                                 phi0_slit.halfwidth);
  return make_state(mesh, phi0);
}

std::vector<double> ExperimentConfig::times() const {
  return uniform_times(final_time, timesteps);
}

std::vector<int> ExperimentConfig::snapshot_indices() const {
  std::vector<int> out;
  if (snapshots == "none" || snapshots.empty()) return out;
  if (snapshots == "auto") {
    // The reference indices 20, 30, 40 of a 40-step run, scaled to M.
    for (double f : {0.5, 0.75, 1.0}) {
      const int idx = static_cast<int>(std::lround(f * timesteps));
      if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
  }
  std::stringstream ss(snapshots);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    const int idx = parse_int(t, 0);
    if (idx < 0 || idx > timesteps)
      throw ConfigError("snapshot index " + t + " outside 0.." + std::to_string(timesteps));
    out.push_back(idx);
  }
  return out;
}

std::string ExperimentConfig::resolved_out_dir() const {
  if (!out_dir.empty()) return out_dir;
  if (const char* env = std::getenv("PFFC_OUT"); env && *env) return env;
  return "pffc_out";
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.preset_name = name;
  if (name == "example1") {
    c.opt.newton_tol = 2e-12;
  } else if (name == "example2") {
    c.mesh_n = 128;
    c.alpha = 1e-10;
    c.q_nominal = 3e3;
    c.phi0_slit = {0.25, 0.75, 0.0};
    c.phid_slit = {0.0, 0.25, -1.0};
    c.phid_halfwidth_cells = 2.0;
    c.opt.newton_tol = 1e-11;
  } else if (name == "desk") {
    c.mesh_n = 8;
    c.timesteps = 5;
    c.gamma = 1e3;
    c.opt.newton_tol = 1e-8;
    c.fwd.rel_tol = 1e-12;
    c.fwd.abs_tol = 1e-14;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");

    if (key == "mesh_n") config.mesh_n = parse_int(val, lineno);
    else if (key == "timesteps") config.timesteps = parse_int(val, lineno);
    else if (key == "final_time") config.final_time = parse_double(val, lineno);
    else if (key == "gc") config.gc = parse_double(val, lineno);
    else if (key == "epsilon") config.epsilon = parse_auto_double(val, lineno);
    else if (key == "kappa") config.kappa = parse_double(val, lineno);
    else if (key == "gamma") config.gamma = parse_double(val, lineno);
    else if (key == "eta") config.eta = parse_double(val, lineno);
    else if (key == "eta0") config.eta0 = parse_double(val, lineno);
    else if (key == "youngs_modulus") config.youngs_modulus = parse_double(val, lineno);
    else if (key == "poisson_ratio") config.poisson_ratio = parse_double(val, lineno);
    else if (key == "alpha") config.alpha = parse_double(val, lineno);
    else if (key == "q_initial") config.q_initial = parse_double(val, lineno);
    else if (key == "q_nominal") config.q_nominal = parse_double(val, lineno);
    else if (key == "phi0_x0") config.phi0_slit.x0 = parse_double(val, lineno);
    else if (key == "phi0_x1") config.phi0_slit.x1 = parse_double(val, lineno);
    else if (key == "phi0_halfwidth") config.phi0_slit.halfwidth = parse_double(val, lineno);
    else if (key == "phid_x0") config.phid_slit.x0 = parse_double(val, lineno);
    else if (key == "phid_x1") config.phid_slit.x1 = parse_double(val, lineno);
    else if (key == "phid_halfwidth") config.phid_slit.halfwidth = parse_auto_double(val, lineno);
    else if (key == "phid_halfwidth_cells") config.phid_halfwidth_cells = parse_double(val, lineno);
    else if (key == "newton_tol") config.opt.newton_tol = parse_double(val, lineno);
    else if (key == "max_newton") config.opt.max_newton = parse_int(val, lineno);
    else if (key == "cg_forcing") config.opt.cg_forcing = parse_double(val, lineno);
    else if (key == "cg_max") config.opt.cg_max = parse_int(val, lineno);
    else if (key == "damping") config.opt.damping = parse_double(val, lineno);
    else if (key == "fwd_rel_tol") config.fwd.rel_tol = parse_double(val, lineno);
    else if (key == "fwd_abs_tol") config.fwd.abs_tol = parse_double(val, lineno);
    else if (key == "fwd_max_iter") config.fwd.max_iter = parse_int(val, lineno);
    else if (key == "fwd_max_backtracks") config.fwd.max_backtracks = parse_int(val, lineno);
    else if (key == "out_dir") config.out_dir = val;
    else if (key == "snapshots") config.snapshots = val;
    else
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig config = preset("example1");
  apply_config_file(config, path);
  return config;
}

}  // namespace pffc
