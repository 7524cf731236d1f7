#include "pffc/config.hpp"

#include "pffc/experiment.hpp"
#include "pffc/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pffc;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("config_io");

TEST_CASE("preset example1 resolves the published setup") {
  const ExperimentConfig c = preset("example1");
  CHECK(c.mesh_n == 64);
  CHECK(c.timesteps == 40);
  CHECK(c.final_time == 1.0);
  CHECK(c.resolved_epsilon() == doctest::Approx(0.0884).epsilon(2e-3));
  CHECK(c.gamma == 1e5);
  CHECK(c.eta == 1e3);
  CHECK(c.kappa == 1e-10);
  CHECK(c.alpha == 4.75e-10);
  CHECK(c.q_nominal == 1e3);
  CHECK(c.q_initial == 1.0);
  CHECK(c.gc == 1.0);
  CHECK(c.youngs_modulus == 1e6);
  CHECK(c.poisson_ratio == 0.2);
  CHECK(c.phi0_slit.x0 == 0.5);
  CHECK(c.phi0_slit.x1 == 1.0);
  CHECK(c.phi0_slit.halfwidth == 0.0);
  CHECK(c.phid_slit.x0 == 0.25);
  CHECK(c.phid_slit.x1 == 0.5);
  CHECK(c.resolved_phid_halfwidth() == doctest::Approx(std::sqrt(2.0) / 64.0));
  CHECK(c.opt.newton_tol == 2e-12);
}

TEST_CASE("preset example2 resolves the centered-notch setup") {
  const ExperimentConfig c = preset("example2");
  CHECK(c.mesh_n == 128);
  CHECK(c.resolved_epsilon() == doctest::Approx(0.0442).epsilon(2e-3));
  CHECK(c.alpha == 1e-10);
  CHECK(c.q_nominal == 3e3);
  CHECK(c.phi0_slit.x0 == 0.25);
  CHECK(c.phi0_slit.x1 == 0.75);
  CHECK(c.phid_slit.x0 == 0.0);
  CHECK(c.phid_slit.x1 == 0.25);
  CHECK(c.resolved_phid_halfwidth() == doctest::Approx(2.0 * std::sqrt(2.0) / 128.0));
  CHECK(c.opt.newton_tol == 1e-11);
}

TEST_CASE("auto quantities follow a mesh override") {
  ExperimentConfig c = preset("example1");
  c.mesh_n = 32;
  CHECK(c.resolved_epsilon() == doctest::Approx(4.0 * std::sqrt(2.0) / 32.0));
  CHECK(c.resolved_phid_halfwidth() == doctest::Approx(std::sqrt(2.0) / 32.0));
  c.epsilon = 0.05;  // explicit values win
  CHECK(c.resolved_epsilon() == 0.05);
}

TEST_CASE("config files override presets and reject junk") {
  SUBCASE("override with comments and blank lines") {
    const std::string path = write_tmp("pffc_ok.cfg",
                                       "# comment line\n"
                                       "gamma = 1e3\n"
                                       "\n"
                                       "mesh_n = 16   # trailing comment\n"
                                       "epsilon = auto\n");
    ExperimentConfig c = load_config(path);
    CHECK(c.gamma == 1e3);
    CHECK(c.mesh_n == 16);
    CHECK(c.preset_name == "example1");
    CHECK(c.resolved_epsilon() == doctest::Approx(4.0 * std::sqrt(2.0) / 16.0));
  }
  SUBCASE("unknown key carries the line number") {
    const std::string path = write_tmp("pffc_bad1.cfg", "gamma = 1e3\nnot_a_key = 7\n");
    try {
      load_config(path);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      CHECK(std::string(e.what()).find("not_a_key") != std::string::npos);
    }
  }
  SUBCASE("malformed number") {
    const std::string path = write_tmp("pffc_bad2.cfg", "gamma = fast\n");
    CHECK_THROWS_AS(load_config(path), ConfigError);
  }
  SUBCASE("missing separator") {
    const std::string path = write_tmp("pffc_bad3.cfg", "gamma 1e3\n");
    CHECK_THROWS_AS(load_config(path), ConfigError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_config("/nonexistent.cfg"), ConfigError); }
  SUBCASE("unknown preset") { CHECK_THROWS_AS(preset("example3"), ConfigError); }
}

TEST_CASE("snapshot index parsing") {
  ExperimentConfig c = preset("example1");
  c.snapshots = "none";
  CHECK(c.snapshot_indices().empty());
  c.snapshots = "auto";
  CHECK(c.snapshot_indices() == std::vector<int>{20, 30, 40});
  c.timesteps = 20;
  CHECK(c.snapshot_indices() == std::vector<int>{10, 15, 20});
  c.snapshots = "3, 5";
  CHECK(c.snapshot_indices() == std::vector<int>{3, 5});
  c.snapshots = "99";
  CHECK_THROWS_AS(c.snapshot_indices(), ConfigError);
}

TEST_CASE("iterations csv format and round-trip precision") {
  std::vector<IterationRecord> records(2);
  records[0].iter = 0;
  records[0].cg_count = 0;
  records[0].rel_residual = 1.0;
  records[0].abs_residual = 4.6244e-07;
  records[0].cost = 1.0 / 3.0;
  records[0].tracking = 0.3;
  records[0].tikhonov = 1.0 / 3.0 - 0.3;
  records[0].max_force = 1.0;
  records[1] = records[0];
  records[1].iter = 1;
  records[1].cg_count = 3;
  records[1].rel_residual = 0.464;

  const auto path = (std::filesystem::temp_directory_path() / "pffc_iter.csv").string();
  write_iterations_csv(path, records);

  std::ifstream in(path);
  std::string header, row0, row1, extra;
  REQUIRE(std::getline(in, header));
  CHECK(header == "iter,cg,rel_residual,abs_residual,cost,tracking,tikhonov,max_force");
  REQUIRE(std::getline(in, row0));
  REQUIRE(std::getline(in, row1));
  CHECK(!std::getline(in, extra));

  // Full-precision round trip of the cost column.
  std::stringstream ss(row0);
  std::string tok;
  for (int k = 0; k < 5; ++k) std::getline(ss, tok, ',');
  CHECK(std::stod(tok) == 1.0 / 3.0);
}

TEST_CASE("force profile is two ascending columns") {
  const Mesh mesh = Mesh::build(4);
  Control q(5);
  q << 5.0, 4.0, 3.0, 2.0, 1.0;
  const auto path = (std::filesystem::temp_directory_path() / "pffc_force.txt").string();
  write_force_profile(path, mesh, q);
  std::ifstream in(path);
  double prev_x = -1.0;
  int rows = 0;
  double x, v;
  while (in >> x >> v) {
    CHECK(x > prev_x);
    CHECK(v == 5.0 - 4.0 * x);
    prev_x = x;
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("vtk snapshot layout") {
  const Mesh mesh = Mesh::build(2);
  FieldVector U = make_state(mesh, ones_field(mesh));
  U[mesh.dof_ux(4)] = 0.25;
  const auto path = (std::filesystem::temp_directory_path() / "pffc_state.vtk").string();
  write_vtk_state(path, mesh, U, "t");
  const std::string text = slurp(path);
  CHECK(text.find("# vtk DataFile Version 3.0") == 0);
  CHECK(text.find("DATASET STRUCTURED_GRID") != std::string::npos);
  CHECK(text.find("DIMENSIONS 3 3 1") != std::string::npos);
  CHECK(text.find("POINTS 9 double") != std::string::npos);
  CHECK(text.find("POINT_DATA 9") != std::string::npos);
  CHECK(text.find("SCALARS phi double 1") != std::string::npos);
  CHECK(text.find("VECTORS displacement double") != std::string::npos);
  CHECK(text.find("0.25") != std::string::npos);
}

TEST_CASE("experiment reruns are byte-identical") {
  ExperimentConfig c = preset("desk");
  c.mesh_n = 4;
  c.timesteps = 2;
  c.opt.max_newton = 2;
  c.opt.newton_tol = 1e-3;
  c.snapshots = "auto";

  std::ostringstream sink;
  c.out_dir = (std::filesystem::temp_directory_path() / "pffc_rep_a").string();
  run_experiment(c, sink);
  c.out_dir = (std::filesystem::temp_directory_path() / "pffc_rep_b").string();
  run_experiment(c, sink);

  const auto dir_a = std::filesystem::temp_directory_path() / "pffc_rep_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "pffc_rep_b";
  for (const char* name : {"iterations.csv", "force_profile.txt", "state_m2.vtk"}) {
    CHECK(slurp((dir_a / name).string()) == slurp((dir_b / name).string()));
    CHECK(!slurp((dir_a / name).string()).empty());
  }
}

TEST_CASE("PFFC_OUT provides the default output directory") {
  ExperimentConfig c = preset("desk");
  c.out_dir.clear();
  setenv("PFFC_OUT", "/tmp/pffc_env_out", 1);
  CHECK(c.resolved_out_dir() == "/tmp/pffc_env_out");
  unsetenv("PFFC_OUT");
  CHECK(c.resolved_out_dir() == "pffc_out");
  c.out_dir = "explicit";
  CHECK(c.resolved_out_dir() == "explicit");
}

TEST_CASE("verification size guard rejects big meshes") {
  ExperimentConfig c = preset("desk");
  c.mesh_n = 32;
  std::ostringstream sink;
  CHECK(run_verification(c, sink) == 2);
  CHECK(sink.str().find("mesh_n <= 16") != std::string::npos);
}

TEST_CASE("verification suite passes on the desk preset and writes its report") {
  ExperimentConfig c = preset("desk");
  c.out_dir = (std::filesystem::temp_directory_path() / "pffc_verify_unit").string();
  std::ostringstream log;
  CHECK(run_verification(c, log) == 0);
  const std::string report = slurp(c.out_dir + "/verification.txt");
  CHECK(report.find("PASS kernel_fd_first") != std::string::npos);
  CHECK(report.find("PASS penalty_scaling") != std::string::npos);
  CHECK(report.find("FAIL") == std::string::npos);
}

TEST_SUITE_END();
