#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mmfem/errors.hpp"
#include "mmfem/harness.hpp"

using namespace mmfem;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mmfem_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

StudyConfig small_pme(const fs::path& out) {
  StudyConfig c = preset("pme");
  c.degree = 2;
  c.rk_order = 2;
  c.t_end = c.problem_spec().t_start + 4e-4;
  c.levels = 2;
  c.sample_interval = 2e-4;
  c.out = out.string();
  return c;
}

}  // namespace

TEST_CASE("level plans") {
  const auto cg = plan_level(preset("cg"), 0);
  CHECK(cg.steps == 24000);
  CHECK_FALSE(cg.dt_adjusted);
  CHECK(cg.sample_stride == 800);
  const auto cg1 = plan_level(preset("cg"), 1);
  CHECK(cg1.steps == 96000);
  CHECK(cg1.mesh.num_elements() == 20);

  const auto st = plan_level(preset("stefan"), 0);
  CHECK(st.steps == 12500);
  CHECK(st.mesh.num_elements() == 10);

  StudyConfig t = preset("pme");
  t.refinement = Refinement::Time;
  const auto tp = plan_level(t, 2);
  CHECK(tp.dt == doctest::Approx(2.5e-5));
  CHECK(tp.mesh.num_elements() == 10);

  StudyConfig odd = preset("cg");
  odd.dt = 7e-3;
  odd.sample_interval = 0.0;
  const auto op = plan_level(odd, 0);
  CHECK(op.dt_adjusted);
  CHECK(op.dt * op.steps == doctest::Approx(0.3).epsilon(1e-14));

  StudyConfig bad = preset("cg");
  bad.sample_interval = 3.3e-5;
  CHECK_THROWS_AS(plan_level(bad, 0), ConfigError);
}

TEST_CASE("config parsing") {
  std::istringstream in("# study\nproblem = pme\ndegree = 3  # cubic\nrk_order = 2\nvariant = projection\n");
  const auto c = parse_config(in);
  CHECK(c.problem == "pme");
  CHECK(c.degree == 3);
  CHECK(c.effective_rk_order() == 2);
  CHECK(c.variant == VelocityRecovery::Projection);
  CHECK(c.dt == 1e-4);

  std::istringstream round(to_config_text(c));
  const auto d = parse_config(round);
  CHECK(to_config_text(d) == to_config_text(c));

  for (const char* text : {"degree 3\n", "bogus = 1\n", "degree = three\n", "degree = 1\ndegree = 2\n",
                           "problem = heat\n", "variant = spline\n", "rk_order = 4\n", " = 1\n"}) {
    std::istringstream bad(text);
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/mmfem.cfg"), IoError);
  CHECK(config_keys().front() == "problem");
}

TEST_CASE("output names") {
  StudyConfig c = preset("cg");
  c.degree = 3;
  CHECK(output_stem(c, 2) == "cg_p3_k2_L2");
  CHECK(rates_file_name(c) == "cg_p3_k2_rates.csv");
  c.variant = VelocityRecovery::Projection;
  CHECK(output_stem(c, 0) == "cg_p3_k2_L0_projection");
}

TEST_CASE("pme smoke run conserves mass") {
  StudyConfig c = small_pme(scratch("smoke"));
  c.write_files = false;
  const auto r = run_simulation(c, 0);
  REQUIRE(r.ok);
  CHECK(std::abs(r.theta_final - r.theta_initial) <= 1e-11 * std::abs(r.theta_initial));
  REQUIRE(r.error_u.has_value());
  CHECK(*r.error_u < 1e-2);
  CHECK(r.final_state.time == doctest::Approx(*c.t_end).epsilon(1e-14));
}

TEST_CASE("study files") {
  const fs::path dir = scratch("study");
  StudyConfig c = small_pme(dir);
  c.perturbation = 0.1;
  c.seed = 9;
  const auto study = run_convergence_study(c);
  REQUIRE(study.all_ok());
  const fs::path rates = dir / rates_file_name(c);
  CHECK(count_lines(rates) == 2 + static_cast<std::size_t>(c.levels));
  CHECK(fs::exists(dir / "pme_p2_k2_perturbed_rates.gp"));

  for (int l = 0; l < c.levels; ++l) {
    const auto plan = plan_level(c, l);
    const fs::path traj = dir / (output_stem(c, l) + ".csv");
    CHECK(count_lines(traj) == 2 + plan.steps / plan.sample_stride + 1);
    CHECK(fs::exists(dir / (output_stem(c, l) + "_u.csv")));
    CHECK(fs::exists(dir / (output_stem(c, l) + ".gp")));
  }
  const std::string first = slurp(rates), traj0 = slurp(dir / (output_stem(c, 1) + "_u.csv"));
  const auto again = run_convergence_study(c);
  REQUIRE(again.all_ok());
  CHECK(slurp(rates) == first);
  CHECK(slurp(dir / (output_stem(c, 1) + "_u.csv")) == traj0);
}

TEST_CASE("self-convergence study") {
  StudyConfig c = preset("pmecos");
  c.degree = 2;
  c.t_end = 4e-4;
  c.levels = 3;
  c.sample_interval = 1e-4;
  c.write_files = false;
  const auto study = run_convergence_study(c);
  REQUIRE(study.all_ok());
  CHECK(study.self_convergence);
  REQUIRE(study.records.size() == 2);
  CHECK(study.records[1].order_u.has_value());
  CHECK(study.records[0].error_u > study.records[1].error_u);
}

TEST_CASE("run failures are reported") {
  StudyConfig c = preset("pmecos");
  c.degree = 4;
  c.dt = 0.02;
  c.t_end = 0.2;
  c.sample_interval = 0.0;
  c.write_files = false;
  const auto r = run_simulation(c, 0);
  CHECK_FALSE(r.ok);
  CHECK(r.failure_code == 3);
  CHECK(r.failure.rfind("step ", 0) == 0);

  StudyConfig io = small_pme("/proc/mmfem_cannot_write");
  const auto w = run_simulation(io, 0);
  CHECK_FALSE(w.ok);
  CHECK(w.failure_code == 4);
}
