// Command-line driver: run one level, run a convergence or self-convergence
// study, or write plot scripts for a study's outputs.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmfem/errors.hpp"
#include "mmfem/harness.hpp"

namespace {

struct Options {
  std::string config_file;
  std::string problem;
  std::optional<int> degree;
  std::string rk_order;
  std::optional<int> levels;
  std::string variant;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> jobs;
  std::vector<std::string> settings;
  int level = 0;
  bool dump_config = false;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_file, "flat key = value config file");
  app->add_option("--problem", o.problem, "stefan | cg | pme | pmecos");
  app->add_option("--degree", o.degree, "polynomial degree p");
  app->add_option("--rk-order", o.rk_order, "SSP-RK order 1..3 or auto");
  app->add_option("--levels", o.levels, "number of refinement levels");
  app->add_option("--variant", o.variant, "interpolation | projection");
  app->add_option("--seed", o.seed, "perturbation seed");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--jobs", o.jobs, "levels run concurrently");
  app->add_option("--set", o.settings, "extra key=value config entries")->take_all();
  app->add_flag("--print-config", o.dump_config, "print the resolved config before running");
}

mmfem::StudyConfig resolve(const Options& o) {
  mmfem::StudyConfig c;
  if (!o.config_file.empty()) {
    c = mmfem::load_config(o.config_file);
    if (!o.problem.empty()) mmfem::apply_setting(c, "problem", o.problem);
  } else {
    c = mmfem::preset(o.problem.empty() ? "cg" : o.problem);
  }
  if (o.degree) c.degree = *o.degree;
  if (!o.rk_order.empty()) mmfem::apply_setting(c, "rk_order", o.rk_order);
  if (o.levels) c.levels = *o.levels;
  if (!o.variant.empty()) mmfem::apply_setting(c, "variant", o.variant);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  if (o.jobs) c.jobs = *o.jobs;
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw mmfem::ConfigError("--set expects key=value, got '" + s + "'");
    mmfem::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  c.validate();
  return c;
}

void print_table(const mmfem::StudyResult& study) {
  std::printf("%-6s %-10s %-12s %-14s %-14s %-8s %-8s\n", "level", "elements", "dt", "error_u",
              "error_x", "order_u", "order_x");
  for (const auto& r : study.records) {
    auto order = [](const std::optional<double>& o) {
      char buf[32];
      if (o) std::snprintf(buf, sizeof buf, "%.3f", *o);
      else std::snprintf(buf, sizeof buf, "-");
      return std::string(buf);
    };
    std::printf("%-6d %-10zu %-12.4e %-14.6e %-14.6e %-8s %-8s\n", r.level, r.n_elements, r.dt,
                r.error_u, r.error_x, order(r.order_u).c_str(), order(r.order_x).c_str());
  }
}

int study_exit(const mmfem::StudyResult& study) {
  int code = 0;
  for (const auto& r : study.runs) {
    if (r.ok) continue;
    std::fprintf(stderr, "level %d failed: %s\n", r.level, r.failure.c_str());
    if (code == 0) code = r.failure_code;
  }
  for (const auto& f : study.files) std::printf("wrote %s\n", f.string().c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arbitrary-order moving-mesh finite elements for 1D moving boundary problems"};
  app.require_subcommand(1);
  Options run_o, conv_o, cmp_o, plot_o;
  auto* run = app.add_subcommand("run", "simulate one refinement level");
  add_common(run, run_o);
  run->add_option("--level", run_o.level, "refinement level to run");
  auto* converge = app.add_subcommand("converge", "convergence study against the exact solution");
  add_common(converge, conv_o);
  auto* compare = app.add_subcommand("compare", "self-convergence study between successive levels");
  add_common(compare, cmp_o);
  auto* plot = app.add_subcommand("plot", "write gnuplot scripts for a study's CSV outputs");
  add_common(plot, plot_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      const auto c = resolve(run_o);
      if (run_o.dump_config) std::cout << mmfem::to_config_text(c);
      mmfem::RunOptions opts;
      opts.gcl_diagnostic = true;
      const auto r = mmfem::run_simulation(c, run_o.level, opts);
      if (!r.ok) {
        std::fprintf(stderr, "level %d failed: %s\n", r.level, r.failure.c_str());
        return r.failure_code;
      }
      std::printf("level %d: %zu elements, dt = %.6e%s, %zu steps\n", r.level, r.n_elements, r.dt,
                  r.dt_adjusted ? " (adjusted)" : "", r.steps);
      std::printf("theta: %.15e -> %.15e\n", r.theta_initial, r.theta_final);
      std::printf("tracked points within [%.10f, %.10f]\n", r.tracked_min, r.tracked_max);
      std::printf("initial gcl defect %.3e\n", r.gcl_max);
      if (r.error_u) std::printf("error_u %.6e  error_x %.6e\n", *r.error_u, *r.error_x);
      for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
      return 0;
    }
    if (converge->parsed() || compare->parsed()) {
      const bool self = compare->parsed();
      const auto c = resolve(self ? cmp_o : conv_o);
      if ((self ? cmp_o : conv_o).dump_config) std::cout << mmfem::to_config_text(c);
      const auto study = mmfem::run_convergence_study(c, self);
      print_table(study);
      return study_exit(study);
    }
    if (plot->parsed()) {
      const auto c = resolve(plot_o);
      const bool self = !c.problem_spec().has_exact_solution();
      for (const auto& f : mmfem::write_plot_scripts(c, self))
        std::printf("wrote %s\n", f.string().c_str());
      return 0;
    }
  } catch (const mmfem::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const mmfem::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const mmfem::InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
