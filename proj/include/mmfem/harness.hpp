#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmfem/engine.hpp"
#include "mmfem/metrics.hpp"
#include "mmfem/problems.hpp"

namespace mmfem {

enum class MeshFamily { Uniform, StefanBisection, StefanGeometric };

/// Whether levels refine the mesh (dt / 4 per level) or only the time step
/// (dt / 2 per level on the coarsest mesh).
enum class Refinement { Space, Time };

/**
 * Everything needed to reproduce one study. Every field has a config key;
 * see config_keys() and the README for the schema.
 */
struct StudyConfig {
  std::string problem = "cg";  // stefan | cg | pme | pmecos
  int degree = 1;
  std::optional<int> rk_order;  // default from the degree
  std::size_t n_elements = 10;  // uniform family only
  double dt = 1.25e-5;          // coarsest level
  int levels = 3;               // number of levels run, 0 .. levels-1
  std::optional<double> t_start;
  std::optional<double> t_end;
  MeshFamily mesh = MeshFamily::Uniform;
  Refinement refinement = Refinement::Space;
  VelocityRecovery variant = VelocityRecovery::Interpolation;
  double sample_interval = 0.0;  // 0: only the initial and final states
  std::string out = "out";
  double perturbation = 0.0;  // fraction of the smaller adjacent element
  std::uint64_t seed = 1;
  int jobs = 1;
  bool write_files = true;
  FloorThresholds floors;

  StefanParameters stefan;
  int pme_exponent = 1;
  double pme_x0 = 0.5;

  int effective_rk_order() const;
  ProblemSpec problem_spec() const;
  void validate() const;
};

/// Defaults for a named problem (stefan, cg, pme, pmecos).
StudyConfig preset(const std::string& problem);

/// Keys accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();
void apply_setting(StudyConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` text; `#` starts a comment. The problem key (if
/// present) selects the preset, the other keys then override it.
StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::filesystem::path& path);
std::string to_config_text(const StudyConfig& config);

struct LevelPlan {
  int level = 0;
  Mesh1D mesh;
  double dt = 0.0;
  std::size_t steps = 0;
  bool dt_adjusted = false;
  std::size_t sample_stride = 0;
};

/// Mesh, step size and sampling for one level. Throws ConfigError when the
/// sample interval is not a multiple of the step.
LevelPlan plan_level(const StudyConfig& config, int level);

struct RunResult {
  int level = 0;
  std::size_t n_elements = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  bool dt_adjusted = false;
  bool ok = false;
  int failure_code = 0;  // 3 numerical, 4 I/O, 2 config
  std::string failure;
  std::optional<double> error_u;  // exact-solution norms when available
  std::optional<double> error_x;
  double theta_initial = 0.0;
  double theta_final = 0.0;
  double tracked_min = 0.0;  // extremes of the tracked points over all steps
  double tracked_max = 0.0;
  double gcl_max = 0.0;
  std::vector<Snapshot> samples;  // states at multiples of the sample interval, t > t_start
  Snapshot final_state;
  std::vector<std::filesystem::path> files;
};

struct RunOptions {
  bool exact_errors = true;   // accumulate errors at every step
  bool keep_samples = false;  // keep snapshots at the sample times
  bool gcl_diagnostic = false;
};

/// Fixed-dt stepping of one level. Numerical failures are reported in the
/// result with the step and stage that failed rather than thrown.
RunResult run_simulation(const StudyConfig& config, int level, const RunOptions& options = {});

struct StudyResult {
  StudyConfig config;
  std::vector<RunResult> runs;
  std::vector<ErrorRecord> records;
  bool self_convergence = false;
  std::vector<std::filesystem::path> files;
  bool all_ok() const;
};

/// Runs levels 0 .. levels-1 (concurrently when jobs > 1) and tabulates
/// exact errors, or successive-level differences when the problem has no
/// exact solution or `self_convergence` is set.
StudyResult run_convergence_study(const StudyConfig& config, bool self_convergence = false);

std::string output_stem(const StudyConfig& config, int level);
std::string rates_file_name(const StudyConfig& config);

void write_trajectory_csv(std::ostream& out, std::span<const Snapshot> snaps);
void write_snapshot_csv(std::ostream& out, std::span<const Snapshot> snaps);

/// Gnuplot scripts for the rate table and the node trajectories of each
/// level, referencing the CSV names the study writes.
std::vector<std::filesystem::path> write_plot_scripts(const StudyConfig& config,
                                                      bool self_convergence);

}  // namespace mmfem
