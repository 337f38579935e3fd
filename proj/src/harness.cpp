#include "mmfem/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace fs = std::filesystem;

int StudyConfig::effective_rk_order() const {
  if (rk_order) return *rk_order;
  if (degree <= 1) return 1;
  if (degree <= 3) return 2;
  return 3;
}

ProblemSpec StudyConfig::problem_spec() const {
  ProblemSpec spec;
  if (problem == "stefan") {
    StefanParameters params = stefan;
    if (t_start) params.t0 = *t_start;
    spec = make_stefan(params);
  } else if (problem == "cg") {
    spec = make_crank_gupta();
  } else if (problem == "pme") {
    spec = make_pme_similarity(pme_exponent, pme_x0);
  } else if (problem == "pmecos") {
    spec = make_pme_cosine(pme_exponent);
  } else {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  if (t_start) {
    const double duration = spec.t_end - spec.t_start;
    spec.t_start = *t_start;
    spec.t_end = *t_start + duration;
  }
  if (t_end) spec.t_end = *t_end;
  return spec;
}

void StudyConfig::validate() const {
  try {
    problem_spec().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (degree < 1 || degree > kMaxDegree) throw ConfigError("degree must lie in 1..8");
  const int k = effective_rk_order();
  if (k < 1 || k > 3) throw ConfigError("rk_order must be 1, 2 or 3");
  if (n_elements < 1) throw ConfigError("n_elements must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (levels < 1) throw ConfigError("levels must be at least 1");
  if (sample_interval < 0.0) throw ConfigError("sample_interval must be non-negative");
  if (!(perturbation >= 0.0 && perturbation < 0.5))
    throw ConfigError("perturbation must lie in [0, 0.5)");
  if (jobs < 1) throw ConfigError("jobs must be positive");
  if (!(floors.solution >= 0.0 && floors.boundary >= 0.0))
    throw ConfigError("floor thresholds must be non-negative");
  const bool stefan_mesh = mesh != MeshFamily::Uniform;
  if (stefan_mesh != (problem == "stefan"))
    throw ConfigError("stefan problems need a stefan mesh family and vice versa");
}

StudyConfig preset(const std::string& problem) {
  StudyConfig c;
  c.problem = problem;
  if (problem == "stefan") {
    c.mesh = MeshFamily::StefanBisection;
    c.dt = 8e-7;
    c.levels = 3;
    c.sample_interval = 1e-3;
  } else if (problem == "cg") {
    c.dt = 1.25e-5;
    c.levels = 4;
    c.sample_interval = 0.01;
  } else if (problem == "pme") {
    c.dt = 1e-4;
    c.levels = 4;
    c.sample_interval = 1e-3;
  } else if (problem == "pmecos") {
    c.dt = 1e-4;
    c.levels = 4;
    c.sample_interval = 1e-4;
  } else {
    throw ConfigError("unknown problem '" + problem + "'");
  }
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + v + "'");
}

const char* mesh_name(MeshFamily m) {
  switch (m) {
    case MeshFamily::Uniform: return "uniform";
    case MeshFamily::StefanBisection: return "stefan-bisection";
    case MeshFamily::StefanGeometric: return "stefan-geometric";
  }
  return "uniform";
}

// Shortest text that reads back to the same double.
std::string number(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

using Setter = std::function<void(StudyConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const StudyConfig&)>;

struct KeyInfo {
  std::string key;
  Setter set;
  Getter get;
};

KeyInfo real_key(std::string key, double StudyConfig::*field) {
  return {key, [field](StudyConfig& c, const std::string& k, const std::string& v) {
            c.*field = to_double(k, v);
          },
          [field](const StudyConfig& c) { return number(c.*field); }};
}

KeyInfo stefan_key(std::string key, double StefanParameters::*field) {
  return {key, [field](StudyConfig& c, const std::string& k, const std::string& v) {
            c.stefan.*field = to_double(k, v);
          },
          [field](const StudyConfig& c) { return number(c.stefan.*field); }};
}

const std::vector<KeyInfo>& key_table() {
  static const std::vector<KeyInfo> table = [] {
    std::vector<KeyInfo> t;
    t.push_back({"problem", [](StudyConfig& c, const std::string&, const std::string& v) { c.problem = v; },
                 [](const StudyConfig& c) { return c.problem; }});
    t.push_back({"degree",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.degree = static_cast<int>(to_integer(k, v));
                 },
                 [](const StudyConfig& c) { return std::to_string(c.degree); }});
    t.push_back({"rk_order",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   if (v == "auto") c.rk_order.reset();
                   else c.rk_order = static_cast<int>(to_integer(k, v));
                 },
                 [](const StudyConfig& c) {
                   return c.rk_order ? std::to_string(*c.rk_order) : std::string("auto");
                 }});
    t.push_back({"n_elements",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   const auto n = to_integer(k, v);
                   if (n < 1) throw ConfigError("n_elements must be positive");
                   c.n_elements = static_cast<std::size_t>(n);
                 },
                 [](const StudyConfig& c) { return std::to_string(c.n_elements); }});
    t.push_back(real_key("dt", &StudyConfig::dt));
    t.push_back({"levels",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.levels = static_cast<int>(to_integer(k, v));
                 },
                 [](const StudyConfig& c) { return std::to_string(c.levels); }});
    t.push_back({"t_start",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   if (v == "auto") c.t_start.reset();
                   else c.t_start = to_double(k, v);
                 },
                 [](const StudyConfig& c) { return c.t_start ? number(*c.t_start) : "auto"; }});
    t.push_back({"t_end",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   if (v == "auto") c.t_end.reset();
                   else c.t_end = to_double(k, v);
                 },
                 [](const StudyConfig& c) { return c.t_end ? number(*c.t_end) : "auto"; }});
    t.push_back({"mesh",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   if (v == "uniform") c.mesh = MeshFamily::Uniform;
                   else if (v == "stefan-bisection") c.mesh = MeshFamily::StefanBisection;
                   else if (v == "stefan-geometric") c.mesh = MeshFamily::StefanGeometric;
                   else throw ConfigError("config key '" + k + "': unknown mesh family '" + v + "'");
                 },
                 [](const StudyConfig& c) { return std::string(mesh_name(c.mesh)); }});
    t.push_back({"refinement",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   if (v == "space") c.refinement = Refinement::Space;
                   else if (v == "time") c.refinement = Refinement::Time;
                   else throw ConfigError("config key '" + k + "': expected space or time");
                 },
                 [](const StudyConfig& c) {
                   return std::string(c.refinement == Refinement::Space ? "space" : "time");
                 }});
    t.push_back({"variant",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   if (v == "interpolation") c.variant = VelocityRecovery::Interpolation;
                   else if (v == "projection") c.variant = VelocityRecovery::Projection;
                   else throw ConfigError("config key '" + k + "': expected interpolation or projection");
                 },
                 [](const StudyConfig& c) {
                   return std::string(c.variant == VelocityRecovery::Interpolation ? "interpolation"
                                                                                    : "projection");
                 }});
    t.push_back(real_key("sample_interval", &StudyConfig::sample_interval));
    t.push_back({"out", [](StudyConfig& c, const std::string&, const std::string& v) { c.out = v; },
                 [](const StudyConfig& c) { return c.out; }});
    t.push_back(real_key("perturbation", &StudyConfig::perturbation));
    t.push_back({"seed",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   char* end = nullptr;
                   const auto s = std::strtoull(v.c_str(), &end, 10);
                   if (v.empty() || v[0] == '-' || end != v.c_str() + v.size())
                     throw ConfigError("config key '" + k + "': not an unsigned integer");
                   c.seed = s;
                 },
                 [](const StudyConfig& c) { return std::to_string(c.seed); }});
    t.push_back({"jobs",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.jobs = static_cast<int>(to_integer(k, v));
                 },
                 [](const StudyConfig& c) { return std::to_string(c.jobs); }});
    t.push_back({"write_files",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.write_files = to_bool(k, v);
                 },
                 [](const StudyConfig& c) { return std::string(c.write_files ? "true" : "false"); }});
    t.push_back({"pme_exponent",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.pme_exponent = static_cast<int>(to_integer(k, v));
                 },
                 [](const StudyConfig& c) { return std::to_string(c.pme_exponent); }});
    t.push_back({"floor_solution",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.floors.solution = to_double(k, v);
                 },
                 [](const StudyConfig& c) { return number(c.floors.solution); }});
    t.push_back({"floor_boundary",
                 [](StudyConfig& c, const std::string& k, const std::string& v) {
                   c.floors.boundary = to_double(k, v);
                 },
                 [](const StudyConfig& c) { return number(c.floors.boundary); }});
    t.push_back(real_key("pme_x0", &StudyConfig::pme_x0));
    t.push_back(stefan_key("stefan_k_solid", &StefanParameters::k_solid));
    t.push_back(stefan_key("stefan_k_liquid", &StefanParameters::k_liquid));
    t.push_back(stefan_key("stefan_heat_capacity_solid", &StefanParameters::K_solid));
    t.push_back(stefan_key("stefan_heat_capacity_liquid", &StefanParameters::K_liquid));
    t.push_back(stefan_key("stefan_latent", &StefanParameters::latent));
    t.push_back(stefan_key("stefan_u_solid", &StefanParameters::u_solid));
    t.push_back(stefan_key("stefan_u_liquid", &StefanParameters::u_liquid));
    t.push_back(stefan_key("stefan_t0", &StefanParameters::t0));
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& info : key_table()) k.push_back(info.key);
    return k;
  }();
  return keys;
}

void apply_setting(StudyConfig& config, const std::string& key, const std::string& value) {
  for (const auto& info : key_table()) {
    if (info.key == key) {
      info.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

StudyConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    for (const auto& [k, v] : entries)
      if (k == key) throw ConfigError("config key '" + key + "' given twice");
    entries.emplace_back(std::move(key), std::move(value));
  }
  std::string problem = "cg";
  for (const auto& [k, v] : entries)
    if (k == "problem") problem = v;
  StudyConfig config = preset(problem);
  for (const auto& [k, v] : entries) apply_setting(config, k, v);
  config.validate();
  return config;
}

StudyConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  return parse_config(in);
}

std::string to_config_text(const StudyConfig& config) {
  std::string s;
  for (const auto& info : key_table()) s += info.key + " = " + info.get(config) + "\n";
  return s;
}

LevelPlan plan_level(const StudyConfig& config, int level) {
  config.validate();
  const ProblemSpec spec = config.problem_spec();
  const int p = config.degree;
  const int space_level = config.refinement == Refinement::Space ? level : 0;
  const auto bp = spec.initial_breakpoints();

  auto coarse_mesh = [&]() -> Mesh1D {
    switch (config.mesh) {
      case MeshFamily::Uniform: return build_uniform(bp.front(), bp.back(), config.n_elements, p);
      case MeshFamily::StefanBisection: return build_stefan_bisection(p, 0, bp[1]);
      case MeshFamily::StefanGeometric: return build_stefan_geometric(p, 0, bp[1]);
    }
    throw ConfigError("unknown mesh family");
  };

  // Geometric meshes are regenerated per level; the others refine the
  // (possibly perturbed) coarsest mesh.
  Mesh1D mesh = config.mesh == MeshFamily::StefanGeometric
                    ? build_stefan_geometric(p, space_level, bp[1])
                    : coarse_mesh();
  if (config.perturbation > 0.0) mesh = perturb_interior(mesh, config.perturbation, config.seed);
  if (config.mesh != MeshFamily::StefanGeometric)
    for (int l = 0; l < space_level; ++l) mesh = refine_uniform(mesh);

  const double factor = config.refinement == Refinement::Space ? std::pow(4.0, level)
                                                               : std::pow(2.0, level);
  double dt = config.dt / factor;
  const double horizon = spec.t_end - spec.t_start;
  const double raw = horizon / dt;
  std::size_t steps = static_cast<std::size_t>(std::llround(raw));
  bool adjusted = false;
  if (steps < 1 || std::abs(static_cast<double>(steps) * dt - horizon) > 1e-12 * horizon) {
    steps = static_cast<std::size_t>(std::ceil(raw));
    dt = horizon / static_cast<double>(steps);
    adjusted = true;
  }

  std::size_t stride = steps;
  if (config.sample_interval > 0.0) {
    const double s = config.sample_interval / dt;
    stride = static_cast<std::size_t>(std::llround(s));
    if (stride < 1 || std::abs(static_cast<double>(stride) - s) > 1e-9 * s)
      throw ConfigError("sample_interval " + number(config.sample_interval) +
                        " is not a multiple of dt " + number(dt) + " at level " +
                        std::to_string(level));
    if (steps % stride != 0)
      throw ConfigError("sample_interval does not divide the horizon at level " +
                        std::to_string(level));
  }
  return LevelPlan{level, std::move(mesh), dt, steps, adjusted, stride};
}

namespace {

double total_mass(const SystemState& s) {
  double t = 0.0;
  for (const auto& m : s.masses) t += m.theta();
  return t;
}

bool finite_state(const SystemState& s) {
  for (double x : s.vertices)
    if (!std::isfinite(x)) return false;
  for (const auto& m : s.masses)
    for (double v : m.mu)
      if (!std::isfinite(v)) return false;
  return true;
}

void open_for_write(std::ofstream& f, const fs::path& path) {
  f.open(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace

RunResult run_simulation(const StudyConfig& config, int level, const RunOptions& options) {
  RunResult result;
  result.level = level;
  try {
    LevelPlan plan = plan_level(config, level);
    const ProblemSpec spec = config.problem_spec();
    const int k = config.effective_rk_order();
    result.n_elements = plan.mesh.num_elements();
    result.dt = plan.dt;
    result.steps = plan.steps;
    result.dt_adjusted = plan.dt_adjusted;

    const MovingMeshModel model(spec, config.degree, plan.mesh.interface_index(), config.variant);
    SystemState state = model.initial_state(plan.mesh);
    result.theta_initial = total_mass(state);

    std::optional<SpaceTimeError> acc;
    if (options.exact_errors) {
      if (auto exact = exact_solution(spec)) acc.emplace(std::move(*exact));
    }

    const bool record = options.keep_samples || config.write_files;
    std::vector<Snapshot> written;
    Snapshot current = make_snapshot(model, state);
    if (record) written.push_back(current);
    result.tracked_min = *std::min_element(current.tracked.begin(), current.tracked.end());
    result.tracked_max = *std::max_element(current.tracked.begin(), current.tracked.end());

    if (options.gcl_diagnostic) {
      const SystemRate r = model.evaluate(state);
      result.gcl_max = gcl_defect(plan.mesh, r.vertex_velocities, plan.dt);
    }

    const RhsEvaluator rhs = [&model](const SystemState& s) { return model.evaluate(s); };
    for (std::size_t n = 1; n <= plan.steps; ++n) {
      try {
        state = ssp_rk_step(state, rhs, plan.dt, k);
        if (!finite_state(state)) throw NumericalError("non-finite state");
      } catch (const std::exception& e) {
        throw NumericalError("step " + std::to_string(n) + " (t = " +
                             number(spec.t_start + static_cast<double>(n - 1) * plan.dt) +
                             "): " + e.what());
      }
      state.time = spec.t_start + static_cast<double>(n) * plan.dt;
      const bool sample = n % plan.sample_stride == 0;
      if (acc || sample) {
        current = make_snapshot(model, state);
        if (acc) acc->add(current, plan.dt);
      } else {
        current.tracked = model.tracked_points(state);
      }
      for (double x : current.tracked) {
        result.tracked_min = std::min(result.tracked_min, x);
        result.tracked_max = std::max(result.tracked_max, x);
      }
      if (sample && record) {
        written.push_back(current);
        if (options.keep_samples) result.samples.push_back(current);
      }
    }
    result.theta_final = total_mass(state);
    result.final_state = make_snapshot(model, state);
    if (acc) {
      result.error_u = acc->error_u();
      result.error_x = acc->error_x();
    }

    if (config.write_files) {
      const fs::path dir(config.out);
      ensure_directory(dir);
      const std::string stem = output_stem(config, level);
      const fs::path traj = dir / (stem + ".csv");
      const fs::path snap = dir / (stem + "_u.csv");
      const fs::path mesh = dir / (stem + "_mesh.csv");
      std::ofstream f;
      open_for_write(f, traj);
      write_trajectory_csv(f, written);
      f.close();
      open_for_write(f, snap);
      write_snapshot_csv(f, written);
      f.close();
      open_for_write(f, mesh);
      write_mesh_csv(f, plan.mesh);
      f.close();
      if (!f) throw IoError("write failed in " + dir.string());
      result.files = {traj, snap, mesh};
    }
    result.ok = true;
  } catch (const ConfigError& e) {
    result.failure_code = 2;
    result.failure = e.what();
  } catch (const IoError& e) {
    result.failure_code = 4;
    result.failure = e.what();
  } catch (const std::exception& e) {
    result.failure_code = 3;
    result.failure = e.what();
  }
  return result;
}

bool StudyResult::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.ok; });
}

StudyResult run_convergence_study(const StudyConfig& config, bool self_convergence) {
  config.validate();
  if (config.levels < 2) throw ConfigError("a convergence study needs at least 2 levels");
  const ProblemSpec spec = config.problem_spec();
  StudyResult study;
  study.config = config;
  study.self_convergence = self_convergence || !spec.has_exact_solution();
  if (study.self_convergence && !(config.sample_interval > 0.0))
    throw ConfigError("self-convergence needs a positive sample_interval");

  RunOptions options;
  options.exact_errors = !study.self_convergence;
  options.keep_samples = study.self_convergence;

  study.runs.resize(static_cast<std::size_t>(config.levels));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int l = next++; l < config.levels; l = next++)
      study.runs[static_cast<std::size_t>(l)] = run_simulation(config, l, options);
  };
  const int threads = std::min(config.jobs, config.levels);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const double nan = std::nan("");
  std::vector<ErrorRecord> records;
  if (!study.self_convergence) {
    for (const auto& r : study.runs) {
      ErrorRecord e;
      e.level = r.level;
      e.n_elements = r.n_elements;
      e.dt = r.dt;
      e.error_u = r.ok && r.error_u ? *r.error_u : nan;
      e.error_x = r.ok && r.error_x ? *r.error_x : nan;
      records.push_back(e);
    }
  } else {
    for (std::size_t l = 1; l < study.runs.size(); ++l) {
      const auto& fine = study.runs[l];
      const auto& coarse = study.runs[l - 1];
      ErrorRecord e;
      e.level = fine.level;
      e.n_elements = fine.n_elements;
      e.dt = fine.dt;
      e.error_u = nan;
      e.error_x = nan;
      if (fine.ok && coarse.ok) {
        const auto d = self_convergence_error(fine.samples, coarse.samples, config.sample_interval);
        e.error_u = d.error_u;
        e.error_x = d.error_x;
      }
      records.push_back(e);
    }
  }
  study.records = convergence_rates(std::move(records), config.floors);
  for (auto& r : study.runs) r.samples.clear();

  if (config.write_files) {
    const fs::path dir(config.out);
    ensure_directory(dir);
    const fs::path rates = dir / rates_file_name(config);
    std::ofstream f;
    open_for_write(f, rates);
    write_rates_csv(f, study.records);
    f.close();
    if (!f) throw IoError("write failed: " + rates.string());
    study.files.push_back(rates);
    for (const auto& p : write_plot_scripts(config, study.self_convergence)) study.files.push_back(p);
  }
  return study;
}

namespace {

std::string suffix(const StudyConfig& c) {
  std::string s;
  if (c.variant == VelocityRecovery::Projection) s += "_projection";
  if (c.refinement == Refinement::Time) s += "_dt";
  if (c.perturbation > 0.0) s += "_perturbed";
  return s;
}

}  // namespace

std::string output_stem(const StudyConfig& config, int level) {
  return config.problem + "_p" + std::to_string(config.degree) + "_k" +
         std::to_string(config.effective_rk_order()) + "_L" + std::to_string(level) + suffix(config);
}

std::string rates_file_name(const StudyConfig& config) {
  return config.problem + "_p" + std::to_string(config.degree) + "_k" +
         std::to_string(config.effective_rk_order()) + suffix(config) + "_rates.csv";
}

void write_trajectory_csv(std::ostream& out, std::span<const Snapshot> snaps) {
  out << "# mmfem-csv v1 trajectory\n";
  const std::size_t nv = snaps.empty() ? 0 : snaps.front().vertices.size();
  out << "time";
  for (std::size_t i = 0; i < nv; ++i) out << ",x_" << i;
  out << '\n';
  const auto old = out.precision(17);
  for (const auto& s : snaps) {
    out << s.time;
    for (double x : s.vertices) out << ',' << x;
    out << '\n';
  }
  out.precision(old);
}

void write_snapshot_csv(std::ostream& out, std::span<const Snapshot> snaps) {
  out << "# mmfem-csv v1 snapshot\n";
  out << "time,phase,dof_index,x,u\n";
  const auto old = out.precision(17);
  for (const auto& s : snaps) {
    const Mesh1D mesh = s.mesh();
    for (std::size_t k = 0; k < s.phases.size(); ++k) {
      const auto view = mesh.phase(k);
      const auto x = dof_points(view.vertices, s.degree);
      const auto& c = s.phases[k].coefficients;
      for (std::size_t i = 0; i < c.size(); ++i)
        out << s.time << ',' << k << ',' << i << ',' << x[i] << ',' << c[i] << '\n';
    }
  }
  out.precision(old);
}

std::vector<fs::path> write_plot_scripts(const StudyConfig& config, bool self_convergence) {
  const fs::path dir(config.out);
  ensure_directory(dir);
  std::vector<fs::path> files;
  const std::string rates = rates_file_name(config);
  const std::string base = rates.substr(0, rates.size() - 4);
  {
    const fs::path path = dir / (base + ".gp");
    std::ofstream f;
    open_for_write(f, path);
    f << "set datafile separator ','\n"
      << "set logscale xy\n"
      << "set key top right\n"
      << "set xlabel 'degrees of freedom'\n"
      << "set ylabel '" << (self_convergence ? "self-convergence difference" : "error") << "'\n"
      << "set terminal pngcairo size 800,600\n"
      << "set output '" << base << ".png'\n"
      << "plot '" << rates << "' skip 2 using ($2*" << config.degree
      << "+1):4 with linespoints title 'solution', \\\n"
      << "     '" << rates << "' skip 2 using ($2*" << config.degree
      << "+1):5 with linespoints title 'boundary'\n";
    files.push_back(path);
  }
  for (int l = 0; l < config.levels; ++l) {
    const std::string stem = output_stem(config, l);
    const auto plan = plan_level(config, l);
    const std::size_t nv = plan.mesh.num_vertices();
    const fs::path path = dir / (stem + ".gp");
    std::ofstream f;
    open_for_write(f, path);
    f << "set datafile separator ','\n"
      << "set terminal pngcairo size 1200,500\n"
      << "set output '" << stem << ".png'\n"
      << "set multiplot layout 1,2\n"
      << "set xlabel 'x'\n"
      << "set ylabel 't'\n"
      << "unset key\n"
      << "plot for [i=2:" << nv + 1 << "] '" << stem << ".csv' skip 2 using i:1 with lines lc 'black'\n"
      << "set ylabel 'u'\n"
      << "plot '" << stem << "_u.csv' skip 2 using 4:5:1 with points pt 7 ps 0.4 palette\n"
      << "unset multiplot\n";
    files.push_back(path);
  }
  return files;
}

}  // namespace mmfem
