// brwlab: branching random walk laboratory.
//
// Subcommands: classify, moments, simulate, validate. Each run writes into
// out/<config-hash>/ so results are content-addressed by the model they came
// from. All files are written atomically (temp + rename).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "brwlab/asymptotics.hpp"
#include "brwlab/config.hpp"
#include "brwlab/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace brwlab;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

json regime_json(const RegimeReport& r) {
  json j;
  j["regime"] = to_string(r.regime);
  j["beta_star"] = r.beta_star;
  j["beta_c"] = r.beta_c;
  j["death_rate"] = r.death_rate;
  j["critical_tolerance"] = r.critical_tolerance;
  if (r.lambda0) j["lambda0"] = *r.lambda0;
  if (r.lambda_E) j["lambda_E"] = *r.lambda_E;
  return j;
}

Site parse_site(const std::string& text, int dim) {
  Site s = Site::origin();
  std::istringstream in(text);
  std::string part;
  int k = 0;
  while (std::getline(in, part, ';')) {
    if (k >= dim) throw ConfigError("site has more coordinates than d");
    s.c[k++] = std::stoll(part);
  }
  if (k != dim) throw ConfigError("site has fewer coordinates than d");
  return s;
}

std::string trajectory_csv(const MomentTrajectory& traj, int order) {
  std::ostringstream csv;
  csv.precision(17);
  csv << "t";
  for (const auto& s : traj.tracked_sites)
    csv << ",\"" << s.label(traj.dimension) << "\"";
  csv << ",total\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    csv << traj.times[i];
    for (std::size_t s = 0; s < traj.tracked_sites.size(); ++s)
      csv << "," << traj.values[order - 1][i][s];
    csv << "," << traj.totals[order - 1][i] << "\n";
  }
  return csv.str();
}

void write_manifest(const fs::path& dir, const ModelConfig& config,
                    const std::string& command, double wall_seconds) {
  json j;
  j["config_hash"] = config_hash(config);
  j["seed"] = config.seed;
  j["command"] = command;
  j["versions"] = {{"brwlab", kVersion}, {"schema", config.schema}};
  j["wall_time_s"] = wall_seconds;
  write_atomic(dir / "manifest.json", j.dump(2) + "\n");
  // drop the output directory so the stored config is location-independent,
  // matching what the hash covers
  ModelConfig canonical = config;
  canonical.out_dir.clear();
  write_atomic(dir / "config.json", serialize_config(canonical) + "\n");
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  int64_t seed = -1;
  int orders = 0;
  std::string variant;
  std::string site;
  int64_t replicas = 0;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "model config JSON")->required();
  cmd->add_option("--out", f.out_dir, "output directory root");
  cmd->add_option("--seed", f.seed, "override the Monte Carlo seed");
  cmd->add_option("--n", f.orders, "highest moment order");
  cmd->add_option("--variant", f.variant, "local|total");
  cmd->add_option("--site", f.site, "tracked site, coordinates 'x;y'");
  cmd->add_option("--replicas", f.replicas, "Monte Carlo replica count");
  cmd->add_option("--threads", f.threads, "worker threads (0 = auto)");
}

ModelConfig resolve_config(const CommonFlags& f) {
  ModelConfig config = load_config(f.config_path);
  if (!f.out_dir.empty()) config.out_dir = f.out_dir;
  if (f.seed >= 0) config.seed = uint64_t(f.seed);
  if (f.orders > 0) config.orders = f.orders;
  if (!f.variant.empty())
    config.variant = moment_variant_from_string(f.variant);
  if (f.replicas > 0) config.replicas = std::size_t(f.replicas);
  if (f.threads >= 0)
    config.threads = f.threads;
  else if (const char* env = std::getenv("BRWLAB_THREADS"))
    config.threads = std::atoi(env);
  if (!f.site.empty()) {
    Site s = parse_site(f.site, config.dimension);
    config.track_radius =
        std::max(config.track_radius, s.norm_inf());
  }
  return config;
}

int run_classify(const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  ModelConfig config = resolve_config(flags);
  WalkKernel kernel = make_kernel(config);
  OffspringLaw law = make_law(config, kernel);
  RegimeReport report = classify(kernel, law);
  json j = regime_json(report);
  std::cout << j.dump(2) << "\n";
  fs::path dir = fs::path(config.out_dir) / config_hash(config);
  write_atomic(dir / "report.json", j.dump(2) + "\n");
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  write_manifest(dir, config, "classify", dt);
  return 0;
}

int run_moments(const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  ModelConfig config = resolve_config(flags);
  WalkKernel kernel = make_kernel(config);
  OffspringLaw law = make_law(config, kernel);
  MomentTrajectory traj = solve_moments(kernel, law, solve_options(config));

  fs::path dir = fs::path(config.out_dir) / config_hash(config);
  for (int n = 1; n <= traj.orders; ++n)
    write_atomic(dir / "trajectories" /
                     ("m" + std::to_string(n) + "_" + to_string(traj.variant) +
                      ".csv"),
                 trajectory_csv(traj, n));
  json meta;
  meta["variant"] = to_string(traj.variant);
  meta["orders"] = traj.orders;
  meta["radius"] = traj.radius;
  meta["boundary_leak"] = traj.boundary_leak;
  meta["steps_taken"] = traj.steps_taken;
  meta["horizon"] = traj.times.back();
  std::cout << meta.dump(2) << "\n";
  write_atomic(dir / "report.json", meta.dump(2) + "\n");
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  write_manifest(dir, config, "moments", dt);
  return 0;
}

json summary_json(const SimulationSummary& sum, int dim) {
  json j;
  j["replicas"] = sum.replicas;
  j["truncated"] = sum.truncated;
  j["checkpoints"] = sum.checkpoints;
  json sites = json::array();
  for (const auto& s : sum.tracked_sites) sites.push_back(s.label(dim));
  j["tracked_sites"] = sites;
  j["local_mean"] = sum.local_mean;
  j["local_se"] = sum.local_se;
  j["total_mean"] = sum.total_mean;
  j["total_se"] = sum.total_se;
  j["extinction_fraction"] = sum.extinction_fraction;
  return j;
}

int run_simulate(const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  ModelConfig config = resolve_config(flags);
  WalkKernel kernel = make_kernel(config);
  OffspringLaw law = make_law(config, kernel);
  SimOptions opts = sim_options(config);
  auto records = run_replicas(kernel, law, opts);
  std::size_t truncated = 0;
  for (const auto& r : records)
    if (r.truncated) ++truncated;
  if (truncated == records.size()) {
    std::cerr << json({{"error", "AllReplicasTruncated"},
                       {"message", "every replica hit a cap"}})
                     .dump()
              << "\n";
    return 4;
  }
  SimulationSummary sum = estimate_moments(records, kernel, opts);
  json j = summary_json(sum, kernel.dimension());
  std::cout << j.dump(2) << "\n";
  fs::path dir = fs::path(config.out_dir) / config_hash(config);
  write_atomic(dir / "summary.json", j.dump(2) + "\n");
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  write_manifest(dir, config, "simulate", dt);
  return 0;
}

int run_validate(const CommonFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  ModelConfig config = resolve_config(flags);
  WalkKernel kernel = make_kernel(config);
  OffspringLaw law = make_law(config, kernel);
  RegimeReport report = classify(kernel, law);
  MomentTrajectory traj = solve_moments(kernel, law, solve_options(config));
  auto verdicts = validate_regime(kernel, law, report, traj);

  json j;
  j["regime"] = regime_json(report);
  json rows = json::array();
  bool all_pass = true;
  for (const auto& v : verdicts) {
    json row;
    row["order"] = v.order;
    row["variant"] = to_string(v.variant);
    row["source"] = v.predicted.source;
    row["predicted"] = {{"rho", v.predicted.rho},
                        {"kappa", v.predicted.kappa},
                        {"eta", v.predicted.eta}};
    row["fit"] = {{"rho", v.fit.rho},
                  {"kappa", v.fit.kappa},
                  {"eta", v.fit.eta},
                  {"log_c", v.fit.log_c},
                  {"rms_residual", v.fit.rms_residual},
                  {"points", v.fit.points}};
    row["pass"] = v.pass;
    row["detail"] = v.detail;
    rows.push_back(row);
    all_pass = all_pass && v.pass;
  }
  j["verdicts"] = rows;
  j["pass"] = all_pass;
  std::cout << j.dump(2) << "\n";
  fs::path dir = fs::path(config.out_dir) / config_hash(config);
  write_atomic(dir / "report.json", j.dump(2) + "\n");
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  write_manifest(dir, config, "validate", dt);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branching random walk laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* classify_cmd =
      app.add_subcommand("classify", "regime classification report");
  auto* moments_cmd =
      app.add_subcommand("moments", "moment trajectories by ODE integration");
  auto* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo moment estimates");
  auto* validate_cmd = app.add_subcommand(
      "validate", "fit trajectories against the predicted asymptotics");
  for (auto* cmd : {classify_cmd, moments_cmd, simulate_cmd, validate_cmd})
    add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (classify_cmd->parsed()) return run_classify(flags);
    if (moments_cmd->parsed()) return run_moments(flags);
    if (simulate_cmd->parsed()) return run_simulate(flags);
    return run_validate(flags);
  } catch (const ConfigError& e) {
    std::cerr << json({{"error", "ConfigError"}, {"message", e.what()}}).dump()
              << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << json({{"error", "NumericalError"}, {"message", e.what()}})
                     .dump()
              << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json({{"error", "InternalError"}, {"message", e.what()}})
                     .dump()
              << "\n";
    return 3;
  }
}
