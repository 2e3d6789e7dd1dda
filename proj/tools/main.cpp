#include <safetrack/scenario.hpp>
#include <safetrack/sim.hpp>
#include <safetrack/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace safetrack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string default_out_dir() {
  if (const char* env = std::getenv("SAFETRACK_OUT_DIR")) return env;
  return "out";
}

std::string scenario_dir() {
  if (const char* env = std::getenv("SAFETRACK_SCENARIO_DIR")) return env;
  return "scenarios";
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("scenario parse error in " + path + ": " + e.what());
  }
  return j;
}

ScenarioSpec resolve_scenario(const std::string& path,
                              const std::vector<std::string>& overrides,
                              std::optional<std::uint64_t> seed) {
  json j = load_json_file(path);
  for (const std::string& assignment : overrides) apply_override(j, assignment);
  if (seed) j["seed"] = *seed;
  return scenario_from_json(j);
}

struct TableRow {
  std::string label;
  Aggregate aggregate;
};

void print_table(const std::vector<TableRow>& rows) {
  std::cout << std::left << std::setw(34) << "policy / setting" << std::right
            << std::setw(14) << "success rate" << std::setw(12) << "mean J"
            << std::setw(14) << "worst min_h" << std::setw(12) << "collisions"
            << "\n";
  for (const TableRow& row : rows) {
    std::cout << std::left << std::setw(34) << row.label << std::right
              << std::setw(13) << std::fixed << std::setprecision(1)
              << 100.0 * row.aggregate.success_rate << "%" << std::setw(12)
              << std::setprecision(3) << row.aggregate.mean_effort << std::setw(14)
              << std::setprecision(4) << row.aggregate.worst_min_h << std::setw(12)
              << row.aggregate.collisions << "\n";
  }
}

int cmd_run(const std::string& scenario_path, const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed, std::optional<int> runs,
            const std::string& out_dir, int workers) {
  const ScenarioSpec spec = resolve_scenario(scenario_path, overrides, seed);
  fs::create_directories(out_dir);
  const int n_runs = runs.value_or(spec.n_monte_carlo);
  if (n_runs == 1) {
    const RunResult result = run_scenario(spec, 0);
    const std::string csv = (fs::path(out_dir) / (spec.name + "_run0.csv")).string();
    write_run_csv(csv, spec, result, 0);
    const Scalar min_h =
        result.min_h.empty()
            ? std::numeric_limits<Scalar>::infinity()
            : *std::min_element(result.min_h.begin(), result.min_h.end());
    std::cout << "run " << spec.name << ": success=" << (result.success ? "yes" : "no")
              << " J=" << result.control_effort << " min_h=" << min_h << " -> " << csv
              << "\n";
    return kExitOk;
  }
  const Aggregate aggregate = monte_carlo(spec, n_runs, workers);
  const std::string jpath = (fs::path(out_dir) / (spec.name + "_aggregate.json")).string();
  write_aggregate_json(jpath, spec, aggregate);
  const RunResult first = run_scenario(spec, 0);
  const std::string csv = (fs::path(out_dir) / (spec.name + "_run0.csv")).string();
  write_run_csv(csv, spec, first, 0);
  std::cout << "run " << spec.name << ": success_rate=" << aggregate.success_rate
            << " mean_J=" << aggregate.mean_effort
            << " worst_min_h=" << aggregate.worst_min_h << " -> " << jpath << "\n";
  return kExitOk;
}

int cmd_reproduce(const std::string& key, std::optional<int> runs,
                  const std::string& out_dir, int workers) {
  fs::create_directories(out_dir);
  const std::string dir = scenario_dir();
  std::vector<TableRow> rows;
  auto cell = [&](const std::string& file, std::vector<std::string> overrides,
                  const std::string& label, int default_runs) {
    ScenarioSpec spec = resolve_scenario((fs::path(dir) / file).string(), overrides, {});
    const int n = runs.value_or(default_runs);
    const Aggregate agg = monte_carlo(spec, n, workers);
    rows.push_back({label, agg});
    const RunResult sample = run_scenario(spec, 0);
    const std::string csv =
        (fs::path(out_dir) / (key + "_" + spec.name + "_" + std::to_string(rows.size()) +
                              ".csv"))
            .string();
    write_run_csv(csv, spec, sample, 0);
    const std::string jpath =
        (fs::path(out_dir) /
         (key + "_" + spec.name + "_" + std::to_string(rows.size()) + ".json"))
            .string();
    write_aggregate_json(jpath, spec, agg);
  };

  if (key == "nonlinear_small") {
    cell("nonlinear_regimes.json", {"policy.kind=learned"}, "raw policy (small dist.)", 10);
    cell("nonlinear_regimes.json", {}, "safety filter (small dist.)", 10);
  } else if (key == "nonlinear_large") {
    const std::string large_d = "disturbance.d_bar=0.02";
    const std::string large_g = "disturbance.gamma_bar=0.02";
    cell("nonlinear_regimes.json", {large_d, large_g}, "safety filter (large dist.)", 10);
    cell("nonlinear_regimes.json",
         {large_d, large_g, "policy.kind=robust_tracking"},
         "two-layer filter (large dist.)", 10);
  } else if (key == "spacecraft_grid") {
    const std::vector<std::pair<std::string, Scalar>> levels = {
        {"small", 3.0e-4}, {"medium", 5.0e-3}, {"large", 5.0e-2}};
    for (const auto& [name, level] : levels) {
      const std::string d = "disturbance.d_bar=" + std::to_string(level);
      const std::string g = "disturbance.gamma_bar=" + std::to_string(level);
      cell("spacecraft_obstacles.json", {d, g, "policy.kind=learned"},
           "raw policy (" + name + ")", 10);
      cell("spacecraft_obstacles.json", {d, g}, "safety filter (" + name + ")", 10);
      cell("spacecraft_obstacles.json", {d, g, "policy.kind=clf_cbf_qp"},
           "clf-cbf qp (" + name + ")", 10);
      cell("spacecraft_obstacles.json", {d, g, "policy.kind=robust_tracking"},
           "two-layer filter (" + name + ")", 10);
    }
  } else if (key == "leo_table") {
    cell("leo_reconfiguration.json",
         {"policy.kind=global_reference", "disturbance.d_bar=0",
          "disturbance.gamma_bar=0"},
         "global solution (no dist.)", 50);
    cell("leo_reconfiguration.json",
         {"disturbance.d_bar=0.01", "disturbance.gamma_bar=0.01"},
         "safety filter (small dist.)", 50);
    cell("leo_reconfiguration.json",
         {"policy.kind=clf_cbf_qp", "disturbance.d_bar=0.05",
          "disturbance.gamma_bar=0.05"},
         "clf-cbf qp (large dist.)", 50);
    cell("leo_reconfiguration.json",
         {"policy.kind=robust_tracking", "disturbance.d_bar=0.05",
          "disturbance.gamma_bar=0.05"},
         "two-layer filter (large dist.)", 50);
  } else {
    throw ValidationError("reproduce: unknown key '" + key + "'");
  }
  print_table(rows);
  return kExitOk;
}

int cmd_verify(const std::string& key, const std::string& out_dir) {
  fs::create_directories(out_dir);
  bool pass = true;
  if (key == "gradients") {
    const GradientCheck check = verify_gradients();
    pass = check.worst_grad_rel <= 1e-6 && check.worst_rate_rel <= 1e-5;
    std::cout << "gradients: worst grad rel err " << check.worst_grad_rel
              << " (<= 1e-6), worst rate rel err " << check.worst_rate_rel
              << " (<= 1e-5) over " << check.configs << " configs\n";
  } else if (key == "kkt") {
    const KktCheck check = verify_kkt();
    pass = check.worst_deviation <= 1e-12;
    std::cout << "kkt: worst deviation from the projection oracle "
              << check.worst_deviation << " (<= 1e-12) over " << check.instances
              << " instances\n";
  } else if (key == "lyapunov") {
    const LyapunovCheck check = verify_lyapunov();
    auto shrinks = [](const std::array<Scalar, 3>& c) {
      const Scalar tiny = 1e-9;
      return c[1] <= 0.75 * c[0] + tiny && c[2] <= 0.75 * c[1] + tiny;
    };
    pass = shrinks(check.cushion_lagrangian) && shrinks(check.cushion_general);
    std::cout << "lyapunov: cushions at dt, dt/2, dt/4\n"
              << "  lagrangian: " << check.cushion_lagrangian[0] << " "
              << check.cushion_lagrangian[1] << " " << check.cushion_lagrangian[2]
              << "\n"
              << "  general:    " << check.cushion_general[0] << " "
              << check.cushion_general[1] << " " << check.cushion_general[2] << "\n"
              << "  form gap at k_p != 1 (logged): " << check.general_form_gap << "\n";
  } else if (key == "contraction") {
    const ContractionCheck check = verify_contraction();
    pass = check.residual <= 1e-4 && check.lti_identity_error <= 1e-8 &&
           check.broken_gain_residual > 0;
    std::cout << "contraction: trajectory residual " << check.residual
              << " (<= 1e-4), lti identity error " << check.lti_identity_error
              << " (<= 1e-8), broken-gain residual " << check.broken_gain_residual
              << " (> 0)\n";
  } else if (key == "envelope") {
    const EnvelopeCheck check = verify_envelope();
    pass = check.worst_ratio <= 1.1 && check.markov_ok;
    const std::string csv = (fs::path(out_dir) / "envelope.csv").string();
    write_envelope_csv(csv, check);
    std::cout << "envelope: worst mean|s|/bound ratio " << check.worst_ratio
              << " (<= 1.1), deviation probability bound "
              << (check.markov_ok ? "holds" : "VIOLATED") << ", margin D_s " << check.d_s
              << " -> " << csv << "\n";
  } else {
    throw ValidationError("verify: unknown key '" + key + "'");
  }
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent safety filtering and robust tracking simulator"};
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--out", out_dir, "Output directory (env SAFETRACK_OUT_DIR)");
  app.add_option("--workers", workers, "Worker threads for repeated runs");

  auto* run = app.add_subcommand("run", "Run one scenario file");
  std::string scenario_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  run->add_option("scenario", scenario_path, "Scenario JSON path")->required();
  run->add_option("--set", overrides, "Override scenario fields, e.g. --set dt=0.05");
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--runs", runs, "Number of seeded runs (default: n_monte_carlo)");

  auto* reproduce = app.add_subcommand("reproduce", "Run a canned experiment grid");
  std::string reproduce_key;
  reproduce
      ->add_option("key", reproduce_key,
                   "One of: nonlinear_small, nonlinear_large, spacecraft_grid, leo_table")
      ->required();
  reproduce->add_option("--runs", runs, "Runs per table cell (defaults per key)");

  auto* verify = app.add_subcommand("verify", "Run a named invariant suite");
  std::string verify_key;
  verify
      ->add_option("key", verify_key,
                   "One of: kkt, lyapunov, contraction, envelope, gradients")
      ->required();

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return cmd_run(scenario_path, overrides, seed, runs, out_dir, workers);
    if (reproduce->parsed()) return cmd_reproduce(reproduce_key, runs, out_dir, workers);
    if (verify->parsed()) return cmd_verify(verify_key, out_dir);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
