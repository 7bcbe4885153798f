// Command-line harness: direct, invert, validate, reproduce.
#include "cylscat/errors.hpp"
#include "cylscat/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cylscat;

namespace {

enum Exit { kOk = 0, kValidation = 1, kSolver = 2 };

RunConfig prepare(const std::string& path, const std::vector<std::string>& sets) {
  RunConfig config = load_run_config(path);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  config.validate();
  return config;
}

void echo_params(const PhysicalParams& p) {
  std::cout << "kappa0 = " << p.kappa0 << "\nkappa1 = " << p.kappa1 << "\nbeta = " << p.beta
            << '\n';
}

int do_direct(const RunConfig& config, const fs::path& out) {
  const DirectRun run = run_direct(config, out);
  echo_params(run.params);
  for (const fs::path& f : run.files) std::cout << "wrote " << f.string() << '\n';
  return kOk;
}

int do_invert(const RunConfig& config, std::vector<fs::path> files, const fs::path& out) {
  if (files.empty()) {
    for (int l = 1; l <= config.illuminations; ++l) {
      const fs::path p = out / ("farfield_" + std::to_string(l) + ".csv");
      if (!fs::exists(p)) throw ConfigError("no data files given and " + p.string() + " missing");
      files.push_back(p);
    }
  }
  const InvertRun run = run_invert(config, files, out);
  const ReconstructionResult& res = run.result;
  std::cout << "iterations = " << res.history.size() << " (" << res.stop_reason << ")\n";
  if (run.error)
    std::cout << "relative L2 error = " << run.error->relative_l2
              << "\nsup error = " << run.error->sup << '\n';
  std::cout << "outputs in " << out.string() << '\n';
  if (res.failure) {
    std::cerr << "error: " << *res.failure << '\n';
    return kSolver;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse scattering by an infinite dielectric cylinder at oblique incidence"};
  app.require_subcommand(1);

  std::string config_path, out_dir, experiment_id;
  std::vector<std::string> sets;
  std::vector<std::string> data_files;
  int validate_n = 64;
  bool flip = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--set", sets, "Override a config key, e.g. --set inverse.lambda0=0.5");
    sub->add_option("--out", out_dir, "Output directory (default: $CYLSCAT_OUTPUT_ROOT/<name>)");
  };

  CLI::App* direct = app.add_subcommand("direct", "Synthesize far-field data");
  direct->add_option("config", config_path, "Run config (JSON)")->required();
  add_common(direct);

  CLI::App* invert = app.add_subcommand("invert", "Reconstruct the boundary from far-field data");
  invert->add_option("config", config_path, "Run config (JSON)")->required();
  invert->add_option("data", data_files, "Far-field CSV files, one per illumination");
  add_common(invert);

  CLI::App* validate = app.add_subcommand("validate", "Run the oracle and invariant checks");
  validate->add_option("--n", validate_n, "Grid parameter (2n nodes)")->check(CLI::Range(4, 512));
  validate->add_flag("--flip-jump-sign", flip, "Test hook: corrupt the jump relations");

  CLI::App* reproduce = app.add_subcommand("reproduce", "Run a committed experiment end to end");
  reproduce->add_option("experiment", experiment_id, "Experiment id, e.g. exp1_peanut_exact")
      ->required();
  add_common(reproduce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*validate) {
      ValidateOptions opt;
      opt.n = validate_n;
      opt.flip_jump_sign = flip;
      const std::vector<CheckResult> checks = run_validation(opt);
      print_checks(std::cout, checks);
      for (const CheckResult& c : checks)
        if (!c.passed) return kValidation;
      return kOk;
    }
    if (*reproduce) config_path = find_experiment(experiment_id).string();
    const RunConfig config = prepare(config_path, sets);
    const fs::path out = out_dir.empty() ? resolve_output_dir(config) : fs::path(out_dir);
    if (*direct) return do_direct(config, out);
    if (*invert) return do_invert(config, {data_files.begin(), data_files.end()}, out);
    const int rc = do_direct(config, out);
    if (rc != kOk) return rc;
    return do_invert(config, {}, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
}
