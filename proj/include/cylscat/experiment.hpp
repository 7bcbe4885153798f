#pragma once

#include "cylscat/direct_solver.hpp"
#include "cylscat/geometry.hpp"
#include "cylscat/inverse.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cylscat {

/// Boundary description: "peanut", "apple", "circle" (uses radius) or
/// "trig" (uses a, b).
struct GeometrySpec {
  std::string shape = "peanut";
  double radius = 1.0;
  std::vector<double> a, b;

  RadialFunction build() const;
};

/// One experiment. Mirrors the JSON layout documented in docs/config_example.json.
struct RunConfig {
  std::string name = "run";
  std::optional<GeometrySpec> geometry;  // ground truth; required for `direct`

  double eps0 = 1.0, mu0 = 1.0, eps1 = 2.0, mu1 = 2.0;
  double omega = 2.5;
  double theta = 1.0471975511965976;  // pi/3

  int illuminations = 1;
  double offset_steps = 0.0;  // phi_l = 2 pi (l + offset_steps) / L

  double delta1 = 0.0, delta2 = 0.0;
  std::uint64_t seed = 1;

  RegularizationConfig regularization;
  double r0 = 0.6;
  std::string variant = "combined";

  int n_forward = 64, n_inverse = 32, n_obs = 64;
  bool allow_inverse_crime = false;

  std::string output_dir;  // relative paths are resolved against the output root

  /// Throws ConfigError.
  void validate() const;
  PhysicalParams params(double phi = 0.0) const;
  std::vector<double> angles() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& config);

/// Sets a dotted key ("inverse.lambda0", "noise.delta1", ...). The value is
/// parsed as JSON when possible, otherwise taken as a string.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

/// $CYLSCAT_OUTPUT_ROOT if set, otherwise "output".
std::filesystem::path output_root();
std::filesystem::path resolve_output_dir(const RunConfig& config);

struct DirectRun {
  PhysicalParams params;
  std::vector<std::filesystem::path> files;
  std::vector<FarFieldFile> data;
};

/// Synthesizes (possibly noisy) far-field data for every illumination and
/// writes farfield_<l>.csv into `out_dir`.
DirectRun run_direct(const RunConfig& config, const std::filesystem::path& out_dir);

struct InvertRun {
  ReconstructionResult result;
  std::optional<RadialError> error;
  std::vector<double> error_history;
  std::string summary_json;
};

/// Reconstructs from data files. Writes trace.csv (iteration,t,r),
/// history.csv, summary.json and overlay.svg into `out_dir`. Outputs are
/// written even when the iteration stops on a solver failure.
InvertRun run_invert(const RunConfig& config, const std::vector<std::filesystem::path>& data_files,
                     const std::filesystem::path& out_dir);

/// Overlay plot of initial guess (green), truth (red dashed, optional) and
/// reconstruction (blue) with incident-direction arrows.
void write_overlay_svg(std::ostream& out, const RadialFunction& initial,
                       const std::optional<RadialFunction>& truth,
                       const RadialFunction& reconstruction, const std::vector<double>& phis);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ValidateOptions {
  int n = 64;
  bool flip_jump_sign = false;  // test hook
};

/// Oracle and invariant suite. Tolerances are loosened for n < 32.
std::vector<CheckResult> run_validation(const ValidateOptions& options = {});
void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

/// Looks for <id>.json in $CYLSCAT_EXPERIMENTS_DIR, ./experiments and the
/// source tree's experiments directory.
std::filesystem::path find_experiment(const std::string& id);

}  // namespace cylscat
