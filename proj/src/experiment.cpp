#include "cylscat/experiment.hpp"

#include "cylscat/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace cylscat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename T>
void read_opt(const json& j, const char* key, T& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

json geometry_json(const GeometrySpec& g) {
  json j = {{"shape", g.shape}};
  if (g.shape == "circle") j["radius"] = g.radius;
  if (g.shape == "trig") {
    j["a"] = g.a;
    j["b"] = g.b;
  }
  return j;
}

json config_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["geometry"] = c.geometry ? geometry_json(*c.geometry) : json(nullptr);
  j["physics"] = {{"eps0", c.eps0}, {"mu0", c.mu0},     {"eps1", c.eps1},
                  {"mu1", c.mu1},   {"omega", c.omega}, {"theta", c.theta}};
  j["illuminations"] = {{"count", c.illuminations}, {"offset_steps", c.offset_steps}};
  j["noise"] = {{"delta1", c.delta1}, {"delta2", c.delta2}, {"seed", c.seed}};
  const RegularizationConfig& r = c.regularization;
  j["inverse"] = {{"degree", r.degree},     {"sobolev_p", r.sobolev_p}, {"lambda0", r.lambda0},
                  {"decay", r.decay},       {"max_iter", r.max_iter},   {"stop_tol", r.stop_tol},
                  {"r0", c.r0},             {"variant", c.variant}};
  j["grids"] = {{"n_forward", c.n_forward},
                {"n_inverse", c.n_inverse},
                {"n_obs", c.n_obs},
                {"allow_inverse_crime", c.allow_inverse_crime}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

RunConfig config_from(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig c;
  read_opt(j, "name", c.name);
  if (j.contains("geometry") && !j["geometry"].is_null()) {
    const json& g = j["geometry"];
    GeometrySpec spec;
    read_opt(g, "shape", spec.shape);
    read_opt(g, "radius", spec.radius);
    read_opt(g, "a", spec.a);
    read_opt(g, "b", spec.b);
    c.geometry = spec;
  }
  if (j.contains("physics")) {
    const json& p = j["physics"];
    read_opt(p, "eps0", c.eps0);
    read_opt(p, "mu0", c.mu0);
    read_opt(p, "eps1", c.eps1);
    read_opt(p, "mu1", c.mu1);
    read_opt(p, "omega", c.omega);
    read_opt(p, "theta", c.theta);
  }
  if (j.contains("illuminations")) {
    read_opt(j["illuminations"], "count", c.illuminations);
    read_opt(j["illuminations"], "offset_steps", c.offset_steps);
  }
  if (j.contains("noise")) {
    read_opt(j["noise"], "delta1", c.delta1);
    read_opt(j["noise"], "delta2", c.delta2);
    read_opt(j["noise"], "seed", c.seed);
  }
  if (j.contains("inverse")) {
    const json& v = j["inverse"];
    RegularizationConfig& r = c.regularization;
    read_opt(v, "degree", r.degree);
    read_opt(v, "sobolev_p", r.sobolev_p);
    read_opt(v, "lambda0", r.lambda0);
    read_opt(v, "decay", r.decay);
    read_opt(v, "max_iter", r.max_iter);
    read_opt(v, "stop_tol", r.stop_tol);
    read_opt(v, "r0", c.r0);
    read_opt(v, "variant", c.variant);
  }
  if (j.contains("grids")) {
    const json& g = j["grids"];
    read_opt(g, "n_forward", c.n_forward);
    read_opt(g, "n_inverse", c.n_inverse);
    read_opt(g, "n_obs", c.n_obs);
    read_opt(g, "allow_inverse_crime", c.allow_inverse_crime);
  }
  if (j.contains("output")) read_opt(j["output"], "dir", c.output_dir);
  return c;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

json error_json(const RadialError& e) {
  return {{"relative_l2", e.relative_l2}, {"sup", e.sup}};
}

}  // namespace

RadialFunction GeometrySpec::build() const {
  if (shape == "peanut") return RadialFunction::peanut();
  if (shape == "apple") return RadialFunction::apple();
  if (shape == "circle") {
    if (!(radius > 0.0)) throw ConfigError("geometry: circle radius must be positive");
    return RadialFunction::circle(radius);
  }
  if (shape == "trig") {
    if (a.empty() || b.size() + 1 != a.size())
      throw ConfigError("geometry: trig needs a (m+1 entries) and b (m entries)");
    return RadialFunction::from_trig(TrigPolynomial(a, b));
  }
  throw ConfigError("geometry: unknown shape '" + shape + "'");
}

void RunConfig::validate() const {
  if (geometry) {
    const RadialFunction r = geometry->build();
    for (int i = 0; i < 512; ++i)
      if (!(r.eval(2.0 * kPi * i / 512).r > 0.0))
        throw ConfigError("geometry: radial function must be positive");
  }
  derive_params(eps0, mu0, eps1, mu1, omega, theta, 0.0);
  if (illuminations < 1) throw ConfigError("illuminations.count must be >= 1");
  if (delta1 < 0.0 || delta2 < 0.0) throw ConfigError("noise levels must be non-negative");
  regularization.validate();
  if (!(r0 > 0.0)) throw ConfigError("inverse.r0 must be positive");
  parse_variant(variant);
  if (n_forward < 4 || n_inverse < 4) throw ConfigError("grids: n must be >= 4");
  if (n_obs < 1) throw ConfigError("grids.n_obs must be >= 1");
  if (n_forward < 2 * n_inverse && !allow_inverse_crime)
    throw ConfigError("grids: n_forward must be >= 2 n_inverse (set grids.allow_inverse_crime "
                      "to override)");
}

PhysicalParams RunConfig::params(double phi) const {
  return derive_params(eps0, mu0, eps1, mu1, omega, theta, phi);
}

std::vector<double> RunConfig::angles() const {
  return illumination_angles(illuminations, 2.0 * kPi * offset_steps / illuminations);
}

RunConfig parse_run_config(const std::string& json_text) {
  try {
    return config_from(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig c = parse_run_config(buf.str());
  if (c.name == "run") c.name = path.stem().string();
  return c;
}

std::string to_json(const RunConfig& config) { return config_json(config).dump(2); }

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  json j = config_json(config);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    v = value;
  }
  json::json_pointer ptr;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) ptr /= part;
  if (ptr.empty()) throw ConfigError("override: empty key");
  if (!j.contains(ptr.parent_pointer()) && !ptr.parent_pointer().empty())
    throw ConfigError("override: unknown section in '" + key + "'");
  if (!j.contains(ptr) && ptr.parent_pointer().to_string() != "/geometry")
    throw ConfigError("override: unknown key '" + key + "'");
  try {
    j[ptr] = v;
    config = config_from(j);
  } catch (const json::exception& e) {
    throw ConfigError("override " + key + ": " + e.what());
  }
}

fs::path output_root() {
  const char* env = std::getenv("CYLSCAT_OUTPUT_ROOT");
  return (env && *env) ? fs::path(env) : fs::path("output");
}

fs::path resolve_output_dir(const RunConfig& config) {
  fs::path dir = config.output_dir.empty() ? fs::path(config.name) : fs::path(config.output_dir);
  return dir.is_absolute() ? dir : output_root() / dir;
}

DirectRun run_direct(const RunConfig& config, const fs::path& out_dir) {
  config.validate();
  if (!config.geometry) throw ConfigError("direct: geometry is required");
  const RadialFunction truth = config.geometry->build();
  const Eigen::VectorXd obs = equidistant_angles(config.n_obs);

  DirectRun run;
  run.params = config.params();
  fs::create_directories(out_dir);
  const std::vector<double> phis = config.angles();
  for (std::size_t l = 0; l < phis.size(); ++l) {
    const PhysicalParams p = config.params(phis[l]);
    FarFieldFile file;
    file.pattern = simulate_farfield(truth, config.n_forward, p, obs);
    const std::uint64_t seed = config.seed + l;
    if (config.delta1 > 0.0 || config.delta2 > 0.0)
      file.pattern = add_noise(file.pattern, config.delta1, config.delta2, seed);
    file.header = {{"name", config.name},
                   {"shape", config.geometry->shape},
                   {"eps0", fmt(config.eps0)},
                   {"mu0", fmt(config.mu0)},
                   {"eps1", fmt(config.eps1)},
                   {"mu1", fmt(config.mu1)},
                   {"omega", fmt(config.omega)},
                   {"theta", fmt(config.theta)},
                   {"phi", fmt(phis[l])},
                   {"illumination", std::to_string(l + 1)},
                   {"n_forward", std::to_string(config.n_forward)},
                   {"delta1", fmt(config.delta1)},
                   {"delta2", fmt(config.delta2)},
                   {"seed", std::to_string(seed)}};
    const fs::path path = out_dir / ("farfield_" + std::to_string(l + 1) + ".csv");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_farfield_csv(out, file);
    run.files.push_back(path);
    run.data.push_back(std::move(file));
  }
  return run;
}

namespace {

double header_number(const FarFieldFile& f, const std::string& key, const fs::path& path) {
  auto it = f.header.find(key);
  if (it == f.header.end()) throw ConfigError(path.string() + ": header lacks '" + key + "'");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError(path.string() + ": bad header value for '" + key + "'");
  }
}

void check_header(const FarFieldFile& f, const std::string& key, double expected,
                  const fs::path& path) {
  if (f.header.count(key) == 0) return;
  const double v = header_number(f, key, path);
  if (std::abs(v - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
    throw ConfigError(path.string() + ": " + key + " differs from the config");
}

void write_trace_csv(const fs::path& path, const ReconstructionResult& res, int n) {
  std::ofstream out(path);
  out << "iteration,t,r\n" << std::setprecision(17);
  const Eigen::VectorXd t = grid_nodes(n);
  auto dump = [&](int k, const TrigPolynomial& q) {
    for (int j = 0; j < t.size(); ++j) out << k << ',' << t[j] << ',' << q(t[j]) << '\n';
  };
  dump(0, res.initial);
  for (const IterationRecord& rec : res.history) dump(rec.k, rec.radial);
}

void write_history_csv(const fs::path& path, const ReconstructionResult& res,
                       const std::vector<double>& errors) {
  std::ofstream out(path);
  out << "iteration,lambda,misfit,update_norm,halvings,cg_iterations";
  if (!errors.empty()) out << ",relative_l2";
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < res.history.size(); ++i) {
    const IterationRecord& r = res.history[i];
    out << r.k << ',' << r.lambda << ',' << r.misfit << ',' << r.update_norm << ',' << r.halvings
        << ',' << r.cg_iterations;
    if (!errors.empty()) out << ',' << errors[i];
    out << '\n';
  }
}

}  // namespace

InvertRun run_invert(const RunConfig& config, const std::vector<fs::path>& data_files,
                     const fs::path& out_dir) {
  config.validate();
  if (static_cast<int>(data_files.size()) != config.illuminations)
    throw ConfigError("invert: " + std::to_string(data_files.size()) + " data files for " +
                      std::to_string(config.illuminations) + " illuminations");
  const PhysicalParams base = config.params();

  std::vector<Illumination> ills;
  std::vector<double> phis;
  for (const fs::path& path : data_files) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file " + path.string());
    FarFieldFile f = read_farfield_csv(in);
    check_header(f, "omega", config.omega, path);
    check_header(f, "theta", config.theta, path);
    check_header(f, "eps0", config.eps0, path);
    check_header(f, "mu0", config.mu0, path);
    check_header(f, "eps1", config.eps1, path);
    check_header(f, "mu1", config.mu1, path);
    if (f.pattern.obs_angles.size() != config.n_obs)
      throw ConfigError(path.string() + ": expected " + std::to_string(config.n_obs) +
                        " observation angles");
    if (f.header.count("n_forward")) {
      const int nf = static_cast<int>(header_number(f, "n_forward", path));
      if (nf < 2 * config.n_inverse && !config.allow_inverse_crime)
        throw ConfigError(path.string() + ": data grid n_forward=" + std::to_string(nf) +
                          " is not finer than 2 n_inverse");
    }
    const double phi = header_number(f, "phi", path);
    phis.push_back(phi);
    ills.push_back({phi, std::move(f.pattern)});
  }

  const Variant variant = parse_variant(config.variant);
  InvertRun run;
  run.result = reconstruct(base, ills, config.regularization,
                           TrigPolynomial::constant(config.r0), variant, config.n_inverse);
  const ReconstructionResult& res = run.result;

  std::optional<RadialFunction> truth;
  if (config.geometry) truth = config.geometry->build();
  const RadialFunction rec = RadialFunction::from_trig(res.final_radial);
  if (truth) {
    run.error = radial_error(rec, *truth);
    for (const IterationRecord& r : res.history)
      run.error_history.push_back(
          radial_error(RadialFunction::from_trig(r.radial), *truth).relative_l2);
  }

  json s;
  s["name"] = config.name;
  s["variant"] = to_string(variant);
  s["illuminations"] = phis;
  s["kappa0"] = base.kappa0;
  s["kappa1"] = base.kappa1;
  s["beta"] = base.beta;
  s["iterations"] = res.history.size();
  s["stop_reason"] = res.stop_reason;
  s["failure"] = res.failure ? json(*res.failure) : json(nullptr);
  s["initial"] = {{"a", res.initial.a()}, {"b", res.initial.b()}};
  s["final"] = {{"a", res.final_radial.a()}, {"b", res.final_radial.b()}};
  json misfit = json::array(), lambda = json::array();
  for (const IterationRecord& r : res.history) {
    misfit.push_back(r.misfit);
    lambda.push_back(r.lambda);
  }
  s["misfit_history"] = misfit;
  s["lambda_history"] = lambda;
  if (run.error) {
    s["error"] = error_json(*run.error);
    s["error_history"] = run.error_history;
  }
  run.summary_json = s.dump(2);

  fs::create_directories(out_dir);
  write_trace_csv(out_dir / "trace.csv", res, config.n_inverse);
  write_history_csv(out_dir / "history.csv", res, run.error_history);
  {
    std::ofstream out(out_dir / "summary.json");
    out << run.summary_json << '\n';
  }
  {
    std::ofstream out(out_dir / "overlay.svg");
    write_overlay_svg(out, RadialFunction::from_trig(res.initial), truth, rec, phis);
  }
  return run;
}

void write_overlay_svg(std::ostream& out, const RadialFunction& initial,
                       const std::optional<RadialFunction>& truth,
                       const RadialFunction& reconstruction, const std::vector<double>& phis) {
  constexpr int kSamples = 400;
  constexpr double kSize = 480.0;
  double extent = 0.0;
  auto sample = [&](const RadialFunction& f) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= kSamples; ++i) {
      const double t = 2.0 * kPi * i / kSamples;
      const double r = f.eval(t).r;
      pts.emplace_back(r * std::cos(t), r * std::sin(t));
      extent = std::max(extent, std::abs(r));
    }
    return pts;
  };
  const auto p_init = sample(initial);
  const auto p_rec = sample(reconstruction);
  const auto p_truth = truth ? sample(*truth) : decltype(p_init){};
  const double arrow_out = 1.45 * extent, arrow_in = 1.12 * extent;
  const double half = 1.6 * extent;
  auto sx = [&](double x) { return (x + half) / (2.0 * half) * kSize; };
  auto sy = [&](double y) { return (half - y) / (2.0 * half) * kSize; };

  out << std::fixed << std::setprecision(3);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  out << "<defs><marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"4\" "
         "orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\" fill=\"black\"/></marker></defs>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto poly = [&](const std::vector<std::pair<double, double>>& pts, const char* style) {
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
    out << "\"/>\n";
  };
  poly(p_init, "stroke=\"green\" stroke-width=\"2\"");
  if (truth) poly(p_truth, "stroke=\"red\" stroke-width=\"2\" stroke-dasharray=\"8,5\"");
  poly(p_rec, "stroke=\"blue\" stroke-width=\"2\"");
  for (double phi : phis) {
    const double dx = std::cos(phi), dy = std::sin(phi);
    out << "<line x1=\"" << sx(-arrow_out * dx) << "\" y1=\"" << sy(-arrow_out * dy) << "\" x2=\""
        << sx(-arrow_in * dx) << "\" y2=\"" << sy(-arrow_in * dy)
        << "\" stroke=\"black\" stroke-width=\"1.5\" marker-end=\"url(#head)\"/>\n";
  }
  out << "</svg>\n";
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  std::size_t width = 5;
  for (const CheckResult& c : checks) width = std::max(width, c.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "check"
      << "  value        tolerance    status\n";
  for (const CheckResult& c : checks) {
    out << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::scientific
        << std::setprecision(3) << std::setw(11) << c.value << "  " << std::setw(11) << c.tolerance
        << "  " << (c.passed ? "PASS" : "FAIL") << '\n';
  }
  out << std::defaultfloat;
}

fs::path find_experiment(const std::string& id) {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("CYLSCAT_EXPERIMENTS_DIR"); env && *env) dirs.emplace_back(env);
  dirs.emplace_back("experiments");
#ifdef CYLSCAT_SOURCE_DIR
  dirs.emplace_back(fs::path(CYLSCAT_SOURCE_DIR) / "experiments");
#endif
  for (const fs::path& d : dirs) {
    const fs::path p = d / (id + ".json");
    if (fs::exists(p)) return p;
  }
  throw ConfigError("unknown experiment '" + id + "'");
}

}  // namespace cylscat
