// Command-line front end: scene configs in JSON, results as RFC-4180 CSV
// plus a JSON metadata sidecar that embeds the full effective config.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "casimir/energy.hpp"
#include "casimir/errors.hpp"
#include "casimir/spectral.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace casimir;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------- utilities

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + path);
  for (size_t i = 0; i < header.size(); ++i)
    f << (i ? "," : "") << csv_field(header[i]);
  f << "\r\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      f << (i ? "," : "") << csv_field(fmt(row[i]));
    f << "\r\n";
  }
}

void write_sidecar(const std::string& csv_path, const json& meta) {
  const std::string path = csv_path + ".meta.json";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open metadata file: " + path);
  f << meta.dump(2) << "\n";
}

// ------------------------------------------------------- schema validation

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key \"" + key + "\" in " + where);
  for (const auto& key : required)
    if (!obj.contains(key))
      throw ConfigError("missing key \"" + key + "\" in " + where);
}

double num(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

double num_or(const json& obj, const std::string& key,
              const std::string& where, double fallback) {
  return obj.contains(key) ? num(obj, key, where) : fallback;
}

int integer(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string str(const json& obj, const std::string& key,
                const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string())
    throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

// ---------------------------------------------------------- config parsing

CurveSpec parse_curve(const json& j, const std::string& where) {
  require_keys(j, where,
               {"type", "radius", "amplitude", "frequency", "phase",
                "semiminor", "semimajor"},
               {"type"});
  const std::string type = str(j, "type", where);
  if (type == "circle") {
    require_keys(j, where, {"type", "radius"}, {"radius"});
    return Circle{num(j, "radius", where)};
  }
  if (type == "corrugated") {
    require_keys(j, where, {"type", "radius", "amplitude", "frequency", "phase"},
                 {"radius", "amplitude", "frequency"});
    return CorrugatedCircle{num(j, "radius", where), num(j, "amplitude", where),
                            integer(j, "frequency", where),
                            num_or(j, "phase", where, 0.0)};
  }
  if (type == "ellipse") {
    require_keys(j, where, {"type", "semiminor", "semimajor"},
                 {"semiminor", "semimajor"});
    return Ellipse{num(j, "semiminor", where), num(j, "semimajor", where)};
  }
  throw ConfigError(where + ".type must be circle, corrugated, or ellipse");
}

SceneConfig parse_scene(const json& j) {
  require_keys(j, "scene",
               {"inner", "outer", "outer_offset", "outer_rotation", "bc_outer",
                "inner_kind", "eps1", "eps2", "truncation"},
               {"inner", "outer"});
  SceneConfig s;
  s.inner = parse_curve(j.at("inner"), "scene.inner");
  s.outer = parse_curve(j.at("outer"), "scene.outer");
  if (j.contains("outer_offset")) {
    const auto& off = j.at("outer_offset");
    if (!off.is_array() || off.size() != 2 || !off[0].is_number() ||
        !off[1].is_number())
      throw ConfigError("scene.outer_offset must be [x, y]");
    s.outer_placement.offset_x = off[0].get<double>();
    s.outer_placement.offset_y = off[1].get<double>();
  }
  s.outer_placement.rotation = num_or(j, "outer_rotation", "scene", 0.0);
  if (j.contains("bc_outer")) {
    const std::string bc = str(j, "bc_outer", "scene");
    if (bc == "dirichlet")
      s.bc_outer = BoundaryCondition::Dirichlet;
    else if (bc == "neumann")
      s.bc_outer = BoundaryCondition::Neumann;
    else
      throw ConfigError("scene.bc_outer must be dirichlet or neumann");
  }
  if (j.contains("inner_kind")) {
    const std::string k = str(j, "inner_kind", "scene");
    if (k == "dirichlet")
      s.inner_kind = InnerKind::PerfectConductorDirichlet;
    else if (k == "neumann")
      s.inner_kind = InnerKind::PerfectConductorNeumann;
    else if (k == "dielectric")
      s.inner_kind = InnerKind::DielectricInterface;
    else
      throw ConfigError(
          "scene.inner_kind must be dirichlet, neumann, or dielectric");
  }
  s.eps1 = num_or(j, "eps1", "scene", 1.0);
  s.eps2 = num_or(j, "eps2", "scene", 1.0);
  if (j.contains("truncation")) s.truncation = integer(j, "truncation", "scene");
  s.points_per_curve = 2 * s.truncation + 1;
  return s;
}

QuadratureSpec parse_quadrature(const json& j, const std::string& where) {
  require_keys(j, where,
               {"panels", "nodes_per_panel", "y_max", "refinement_tolerance"},
               {});
  QuadratureSpec q;
  if (j.contains("panels")) q.panels = integer(j, "panels", where);
  if (j.contains("nodes_per_panel"))
    q.nodes_per_panel = integer(j, "nodes_per_panel", where);
  q.y_max = num_or(j, "y_max", where, 0.0);
  q.refinement_tolerance = num_or(j, "refinement_tolerance", where, 1e-6);
  if (q.panels < 1 || q.nodes_per_panel < 2)
    throw ConfigError(where + ": panels >= 1 and nodes_per_panel >= 2 required");
  return q;
}

std::vector<double> parse_grid(const json& j) {
  if (j.contains("values")) {
    if (j.contains("start") || j.contains("stop") || j.contains("count"))
      throw ConfigError("sweep: give either values or start/stop/count");
    const auto& v = j.at("values");
    if (!v.is_array() || v.size() < 2)
      throw ConfigError("sweep.values must be an array of at least 2 numbers");
    std::vector<double> grid;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("sweep.values must be numeric");
      grid.push_back(x.get<double>());
    }
    return grid;
  }
  require_keys(j, "sweep", {"parameter", "start", "stop", "count"},
               {"parameter", "start", "stop", "count"});
  const double start = num(j, "start", "sweep");
  const double stop = num(j, "stop", "sweep");
  const int count = integer(j, "count", "sweep");
  if (count < 2) throw ConfigError("sweep.count must be >= 2");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i)
    grid[i] = start + (stop - start) * i / (count - 1);
  return grid;
}

SweepParameter parse_sweep_parameter(const std::string& p) {
  if (p == "phi0") return SweepParameter::Phi0;
  if (p == "eps_y") return SweepParameter::EpsY;
  if (p == "eps_x") return SweepParameter::EpsX;
  if (p == "amplitude") return SweepParameter::Amplitude;
  if (p == "eps1") return SweepParameter::Eps1;
  throw ConfigError(
      "sweep.parameter must be phi0, eps_y, eps_x, amplitude, or eps1");
}

// --------------------------------------------------------------- presets

json preset_config(const std::string& name) {
  json c;
  if (name == "fig2") {
    c["task"] = "fig2";
    c["scene"] = {
        {"inner", {{"type", "corrugated"}, {"radius", 1.0}, {"amplitude", 0.1},
                   {"frequency", 3}}},
        {"outer", {{"type", "corrugated"}, {"radius", 2.0}, {"amplitude", 0.1},
                   {"frequency", 3}}},
        {"bc_outer", "dirichlet"},
        {"inner_kind", "dirichlet"},
        {"truncation", 15}};
    c["quadrature"] = {{"panels", 10}, {"nodes_per_panel", 10}};
    c["sweep"] = {{"parameter", "phi0"}, {"start", 0.0},
                  {"stop", 2.0 * kPi * 15.0 / 16.0}, {"count", 16}};
    c["amplitudes"] = {0.1, 0.2};
  } else if (name == "fig3") {
    c["task"] = "fig3";
    c["scene"] = {
        {"inner", {{"type", "corrugated"}, {"radius", 1.0}, {"amplitude", 0.1},
                   {"frequency", 3}}},
        {"outer", {{"type", "corrugated"}, {"radius", 2.0}, {"amplitude", 0.1},
                   {"frequency", 3}}},
        {"truncation", 12}};
    c["quadrature"] = {{"panels", 8}, {"nodes_per_panel", 8}};
    c["sweep"] = {{"parameter", "phi0"}, {"start", 0.0},
                  {"stop", 2.0 * kPi * 15.0 / 16.0}, {"count", 16}};
    c["amplitudes"] = {0.1, 0.2, 0.3};
  } else if (name == "fig4") {
    c["task"] = "fig4";
    c["scene"] = {
        {"inner", {{"type", "circle"}, {"radius", 1.0}}},
        {"outer",
         {{"type", "ellipse"}, {"semiminor", 4.0}, {"semimajor", 4.33}}},
        {"bc_outer", "dirichlet"},
        {"inner_kind", "dirichlet"},
        {"truncation", 15}};
    c["quadrature"] = {{"panels", 10}, {"nodes_per_panel", 10}};
    c["sweep"] = {{"parameter", "eps_y"}, {"start", -2.5}, {"stop", 2.5},
                  {"count", 13}};
  } else {
    throw ConfigError("unknown preset: " + name + " (fig2, fig3, fig4)");
  }
  return c;
}

// ------------------------------------------------------------- task runners

json result_json(const EnergyResult& r) {
  json j;
  j["energy"] = r.energy;
  j["error_estimate"] = r.error_estimate;
  j["S"] = r.S_used;
  j["N"] = r.N_used;
  j["node_count"] = r.node_count;
  j["worst_log_q"] = r.worst_log_q;
  j["flags"] = r.flags;
  return j;
}

EnergyResult run_energy(const SceneConfig& scene, const json& cfg,
                        int threads) {
  const QuadratureSpec quad =
      parse_quadrature(cfg.value("quadrature", json::object()), "quadrature");
  if (scene.inner_kind == InnerKind::DielectricInterface) {
    const QuadratureSpec ang = parse_quadrature(
        cfg.value("angular_quadrature", json::object()), "angular_quadrature");
    return energy_dielectric(scene, quad, ang, threads);
  }
  return energy_conductor(scene, quad, threads);
}

int run(const json& cfg, const std::string& task, const std::string& out_path,
        int threads, bool verbose) {
  json meta;
  meta["task"] = task;
  meta["config"] = cfg;
  meta["threads"] = threads;

  if (task == "energy") {
    const SceneConfig scene = parse_scene(cfg.at("scene"));
    const EnergyResult r = run_energy(scene, cfg, threads);
    write_csv(out_path,
              {"energy", "error_estimate", "S", "N", "node_count",
               "worst_log_q"},
              {{r.energy, r.error_estimate, double(r.S_used), double(r.N_used),
                double(r.node_count), r.worst_log_q}});
    meta["results"] = result_json(r);
  } else if (task == "sweep" || task == "fit") {
    const SceneConfig scene = parse_scene(cfg.at("scene"));
    if (!cfg.contains("sweep")) throw ConfigError("missing sweep section");
    const json& sj = cfg.at("sweep");
    require_keys(sj, "sweep", {"parameter", "values", "start", "stop", "count"},
                 {"parameter"});
    const SweepParameter param =
        parse_sweep_parameter(str(sj, "parameter", "sweep"));
    const std::vector<double> grid = parse_grid(sj);
    const QuadratureSpec quad = parse_quadrature(
        cfg.value("quadrature", json::object()), "quadrature");
    if (task == "fit" && param != SweepParameter::Phi0)
      throw ConfigError("fit requires a phi0 sweep");
    if (verbose)
      std::cerr << "sweep: " << grid.size() << " points\n";
    const SweepTable table = sweep(scene, param, grid, quad, threads);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < grid.size(); ++i)
      rows.push_back({grid[i], table.results[i].energy,
                      table.results[i].error_estimate});
    write_csv(out_path, {table.parameter, "energy", "error_estimate"}, rows);
    meta["results"]["parameter"] = table.parameter;
    if (task == "fit") {
      const CosFit fit = cos_fit(table);
      meta["results"]["fit"] = {{"amplitude", fit.amplitude},
                                {"offset", fit.offset},
                                {"residual_rms", fit.residual_rms}};
    }
  } else if (task == "torque") {
    const SceneConfig scene = parse_scene(cfg.at("scene"));
    const json& tj = cfg.value("torque", json::object());
    require_keys(tj, "torque", {"phi0", "delta"}, {});
    const double phi0 = num_or(tj, "phi0", "torque", 0.0);
    const double delta = num_or(tj, "delta", "torque", kPi / 180.0);
    const QuadratureSpec quad = parse_quadrature(
        cfg.value("quadrature", json::object()), "quadrature");
    const double t = torque(scene, phi0, delta, quad, threads);
    write_csv(out_path, {"phi0", "torque"}, {{phi0, t}});
    meta["results"] = {{"phi0", phi0}, {"delta", delta}, {"torque", t}};
  } else if (task == "eigen") {
    if (!cfg.contains("eigen")) throw ConfigError("missing eigen section");
    const json& ej = cfg.at("eigen");
    require_keys(ej, "eigen",
                 {"curve", "bc", "method", "lambda_min", "lambda_max",
                  "truncation", "source_scale", "step"},
                 {"curve", "lambda_min", "lambda_max"});
    const CurveSpec curve = parse_curve(ej.at("curve"), "eigen.curve");
    const double lmin = num(ej, "lambda_min", "eigen");
    const double lmax = num(ej, "lambda_max", "eigen");
    const int S = ej.contains("truncation") ? integer(ej, "truncation", "eigen")
                                            : 10;
    const std::string method =
        ej.contains("method") ? str(ej, "method", "eigen") : "pmm";
    ScanOptions opts;
    if (ej.contains("step")) opts.step = num(ej, "step", "eigen");
    EigenvalueList ev;
    if (method == "pmm") {
      BoundaryCondition bc = BoundaryCondition::Dirichlet;
      if (ej.contains("bc")) {
        const std::string b = str(ej, "bc", "eigen");
        if (b == "neumann")
          bc = BoundaryCondition::Neumann;
        else if (b != "dirichlet")
          throw ConfigError("eigen.bc must be dirichlet or neumann");
      }
      ev = eigen_scan_pmm(curve, bc, lmin, lmax, S, opts);
    } else if (method == "mfs") {
      const double ss = num_or(ej, "source_scale", "eigen", 1.5);
      ScanOptions mfs_opts{opts.step, 1e-9, 5e-2};
      ev = eigen_scan_mfs(curve, lmin, lmax, S, ss, mfs_opts);
    } else {
      throw ConfigError("eigen.method must be pmm or mfs");
    }
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < ev.values.size(); ++i)
      rows.push_back({ev.values[i], ev.residuals[i]});
    write_csv(out_path, {"lambda", "residual"}, rows);
    meta["results"]["count"] = ev.values.size();
    meta["results"]["conditioning_warning"] = ev.conditioning_warning;
  } else if (task == "fig2" || task == "fig3") {
    // Phase sweeps at several corrugation amplitudes; fig3 additionally runs
    // both boundary conditions and records the cosine-fit residuals.
    const json& sj = cfg.at("sweep");
    const std::vector<double> grid = parse_grid(sj);
    const QuadratureSpec quad = parse_quadrature(
        cfg.value("quadrature", json::object()), "quadrature");
    std::vector<double> amps;
    for (const auto& a : cfg.at("amplitudes")) amps.push_back(a.get<double>());

    if (task == "fig2") {
      std::vector<std::string> header = {"phi0"};
      std::vector<std::vector<double>> rows(grid.size());
      for (size_t i = 0; i < grid.size(); ++i) rows[i].push_back(grid[i]);
      for (double h : amps) {
        json scene_json = cfg.at("scene");
        scene_json["inner"]["amplitude"] = h;
        scene_json["outer"]["amplitude"] = h;
        const SceneConfig scene = parse_scene(scene_json);
        if (verbose) std::cerr << "fig2: h = " << h << "\n";
        const SweepTable t = sweep(scene, SweepParameter::Phi0, grid, quad,
                                   threads);
        char label[32];
        std::snprintf(label, sizeof(label), "%g", h);
        header.push_back(std::string("energy_h") + label);
        header.push_back(std::string("error_h") + label);
        for (size_t i = 0; i < grid.size(); ++i) {
          rows[i].push_back(t.results[i].energy);
          rows[i].push_back(t.results[i].error_estimate);
        }
        const CosFit fit = cos_fit(t);
        meta["results"]["fits"].push_back({{"amplitude_h", h},
                                           {"amplitude", fit.amplitude},
                                           {"offset", fit.offset},
                                           {"residual_rms", fit.residual_rms}});
      }
      write_csv(out_path, header, rows);
    } else {
      std::vector<std::vector<double>> rows;
      for (double h : amps) {
        json scene_json = cfg.at("scene");
        scene_json["inner"]["amplitude"] = h;
        scene_json["outer"]["amplitude"] = h;
        std::vector<double> row = {h};
        for (const char* bc : {"dirichlet", "neumann"}) {
          scene_json["bc_outer"] = bc;
          scene_json["inner_kind"] = bc;
          const SceneConfig scene = parse_scene(scene_json);
          if (verbose) std::cerr << "fig3: h = " << h << " " << bc << "\n";
          const SweepTable t = sweep(scene, SweepParameter::Phi0, grid, quad,
                                     threads);
          const CosFit fit = cos_fit(t);
          row.push_back(fit.amplitude);
          row.push_back(fit.residual_rms);
          meta["results"]["fits"].push_back(
              {{"amplitude_h", h},
               {"bc", bc},
               {"amplitude", fit.amplitude},
               {"offset", fit.offset},
               {"residual_rms", fit.residual_rms}});
        }
        rows.push_back(row);
      }
      write_csv(out_path,
                {"h", "amplitude_tm", "residual_tm", "amplitude_te",
                 "residual_te"},
                rows);
    }
  } else if (task == "fig4") {
    const SceneConfig scene = parse_scene(cfg.at("scene"));
    const std::vector<double> grid = parse_grid(cfg.at("sweep"));
    const QuadratureSpec quad = parse_quadrature(
        cfg.value("quadrature", json::object()), "quadrature");
    const SweepTable t = sweep(scene, SweepParameter::EpsY, grid, quad,
                               threads);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < grid.size(); ++i)
      rows.push_back({grid[i], t.results[i].energy,
                      t.results[i].error_estimate});
    write_csv(out_path, {"eps_y", "energy", "error_estimate"}, rows);
    const auto& ell = std::get<Ellipse>(scene.outer);
    meta["results"]["semiminor"] = ell.semiminor;
    meta["results"]["semimajor"] = ell.semimajor;
    meta["results"]["focal_distance"] =
        std::sqrt(ell.semimajor * ell.semimajor - ell.semiminor * ell.semiminor);
  } else {
    throw ConfigError("unknown task: " + task);
  }

  write_sidecar(out_path, meta);
  if (verbose) std::cerr << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir interaction energies for waveguide cross-sections"};
  std::string config_path, out_path, task, preset;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_path, "output CSV path")->required();
  app.add_option("--task", task,
                 "energy | sweep | torque | eigen | fit (overrides config)");
  app.add_option("--preset", preset, "fig2 | fig3 | fig4");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_flag("--verbose", verbose, "progress to stderr");
  CLI11_PARSE(app, argc, argv);

  try {
    if (threads < 0) throw ConfigError("--threads must be >= 0");
    if (threads == 0)
      threads = std::max(1u, std::thread::hardware_concurrency());

    json cfg;
    if (!preset.empty()) {
      if (!config_path.empty())
        throw ConfigError("--preset and --config are mutually exclusive");
      cfg = preset_config(preset);
    } else if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot open config file: " + config_path);
      try {
        cfg = json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
      }
    } else {
      throw ConfigError("either --config or --preset is required");
    }

    require_keys(cfg, "config",
                 {"task", "scene", "quadrature", "angular_quadrature", "sweep",
                  "torque", "eigen", "amplitudes"},
                 {});
    if (task.empty()) {
      if (!cfg.contains("task"))
        throw ConfigError("no task given (--task or config \"task\")");
      task = str(cfg, "task", "config");
    }
    cfg["task"] = task;
    return run(cfg, task, out_path, threads, verbose);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
