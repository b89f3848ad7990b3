// Command-line front end: spectrum | propagate | gauge | finite-size |
// eliminate | render, each driven by a strict JSON experiment file.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <floqlat/experiments.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace floqlat;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_object(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  return j;
}

std::ofstream open_output(const fs::path& dir, const std::string& name,
                          std::vector<std::string>& outputs,
                          std::ios::openmode mode = std::ios::out) {
  std::ofstream out(dir / name, mode);
  if (!out) throw std::runtime_error("cannot open output file: " + (dir / name).string());
  outputs.push_back(name);
  return out;
}

void write_summary(const fs::path& dir, json summary) {
  std::ofstream out(dir / "summary.json");
  if (!out) throw std::runtime_error("cannot write summary.json");
  out << summary.dump(2) << "\n";
}

json lattice_json(const LatticeConfig& cfg) { return json::parse(lattice_to_json(cfg)); }

json fidelity_json(const FidelityReport& rep) { return json::parse(to_json(rep)); }

FidelityThresholds fidelity_thresholds(const json& j) {
  FidelityThresholds t;
  if (j.contains("max_leak")) t.max_leak = j["max_leak"].get<double>();
  if (j.contains("min_peak")) t.min_peak = j["min_peak"].get<double>();
  if (!(t.max_leak > 0.0 && t.max_leak < 1.0) || !(t.min_peak > 0.0 && t.min_peak < 1.0))
    throw std::invalid_argument("fidelity thresholds must lie in (0, 1)");
  return t;
}

json thresholds_json(const FidelityThresholds& t) {
  return json{{"max_leak", t.max_leak}, {"min_peak", t.min_peak}};
}

json experiment_json(const ExperimentConfig& cfg) {
  return json{{"lattice", lattice_json(cfg.lattice)},
              {"input_site", cfg.input_site},
              {"n_periods", cfg.n_periods},
              {"total_length", cfg.total_length},
              {"sample_stride", cfg.sample_stride}};
}

void run_spectrum(const std::string& text, const fs::path& dir) {
  const ExperimentConfig cfg = experiment_from_json(
      text, {"grid", "grid_min", "grid_max", "grid_points", "steps_per_period",
             "tol_0", "tol_pi", "w_min"});
  const json j = parse_object(text);

  std::vector<double> grid;
  if (j.contains("grid")) {
    if (j.contains("grid_min") || j.contains("grid_max") || j.contains("grid_points"))
      throw std::invalid_argument("give either grid or grid_min/grid_max/grid_points");
    grid = j["grid"].get<std::vector<double>>();
  } else {
    if (!j.contains("grid_min") || !j.contains("grid_max") || !j.contains("grid_points"))
      throw std::invalid_argument("grid_min, grid_max, grid_points are all required");
    const double lo = j["grid_min"].get<double>();
    const double hi = j["grid_max"].get<double>();
    const int n = j["grid_points"].get<int>();
    if (n < 2 || !(lo < hi)) throw std::invalid_argument("invalid grid specification");
    grid.resize(n);
    for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  }

  ClassifyThresholds thr = default_thresholds(cfg.lattice.n_sites);
  if (j.contains("tol_0")) thr.tol_0 = j["tol_0"].get<double>();
  if (j.contains("tol_pi")) thr.tol_pi = j["tol_pi"].get<double>();
  if (j.contains("w_min")) thr.w_min = j["w_min"].get<double>();
  const int steps = j.value("steps_per_period", 1000);

  const SweepSummary result = run_sweep_experiment(cfg.lattice, grid, thr, steps);

  std::vector<std::string> outputs;
  {
    std::ofstream csv = open_output(dir, "spectrum.csv", outputs);
    write_csv(result.sweep, csv);
  }
  json window{{"found", result.window_found}};
  if (result.window_found) {
    window["lo"] = result.window_lo;
    window["hi"] = result.window_hi;
  }
  write_summary(dir, json{{"verb", "spectrum"},
                          {"lattice", lattice_json(cfg.lattice)},
                          {"thresholds",
                           {{"tol_0", thr.tol_0}, {"tol_pi", thr.tol_pi}, {"w_min", thr.w_min}}},
                          {"steps_per_period", steps},
                          {"grid_points", grid.size()},
                          {"pi_window", window},
                          {"outputs", outputs}});
}

void run_propagate(const std::string& text, const fs::path& dir) {
  const ExperimentConfig cfg = experiment_from_json(text, {"max_leak", "min_peak"});
  const FidelityThresholds thr = fidelity_thresholds(parse_object(text));

  const auto [record, report] = run_propagation_experiment(cfg, thr);

  std::vector<std::string> outputs;
  {
    std::ofstream csv = open_output(dir, "propagation.csv", outputs);
    write_csv(record, csv);
  }
  if (cfg.lattice.dkappa1 != 0.0) {
    const StateVector input = record.states.front();
    const PropagationRecord strobe =
        stroboscopic_series(cfg.lattice, input, cfg.n_periods);
    std::ofstream csv = open_output(dir, "stroboscopic.csv", outputs);
    write_csv(strobe, csv);
  }
  write_summary(dir, json{{"verb", "propagate"},
                          {"experiment", experiment_json(cfg)},
                          {"thresholds", thresholds_json(thr)},
                          {"fidelity", fidelity_json(report)},
                          {"outputs", outputs}});
}

void run_gauge(const std::string& text, const fs::path& dir) {
  const ExperimentConfig cfg = experiment_from_json(text, {"max_leak", "min_peak"});
  if (cfg.lattice.dkappa0 != 0.0)
    throw std::invalid_argument("gauge experiment requires dkappa0 = 0");
  const FidelityThresholds thr = fidelity_thresholds(parse_object(text));

  const GaugeGrid grid = run_gauge_experiment(cfg, thr);

  const char* names[4] = {"trace_g0_in1.csv", "trace_gpi_in1.csv",
                          "trace_g0_in2.csv", "trace_gpi_in2.csv"};
  const double gauges[4] = {0.0, 1.0, 0.0, 1.0};  // units of pi
  const int inputs[4] = {1, 1, 2, 2};

  std::vector<std::string> outputs;
  json cells = json::array();
  for (int i = 0; i < 4; ++i) {
    std::ofstream csv = open_output(dir, names[i], outputs);
    write_csv(grid.records[i], csv);
    cells.push_back(json{{"gauge_over_pi", gauges[i]},
                         {"input_site", inputs[i]},
                         {"fidelity", fidelity_json(grid.cells[i])}});
  }
  json pattern = json::array();
  for (const FidelityReport& rep : grid.cells) pattern.push_back(rep.eliminated);
  write_summary(dir, json{{"verb", "gauge"},
                          {"experiment", experiment_json(cfg)},
                          {"thresholds", thresholds_json(thr)},
                          {"cells", cells},
                          {"eliminated_pattern", pattern},
                          {"outputs", outputs}});
}

void run_finite_size(const std::string& text, const fs::path& dir) {
  const ExperimentConfig cfg =
      experiment_from_json(text, {"sizes", "max_leak", "min_peak"});
  const json j = parse_object(text);
  if (!j.contains("sizes"))
    throw std::invalid_argument("missing experiment config key: sizes");
  const std::vector<int> sizes = j["sizes"].get<std::vector<int>>();
  const FidelityThresholds thr = fidelity_thresholds(j);

  const std::vector<FiniteSizePoint> table =
      run_finite_size_experiment(cfg, sizes, thr);

  std::vector<std::string> outputs;
  {
    std::ofstream csv = open_output(dir, "finite_size.csv", outputs);
    write_csv(table, csv);
  }
  json rows = json::array();
  for (const FiniteSizePoint& row : table)
    rows.push_back(json{{"n_sites", row.n_sites},
                        {"splitting", row.splitting},
                        {"mode_type", row.zero_mode_based ? "zero" : "pi"},
                        {"fidelity", fidelity_json(row.fidelity)}});
  write_summary(dir, json{{"verb", "finite-size"},
                          {"experiment", experiment_json(cfg)},
                          {"thresholds", thresholds_json(thr)},
                          {"table", rows},
                          {"outputs", outputs}});
}

void run_eliminate(const std::string& text, const fs::path& dir) {
  const ExperimentConfig cfg = experiment_from_json(text, {"kept", "sizes"});
  const json j = parse_object(text);

  SubspacePartition part = outer_partition(cfg.lattice.n_sites);
  if (j.contains("kept"))
    part = make_partition(cfg.lattice.n_sites, j["kept"].get<std::vector<int>>());

  // Static lattices are projected as-is; driven ones through the drive average.
  const Eigen::MatrixXd h = cfg.lattice.dkappa1 != 0.0
                                ? static_reference(cfg.lattice)
                                : build_hamiltonian(cfg.lattice, 0.0);
  const EffectiveHamiltonian eff = project_effective(h.cast<std::complex<double>>(), part);

  const double dk_eff = effective_stroboscopic_coupling(cfg.lattice);
  const Regime regime = classify_regime(cfg.lattice);

  json summary{{"verb", "eliminate"},
               {"lattice", lattice_json(cfg.lattice)},
               {"effective", json::parse(to_json(eff))},
               {"effective_stroboscopic_coupling", dk_eff},
               {"adiabatic_ratio", adiabatic_ratio(cfg.lattice.kappa0, dk_eff)},
               {"regime", to_string(regime)}};

  std::vector<std::string> outputs;
  if (j.contains("sizes")) {
    const DecayFit fit = decay_fit(cfg.lattice, j["sizes"].get<std::vector<int>>());
    summary["decay_fit"] = json::parse(to_json(fit));
    std::ofstream csv = open_output(dir, "decay.csv", outputs);
    csv << "n_sites,h_eff_norm\n";
    char line[64];
    for (std::size_t i = 0; i < fit.sizes.size(); ++i) {
      std::snprintf(line, sizeof line, "%d,%.12g\n", fit.sizes[i], fit.norms[i]);
      csv << line;
    }
  }
  summary["outputs"] = outputs;
  write_summary(dir, summary);
}

void run_render(const std::string& text, const fs::path& dir) {
  const ExperimentConfig cfg = experiment_from_json(text, {"max_leak", "min_peak"});
  const FidelityThresholds thr = fidelity_thresholds(parse_object(text));

  const auto [record, report] = run_propagation_experiment(cfg, thr);
  render_intensity_map(record, (dir / "intensity.pgm").string());

  write_summary(dir, json{{"verb", "render"},
                          {"experiment", experiment_json(cfg)},
                          {"thresholds", thresholds_json(thr)},
                          {"fidelity", fidelity_json(report)},
                          {"width", record.states.size()},
                          {"height", cfg.lattice.n_sites},
                          {"outputs", {"intensity.pgm"}}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodically driven coupled-waveguide lattice simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  const char* verbs[6] = {"spectrum", "propagate", "gauge",
                          "finite-size", "eliminate", "render"};
  const char* blurbs[6] = {
      "quasi-energy band sweep over omega/Delta with mode labels",
      "beam propagation with channel fidelity metrics",
      "Floquet-gauge grid: theta_0 in {0, pi} x input in {1, 2}",
      "pi/zero-mode splitting and fidelity versus lattice size",
      "projector-based effective Hamiltonian and decay fit",
      "grayscale intensity map of a propagation run"};
  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(verbs[i], blurbs[i]);
    sub->add_option("--config", config_path, "experiment JSON file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string text = read_file(config_path);
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + out_dir);

    const std::string verb = app.get_subcommands().front()->get_name();
    if (verb == "spectrum") run_spectrum(text, dir);
    else if (verb == "propagate") run_propagate(text, dir);
    else if (verb == "gauge") run_gauge(text, dir);
    else if (verb == "finite-size") run_finite_size(text, dir);
    else if (verb == "eliminate") run_eliminate(text, dir);
    else run_render(text, dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
