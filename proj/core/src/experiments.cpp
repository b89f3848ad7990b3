#include <floqlat/experiments.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace floqlat {

namespace {

constexpr double kPi = std::numbers::pi;

double propagation_step(const LatticeConfig& cfg) {
  double dz = 0.05 / cfg.kappa0;
  if (cfg.dkappa1 != 0.0) dz = std::min(dz, cfg.period / 1000.0);
  return dz;
}

std::vector<int> inner_sites(int n, int input_site) {
  const int mirror = n + 1 - input_site;
  std::vector<int> inner;
  for (int s = 1; s <= n; ++s)
    if (s != input_site && s != mirror) inner.push_back(s);
  return inner;
}

StateVector unit_input(int n, int site) {
  StateVector psi = StateVector::Zero(n);
  psi[site - 1] = 1.0;
  return psi;
}

void validate_experiment(const ExperimentConfig& cfg) {
  validate(cfg.lattice);
  if (cfg.input_site < 1 || cfg.input_site > cfg.lattice.n_sites)
    throw std::invalid_argument("input_site out of range");
  if (cfg.n_periods < 1) throw std::invalid_argument("n_periods must be >= 1");
  if (!(cfg.total_length >= 0.0))
    throw std::invalid_argument("total_length must be nonnegative");
  if (cfg.sample_stride < 1)
    throw std::invalid_argument("sample_stride must be >= 1");
  if (cfg.lattice.dkappa1 != 0.0 &&
      std::abs(cfg.total_length - cfg.n_periods * cfg.lattice.period) > 1e-9)
    throw std::invalid_argument(
        "driven runs require total_length = n_periods * period");
}

}  // namespace

ExperimentConfig experiment_from_json(const std::string& text,
                                      const std::vector<std::string>& allowed_extras) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("experiment config must be a JSON object");

  const std::vector<std::string> known = {"lattice", "input_site", "n_periods",
                                          "total_length", "sample_stride"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) != known.end()) continue;
    if (std::find(allowed_extras.begin(), allowed_extras.end(), item.key()) !=
        allowed_extras.end())
      continue;
    throw std::invalid_argument("unknown experiment config key: " + item.key());
  }
  if (!j.contains("lattice"))
    throw std::invalid_argument("missing experiment config key: lattice");

  ExperimentConfig cfg;
  cfg.lattice = lattice_from_json(j["lattice"].dump());
  try {
    cfg.input_site = j.value("input_site", 1);
    cfg.n_periods = j.value("n_periods", 1);
    cfg.total_length = j.value("total_length", 0.0);
    cfg.sample_stride = j.value("sample_stride", 1);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config type error: ") + e.what());
  }
  if (cfg.total_length == 0.0 && cfg.lattice.period > 0.0)
    cfg.total_length = cfg.n_periods * cfg.lattice.period;
  validate_experiment(cfg);
  return cfg;
}

FidelityReport fidelity_report(const PropagationRecord& record, int input_site,
                               const FidelityThresholds& thresholds) {
  if (record.states.empty())
    throw std::invalid_argument("fidelity_report requires a nonempty record");
  const int n = static_cast<int>(record.states.front().size());
  if (input_site < 1 || input_site > n)
    throw std::invalid_argument("input_site out of range");
  const std::vector<int> inner = inner_sites(n, input_site);
  const int far = n + 1 - input_site;

  FidelityReport rep;
  for (std::size_t i = 0; i < record.states.size(); ++i) {
    const StateVector& psi = record.states[i];
    double leak = 0.0;
    for (int s : inner) leak += std::norm(psi[s - 1]);
    rep.max_inner_leakage = std::max(rep.max_inner_leakage, leak);
    const double far_intensity = std::norm(psi[far - 1]);
    if (far_intensity > rep.outer_transfer_peak) {
      rep.outer_transfer_peak = far_intensity;
      rep.transfer_peak_z = record.z_samples[i];
    }
  }
  rep.eliminated = rep.max_inner_leakage < thresholds.max_leak &&
                   rep.outer_transfer_peak > thresholds.min_peak;
  return rep;
}

std::pair<PropagationRecord, FidelityReport> run_propagation_experiment(
    const ExperimentConfig& cfg, const FidelityThresholds& thresholds) {
  validate_experiment(cfg);
  const StateVector input = unit_input(cfg.lattice.n_sites, cfg.input_site);
  PropagationRecord record = propagate(cfg.lattice, input, cfg.total_length,
                                       propagation_step(cfg.lattice),
                                       cfg.sample_stride);
  FidelityReport report;
  if (cfg.lattice.dkappa1 != 0.0) {
    // Elimination in the driven regimes is a property of the stroboscopic
    // sections; mid-period samples always visit the inner sites.
    report = fidelity_report(stroboscopic_series(cfg.lattice, input, cfg.n_periods),
                             cfg.input_site, thresholds);
  } else {
    report = fidelity_report(record, cfg.input_site, thresholds);
  }
  return {std::move(record), report};
}

GaugeGrid run_gauge_experiment(const ExperimentConfig& cfg,
                               const FidelityThresholds& thresholds) {
  validate_experiment(cfg);
  GaugeGrid grid;
  const double gauges[2] = {0.0, kPi};
  // Cell order: (0,1), (pi,1), (0,2), (pi,2).
  int idx = 0;
  for (int input : {1, 2}) {
    for (double gauge : gauges) {
      LatticeConfig lattice = cfg.lattice;
      lattice.gauge = gauge;
      const StateVector input_state = unit_input(lattice.n_sites, input);
      PropagationRecord rec;
      if (lattice.dkappa1 != 0.0) {
        rec = stroboscopic_series(lattice, input_state, cfg.n_periods);
      } else {
        rec = propagate(lattice, input_state, cfg.total_length,
                        propagation_step(lattice), cfg.sample_stride);
      }
      grid.cells[idx] = fidelity_report(rec, input, thresholds);
      grid.records[idx] = std::move(rec);
      ++idx;
    }
  }
  return grid;
}

SweepSummary run_sweep_experiment(const LatticeConfig& config_template,
                                  const std::vector<double>& grid,
                                  const ClassifyThresholds& thresholds,
                                  int steps_per_period) {
  SweepSummary summary;
  summary.sweep = band_sweep(config_template, grid, thresholds, steps_per_period);
  for (const FloquetSpectrum& sp : summary.sweep.points) {
    int n_pi = 0;
    for (const FloquetMode& m : sp.modes)
      if (m.label == ModeLabel::PI) ++n_pi;
    if (n_pi >= 2) {
      if (!summary.window_found) summary.window_lo = sp.omega_over_delta;
      summary.window_hi = sp.omega_over_delta;
      summary.window_found = true;
    }
  }
  return summary;
}

std::vector<FiniteSizePoint> run_finite_size_experiment(
    const ExperimentConfig& cfg, const std::vector<int>& sizes,
    const FidelityThresholds& thresholds) {
  validate_experiment(cfg);
  if (sizes.empty()) throw std::invalid_argument("sizes must be nonempty");
  for (int n : sizes)
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("sizes must be even and >= 4");

  std::vector<FiniteSizePoint> table;
  table.reserve(sizes.size());
  for (int n : sizes) {
    ExperimentConfig point = cfg;
    point.lattice.n_sites = n;
    point.input_site = std::min(cfg.input_site, n);

    FiniteSizePoint row;
    row.n_sites = n;
    if (point.lattice.dkappa1 != 0.0) {
      // Quasi-energies are section-independent, but edge weights are not: the
      // pi pair is edge-localized at the theta_0 = 0 section (weak first bond),
      // so that section is used to identify it.
      LatticeConfig section = point.lattice;
      section.gauge = 0.0;
      const ClassifyThresholds ct = default_thresholds(n);
      FloquetSpectrum sp = classify_modes(quasienergies(monodromy(section)),
                                          ct.tol_0, ct.tol_pi, ct.w_min);
      row.splitting = pi_splitting(sp);
      row.zero_mode_based = false;
    } else {
      // Static fallback: hybridization splitting of the two zero modes.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
          build_hamiltonian(point.lattice, 0.0));
      const Eigen::VectorXd& w = solver.eigenvalues();
      int a = 0;
      for (int k = 1; k < n; ++k)
        if (std::abs(w[k]) < std::abs(w[a])) a = k;
      int b = a == 0 ? 1 : 0;
      for (int k = 0; k < n; ++k)
        if (k != a && std::abs(w[k]) < std::abs(w[b])) b = k;
      row.splitting = std::abs(w[a] - w[b]);
      row.zero_mode_based = true;
    }
    row.fidelity = run_propagation_experiment(point, thresholds).second;
    table.push_back(row);
  }
  return table;
}

void render_intensity_map(const PropagationRecord& record, const std::string& path) {
  if (record.states.empty())
    throw std::invalid_argument("render requires a nonempty record");
  const int width = static_cast<int>(record.states.size());
  const int height = static_cast<int>(record.states.front().size());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output image: " + path);
  out << "P5\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> row(width);
  for (int s = 0; s < height; ++s) {
    for (int i = 0; i < width; ++i) {
      const double intensity = std::norm(record.states[i][s]);
      const int v = static_cast<int>(std::lround(255.0 * std::clamp(intensity, 0.0, 1.0)));
      row[i] = static_cast<unsigned char>(v);
    }
    out.write(reinterpret_cast<const char*>(row.data()), width);
  }
  if (!out) throw std::runtime_error("failed writing image: " + path);
}

void write_csv(const std::vector<FiniteSizePoint>& table, std::ostream& os) {
  os << "n_sites,splitting,mode_type,max_inner_leakage,outer_transfer_peak,eliminated\n";
  char line[200];
  for (const FiniteSizePoint& row : table) {
    std::snprintf(line, sizeof line, "%d,%.12g,%s,%.12g,%.12g,%d\n", row.n_sites,
                  row.splitting, row.zero_mode_based ? "zero" : "pi",
                  row.fidelity.max_inner_leakage, row.fidelity.outer_transfer_peak,
                  row.fidelity.eliminated ? 1 : 0);
    os << line;
  }
}

std::string to_json(const FidelityReport& report) {
  nlohmann::json j;
  j["max_inner_leakage"] = report.max_inner_leakage;
  j["outer_transfer_peak"] = report.outer_transfer_peak;
  j["transfer_peak_z"] = report.transfer_peak_z;
  j["eliminated"] = report.eliminated;
  return j.dump(2);
}

}  // namespace floqlat
