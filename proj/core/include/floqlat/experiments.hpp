#pragma once

// Experiment orchestration: propagation fidelity metrics, the Floquet-gauge
// grid, spectrum sweeps with window detection, finite-size scans, and
// CSV/JSON/PGM emission.

#include <floqlat/eliminate.hpp>
#include <floqlat/floquet.hpp>

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace floqlat {

struct ExperimentConfig {
  LatticeConfig lattice;
  int input_site = 1;
  int n_periods = 1;          // bending periods along the array
  double total_length = 0.0;  // mm; = n_periods * period for driven runs
  int sample_stride = 1;
};

// Throws std::invalid_argument on schema or invariant violations. Strict keys:
// {"lattice","input_site","n_periods","total_length","sample_stride"} plus
// any caller-supplied extras listed in `allowed_extras`.
ExperimentConfig experiment_from_json(const std::string& text,
                                      const std::vector<std::string>& allowed_extras = {});

struct FidelityThresholds {
  double max_leak = 0.25;
  double min_peak = 0.6;
};

struct FidelityReport {
  double max_inner_leakage = 0.0;  // worst-case summed inner-site intensity
  double outer_transfer_peak = 0.0;  // max intensity on the far channel site
  bool eliminated = false;
  double transfer_peak_z = 0.0;  // sample position of the transfer peak
};

// Channel fidelity for light injected at `input_site`: the channel is
// {input_site, N+1-input_site}, inner sites are the complement, and the far
// site is the mirror partner. For input 1 this reduces to inner = all sites
// except {1, N}. eliminated = leakage < max_leak AND peak > min_peak.
FidelityReport fidelity_report(const PropagationRecord& record, int input_site,
                               const FidelityThresholds& thresholds = {});

// Unit input at input_site propagated over total_length. The record samples
// every integrator step (times sample_stride); the fidelity is evaluated at
// stroboscopic samples for driven configs and at every sample for static ones.
std::pair<PropagationRecord, FidelityReport> run_propagation_experiment(
    const ExperimentConfig& cfg, const FidelityThresholds& thresholds = {});

struct GaugeGrid {
  // Cell order: (gauge 0, input 1), (pi, 1), (0, 2), (pi, 2).
  std::array<FidelityReport, 4> cells;
  std::array<PropagationRecord, 4> records;  // stroboscopic traces
};

GaugeGrid run_gauge_experiment(const ExperimentConfig& cfg,
                               const FidelityThresholds& thresholds = {});

struct SweepSummary {
  SpectrumSweep sweep;
  double window_lo = 0.0;  // lowest omega/Delta with >= 2 PI modes
  double window_hi = 0.0;  // highest omega/Delta with >= 2 PI modes
  bool window_found = false;
};

SweepSummary run_sweep_experiment(const LatticeConfig& config_template,
                                  const std::vector<double>& grid,
                                  const ClassifyThresholds& thresholds,
                                  int steps_per_period = 1000);

struct FiniteSizePoint {
  int n_sites = 0;
  double splitting = 0.0;  // pi-mode splitting, or zero-mode splitting when static
  bool zero_mode_based = false;
  FidelityReport fidelity;
};

// Per-size quasi-energy splitting plus propagation fidelity at a fixed period
// count. Driven templates report the pi-pair splitting; static templates fall
// back to the zero-mode splitting.
std::vector<FiniteSizePoint> run_finite_size_experiment(
    const ExperimentConfig& cfg, const std::vector<int>& sizes,
    const FidelityThresholds& thresholds = {});

// Binary PGM (P5): one column per sample, one row per site (site 1 on top),
// pixel = round(255 * intensity). Deterministic bytes for a fixed record.
void render_intensity_map(const PropagationRecord& record, const std::string& path);

void write_csv(const std::vector<FiniteSizePoint>& table, std::ostream& os);

std::string to_json(const FidelityReport& report);

}  // namespace floqlat
