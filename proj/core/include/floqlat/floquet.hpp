#pragma once

// Quasi-energy spectra of the monodromy operator, zero/pi/bulk mode
// classification by eigenphase and edge localization, drive-frequency sweeps.

#include <floqlat/evolve.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace floqlat {

enum class ModeLabel { BULK, ZERO, PI };

std::string to_string(ModeLabel label);

struct FloquetMode {
  double quasienergy = 0.0;  // rad/mm, folded to (-pi/Lambda, pi/Lambda]
  StateVector vector;        // Floquet eigenvector at the gauge section
  ModeLabel label = ModeLabel::BULK;
  double edge_weight = 0.0;  // |v_1|^2 + |v_N|^2
};

struct FloquetSpectrum {
  std::vector<FloquetMode> modes;  // sorted ascending by quasienergy
  double omega = 0.0;              // 2 pi / period
  double omega_over_delta = 0.0;
  double period = 0.0;
};

struct ClassifyThresholds {
  double tol_0 = 0.05;   // |eps|*period <= tol_0 * pi
  double tol_pi = 0.05;  // |1 - |eps|*period/pi| <= tol_pi
  double w_min = 0.15;   // minimum edge weight
};

// Calibrated defaults: the large-N edge-state branch thins out near the upper
// window edge (w_min = 0.15), while the N=4 hybridized branch wanders up to
// ~19% off the zone edge (tol_pi = 0.2) but keeps outer weight >= 0.6.
ClassifyThresholds default_thresholds(int n_sites);

// Eigendecompose U: eps_j = -arg(lambda_j)/period folded to (-pi/L, pi/L];
// orthonormal eigenvectors (Schur vectors, with degenerate clusters rotated to
// extremize edge weight); modes sorted by eps. Throws std::runtime_error when
// U deviates from unitarity by more than 1e-6.
FloquetSpectrum quasienergies(const MonodromyResult& u);

// Label each mode: PI when |1 - |eps|L/pi| <= tol_pi and edge_weight >= w_min,
// ZERO when |eps|L <= tol_0*pi and edge_weight >= w_min, else BULK.
FloquetSpectrum classify_modes(FloquetSpectrum spectrum, double tol_0,
                               double tol_pi, double w_min);

struct SpectrumSweep {
  std::vector<FloquetSpectrum> points;
  LatticeConfig config_template;  // period is overwritten per grid point
  std::vector<double> grid;       // omega/Delta values, strictly increasing
};

// For each omega/Delta set period = 2 pi/(omega/Delta * bandwidth), compute
// monodromy + quasienergies + classify with the given thresholds.
SpectrumSweep band_sweep(const LatticeConfig& config_template,
                         const std::vector<double>& omega_over_delta_grid,
                         const ClassifyThresholds& thresholds,
                         int steps_per_period = 1000);
SpectrumSweep band_sweep(const LatticeConfig& config_template,
                         const std::vector<double>& omega_over_delta_grid);

// Circular distance from the zone edge pi/L to the nearest BULK eigenphase;
// 0 when the bulk reaches the zone edge. Throws std::runtime_error when the
// spectrum has fewer than 2 BULK modes.
double pi_gap(const FloquetSpectrum& spectrum);

// Circular distance between the two PI eigenphases closest to +-pi/L (the
// finite-size hybridization splitting). Throws std::runtime_error when fewer
// than 2 PI modes are present.
double pi_splitting(const FloquetSpectrum& spectrum);

// CSV export: header
// `omega_over_delta,mode_index,quasienergy_times_period_over_pi,label,edge_weight`.
void write_csv(const SpectrumSweep& sweep, std::ostream& os);

}  // namespace floqlat
