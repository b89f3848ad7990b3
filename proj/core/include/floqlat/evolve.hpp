#pragma once

// Unitary integration of i dpsi/dz = H(z) psi and the one-period
// stroboscopic (monodromy) operator.

#include <floqlat/lattice.hpp>

#include <complex>
#include <iosfwd>
#include <vector>

namespace floqlat {

using StateVector = Eigen::VectorXcd;

struct PropagationRecord {
  std::vector<double> z_samples;    // starts at 0, strictly increasing
  std::vector<StateVector> states;  // unit norm, states[0] = injected input
  LatticeConfig config;
};

struct MonodromyResult {
  Eigen::MatrixXcd matrix;  // U(period; gauge)
  double period = 0.0;
  double gauge = 0.0;
};

// exp(-i h_mid dz) via spectral decomposition of the real-symmetric h_mid.
// Throws std::invalid_argument for non-symmetric input or dz <= 0.
Eigen::MatrixXcd step_unitary(const Eigen::MatrixXd& h_mid, double dz);

// Midpoint-exponential scheme: each step applies step_unitary(H(z+dz/2), dz).
// Sampled every `stride` steps (first and last always kept). Preconditions
// dz <= period/200 when driven, dz <= 0.05/kappa0 always, z_max > 0; violations
// throw std::invalid_argument.
PropagationRecord propagate(const LatticeConfig& cfg, const StateVector& input,
                            double z_max, double dz, int stride = 1);

// Ordered product of midpoint steps over [z0, z1) at the config's gauge.
Eigen::MatrixXcd interval_unitary(const LatticeConfig& cfg, double z0, double z1,
                                  int steps);

// One-period evolution operator; step count >= 1000. Static configs (dkappa1=0)
// use the explicit period field, which must be positive.
MonodromyResult monodromy(const LatticeConfig& cfg, int steps = 1000);

// States at z = 0, period, ..., n_periods*period by repeated application of
// the monodromy matrix.
PropagationRecord stroboscopic_series(const LatticeConfig& cfg, const StateVector& input,
                                      int n_periods, int steps = 1000);

// CSV export: header `z,site,re,im,intensity`, one row per (sample, site),
// z-major then site-minor, sites 1-based.
void write_csv(const PropagationRecord& rec, std::ostream& os);

}  // namespace floqlat
