#pragma once

// Driven bipartite waveguide lattice: parameterization and instantaneous
// coupling matrix. Couplings in mm^-1, lengths in mm, angles in rad.

#include <Eigen/Dense>
#include <string>

namespace floqlat {

struct LatticeConfig {
  int n_sites = 2;       // N, number of waveguides
  double kappa0 = 0.0;   // averaged nearest-neighbor coupling
  double dkappa0 = 0.0;  // static staggered offset
  double dkappa1 = 0.0;  // drive amplitude; 0 means static lattice
  double period = 0.0;   // bending period Lambda, required > 0 when driven
  double gauge = 0.0;    // theta_0, initial drive phase
  double beta0 = 0.0;    // common propagation constant, stripped before dynamics
};

// Throws std::invalid_argument when a config invariant is violated:
// n_sites >= 2, kappa0 > 0, kappa0 - |dkappa0| - |dkappa1| >= 0 (bonds stay
// nonnegative at every z), period > 0 whenever dkappa1 != 0.
void validate(const LatticeConfig& cfg);

// Strict JSON (de)serialization. All seven keys are required; unknown keys
// are rejected. Throws std::invalid_argument on any schema violation.
LatticeConfig lattice_from_json(const std::string& text);
std::string lattice_to_json(const LatticeConfig& cfg);

// Staggering amplitude dk(z) = dkappa0 + dkappa1*cos(2 pi z / period + gauge).
double drive_coupling(const LatticeConfig& cfg, double z);

// N-1 bond couplings at coordinate z: bond j (0-based) carries
// kappa0 - dk(z) for even j and kappa0 + dk(z) for odd j.
Eigen::VectorXd bond_couplings(const LatticeConfig& cfg, double z);

// Instantaneous coupling matrix: real symmetric tridiagonal, zero diagonal
// (beta0 removed by the constant-phase gauge transformation).
Eigen::MatrixXd build_hamiltonian(const LatticeConfig& cfg, double z);

// Drive-averaged matrix: build_hamiltonian with dkappa1 forced to 0.
Eigen::MatrixXd static_reference(const LatticeConfig& cfg);

// Static bandwidth Delta = 2*((kappa0-dkappa0) + (kappa0+dkappa0)) = 4*kappa0,
// the full two-band spectral width of the infinite averaged chain.
double bandwidth(const LatticeConfig& cfg);

// Max-abs deviation of H(z + period/2; gauge) from H(z; gauge + pi). Exact
// zero for a pure cosine drive; throws std::invalid_argument when
// dkappa0 != 0 because the identity then fails.
double gauge_shift_identity_check(const LatticeConfig& cfg, double z);

}  // namespace floqlat
