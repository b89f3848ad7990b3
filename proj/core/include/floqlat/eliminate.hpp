#pragma once

// Projector-based effective-Hamiltonian reduction (Schur complement on a kept
// subspace), elimination-condition diagnostics, and the exponential decay fit
// of the outer-pair coupling with chain length.

#include <floqlat/lattice.hpp>

#include <string>
#include <vector>

namespace floqlat {

struct SubspacePartition {
  std::vector<int> kept;        // 1-based site indices, defines projector P
  std::vector<int> eliminated;  // complement, defines Q = 1 - P
};

// Default partition: outer waveguides {1, N}.
SubspacePartition outer_partition(int n_sites);

// Validated partition from a kept set; throws std::invalid_argument when the
// kept set is empty, full, out of range, or contains duplicates.
SubspacePartition make_partition(int n_sites, const std::vector<int>& kept);

struct EffectiveHamiltonian {
  Eigen::MatrixXcd matrix;  // k x k Hermitian on the kept subspace
  SubspacePartition partition;
  double condition_ratio = 0.0;  // ||(QHQ)^-1 QHP||_2
};

struct DecayFit {
  std::vector<int> sizes;
  std::vector<double> norms;  // ||H_eff||_2 per size
  double n_critical = 0.0;    // decay constant of exp(-N/N_cr)
  double r_squared = 0.0;     // quality of the ln||H_eff|| vs N fit
};

// H_eff = PHP - PHQ (QHQ)^-1 QHP restricted to the kept indices, with
// condition_ratio = ||(QHQ)^-1 QHP||_2. Throws std::runtime_error when the
// eliminated block is singular (smallest singular value <= 1e-12 ||H||_2).
EffectiveHamiltonian project_effective(const Eigen::MatrixXcd& h,
                                       const SubspacePartition& partition);

// Closed form for the static 4-site chain with bonds (k1, k2, k1), kept {1,4}:
// [[0, -k1^2/k2], [-k1^2/k2, 0]]. Throws std::invalid_argument when k2 = 0.
EffectiveHamiltonian ssh4_effective(double kappa1, double kappa2);

// |(kappa0 - dkappa)/(kappa0 + dkappa)|; < 1 signals useful subspace
// separation. Throws std::invalid_argument when kappa0 = -dkappa.
double adiabatic_ratio(double kappa0, double dkappa);

// One-period average of the staggering amplitude: (1/L) int dk(z) dz = dkappa0.
double effective_stroboscopic_coupling(const LatticeConfig& cfg);

enum class Regime { AE, HFLE, QAE_CANDIDATE, NONE };

std::string to_string(Regime regime);

struct RegimeThresholds {
  double margin = 0.05;
  double hf_threshold = 4.0;
  double qae_lo_large_n = 1.0 / 3.0;
  double qae_hi_large_n = 1.0;
  double qae_lo_small_n = 0.5;  // applies below n_large cutoff (N=4 regime)
  double qae_hi_small_n = 1.4;
  int n_large = 20;
};

// AE: static drive with adiabatic_ratio < 1 - margin. HFLE: omega/Delta >=
// hf_threshold with ratio(kappa0, dkappa_eff) < 1 - margin. QAE_CANDIDATE:
// omega/Delta inside the size-dependent window and >= 2 PI modes at this
// drive point. NONE otherwise.
Regime classify_regime(const LatticeConfig& cfg,
                       const RegimeThresholds& thresholds = {});

// For each size build the static chain from the template couplings, project
// onto {1, N}, record ||H_eff||_2, and fit ln||H_eff|| against N. Requires a
// static template with adiabatic_ratio < 1 and at least two sizes; violations
// throw std::invalid_argument.
DecayFit decay_fit(const LatticeConfig& config_template,
                   const std::vector<int>& sizes);

// JSON export, matrices as nested arrays of [re, im] pairs, row-major.
std::string to_json(const EffectiveHamiltonian& eff);
std::string to_json(const DecayFit& fit);

}  // namespace floqlat
