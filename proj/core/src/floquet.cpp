#include <floqlat/floquet.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace floqlat {

namespace {

constexpr double kPi = std::numbers::pi;

// Wraps a phase to (-pi, pi].
double wrap_phase(double phi) {
  phi = std::fmod(phi + kPi, 2.0 * kPi);
  if (phi <= 0.0) phi += 2.0 * kPi;
  return phi - kPi;
}

double circular_distance(double a, double b) {
  return std::abs(wrap_phase(a - b));
}

double edge_weight_of(const StateVector& v) {
  return std::norm(v[0]) + std::norm(v[v.size() - 1]);
}

// Rotates each cluster of near-degenerate eigenphases to the basis that
// extremizes edge weight (eigenbasis of the projected edge-weight form), so
// labeling does not depend on the arbitrary basis the eigensolver returned.
void rotate_degenerate_clusters(std::vector<FloquetMode>& modes, double period) {
  const std::size_t n = modes.size();
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n &&
           circular_distance(modes[stop].quasienergy * period,
                             modes[stop - 1].quasienergy * period) < 1e-10)
      ++stop;
    const std::size_t k = stop - start;
    if (k > 1) {
      const int dim = static_cast<int>(modes[start].vector.size());
      Eigen::MatrixXcd basis(dim, k);
      for (std::size_t j = 0; j < k; ++j) basis.col(j) = modes[start + j].vector;
      Eigen::MatrixXcd edge_rows(2, k);
      edge_rows.row(0) = basis.row(0);
      edge_rows.row(1) = basis.row(dim - 1);
      Eigen::MatrixXcd w_form = edge_rows.adjoint() * edge_rows;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(w_form);
      Eigen::MatrixXcd rotated = basis * solver.eigenvectors();
      for (std::size_t j = 0; j < k; ++j) {
        modes[start + j].vector = rotated.col(j).normalized();
        modes[start + j].edge_weight = edge_weight_of(modes[start + j].vector);
      }
    }
    start = stop;
  }
}

int count_pi_modes(const FloquetSpectrum& sp) {
  int n = 0;
  for (const FloquetMode& m : sp.modes)
    if (m.label == ModeLabel::PI) ++n;
  return n;
}

}  // namespace

std::string to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::ZERO: return "ZERO";
    case ModeLabel::PI: return "PI";
    default: return "BULK";
  }
}

ClassifyThresholds default_thresholds(int n_sites) {
  ClassifyThresholds t;
  if (n_sites < 20) {
    t.tol_pi = 0.2;
    t.w_min = 0.6;
  }
  return t;
}

FloquetSpectrum quasienergies(const MonodromyResult& u) {
  const int n = static_cast<int>(u.matrix.rows());
  if (n == 0 || u.matrix.cols() != n)
    throw std::invalid_argument("monodromy matrix must be square");
  if (!(u.period > 0.0))
    throw std::invalid_argument("monodromy period must be positive");
  const double unitarity =
      (u.matrix.adjoint() * u.matrix - Eigen::MatrixXcd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  if (unitarity > 1e-6)
    throw std::runtime_error("monodromy matrix is not unitary");

  // Schur vectors of a normal matrix are orthonormal eigenvectors.
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.matrix, true);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("Schur decomposition failed to converge");

  FloquetSpectrum sp;
  sp.period = u.period;
  sp.omega = 2.0 * kPi / u.period;
  sp.modes.resize(n);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> lambda = schur.matrixT()(j, j);
    double phase = -std::arg(lambda);  // eps * period, arg in (-pi, pi]
    if (phase <= -kPi) phase = kPi;
    FloquetMode& mode = sp.modes[j];
    mode.quasienergy = phase / u.period;
    mode.vector = schur.matrixU().col(j).normalized();
    mode.edge_weight = edge_weight_of(mode.vector);
  }
  std::sort(sp.modes.begin(), sp.modes.end(),
            [](const FloquetMode& a, const FloquetMode& b) {
              return a.quasienergy < b.quasienergy;
            });
  rotate_degenerate_clusters(sp.modes, sp.period);
  return sp;
}

FloquetSpectrum classify_modes(FloquetSpectrum spectrum, double tol_0,
                               double tol_pi, double w_min) {
  if (!(tol_0 > 0.0 && tol_0 < 0.5) || !(tol_pi > 0.0 && tol_pi < 0.5))
    throw std::invalid_argument("tolerances must lie in (0, 0.5)");
  if (!(w_min > 0.0 && w_min < 1.0))
    throw std::invalid_argument("w_min must lie in (0, 1)");
  for (FloquetMode& m : spectrum.modes) {
    const double phase_over_pi = std::abs(m.quasienergy) * spectrum.period / kPi;
    m.label = ModeLabel::BULK;
    if (std::abs(1.0 - phase_over_pi) <= tol_pi && m.edge_weight >= w_min)
      m.label = ModeLabel::PI;
    else if (phase_over_pi <= tol_0 && m.edge_weight >= w_min)
      m.label = ModeLabel::ZERO;
  }
  return spectrum;
}

SpectrumSweep band_sweep(const LatticeConfig& config_template,
                         const std::vector<double>& omega_over_delta_grid,
                         const ClassifyThresholds& thresholds,
                         int steps_per_period) {
  validate(config_template);
  if (omega_over_delta_grid.empty())
    throw std::invalid_argument("sweep grid must be nonempty");
  for (std::size_t i = 0; i < omega_over_delta_grid.size(); ++i) {
    if (!(omega_over_delta_grid[i] > 0.0))
      throw std::invalid_argument("sweep grid values must be positive");
    if (i > 0 && omega_over_delta_grid[i] <= omega_over_delta_grid[i - 1])
      throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  const double delta = bandwidth(config_template);

  SpectrumSweep sweep;
  sweep.config_template = config_template;
  sweep.grid = omega_over_delta_grid;
  sweep.points.reserve(omega_over_delta_grid.size());
  for (double x : omega_over_delta_grid) {
    LatticeConfig cfg = config_template;
    cfg.period = 2.0 * kPi / (x * delta);
    FloquetSpectrum sp = quasienergies(monodromy(cfg, steps_per_period));
    sp.omega_over_delta = x;
    sweep.points.push_back(classify_modes(std::move(sp), thresholds.tol_0,
                                          thresholds.tol_pi, thresholds.w_min));
  }
  return sweep;
}

SpectrumSweep band_sweep(const LatticeConfig& config_template,
                         const std::vector<double>& omega_over_delta_grid) {
  return band_sweep(config_template, omega_over_delta_grid,
                    default_thresholds(config_template.n_sites), 1000);
}

double pi_gap(const FloquetSpectrum& spectrum) {
  double best = -1.0;
  int n_bulk = 0;
  for (const FloquetMode& m : spectrum.modes) {
    if (m.label != ModeLabel::BULK) continue;
    ++n_bulk;
    const double d = circular_distance(m.quasienergy * spectrum.period, kPi);
    if (best < 0.0 || d < best) best = d;
  }
  if (n_bulk < 2)
    throw std::runtime_error("pi_gap requires at least 2 BULK modes");
  return best / spectrum.period;
}

double pi_splitting(const FloquetSpectrum& spectrum) {
  std::vector<const FloquetMode*> pi_modes;
  for (const FloquetMode& m : spectrum.modes)
    if (m.label == ModeLabel::PI) pi_modes.push_back(&m);
  if (pi_modes.size() < 2)
    throw std::runtime_error("pi_splitting requires at least 2 PI modes");
  std::sort(pi_modes.begin(), pi_modes.end(),
            [&](const FloquetMode* a, const FloquetMode* b) {
              return circular_distance(a->quasienergy * spectrum.period, kPi) <
                     circular_distance(b->quasienergy * spectrum.period, kPi);
            });
  const double a = pi_modes[0]->quasienergy * spectrum.period;
  const double b = pi_modes[1]->quasienergy * spectrum.period;
  return circular_distance(a, b) / spectrum.period;
}

void write_csv(const SpectrumSweep& sweep, std::ostream& os) {
  os << "omega_over_delta,mode_index,quasienergy_times_period_over_pi,label,edge_weight\n";
  char line[160];
  for (const FloquetSpectrum& sp : sweep.points) {
    for (std::size_t j = 0; j < sp.modes.size(); ++j) {
      const FloquetMode& m = sp.modes[j];
      std::snprintf(line, sizeof line, "%.12g,%zu,%.12g,%s,%.12g\n",
                    sp.omega_over_delta, j, m.quasienergy * sp.period / kPi,
                    to_string(m.label).c_str(), m.edge_weight);
      os << line;
    }
  }
}

}  // namespace floqlat
