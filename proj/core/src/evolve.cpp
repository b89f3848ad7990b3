#include <floqlat/evolve.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace floqlat {

namespace {

// Eigen-decomposition of the tridiagonal coupling matrix at one midpoint.
// Returns false when the matrix has entries off the tridiagonal band.
struct TridiagonalEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

TridiagonalEig eig_tridiagonal(const Eigen::VectorXd& diag,
                               const Eigen::VectorXd& subdiag) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("tridiagonal eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

// Left-multiplies the accumulator by exp(-i H dz) where H = V diag(w) V^T,
// using real matrix products: U <- V * (phase .* (V^T * U)).
void apply_step(const TridiagonalEig& eig, double dz, Eigen::MatrixXd& u_re,
                Eigen::MatrixXd& u_im) {
  const int n = static_cast<int>(eig.values.size());
  Eigen::ArrayXd c(n), s(n);
  for (int k = 0; k < n; ++k) {
    c[k] = std::cos(eig.values[k] * dz);
    s[k] = std::sin(eig.values[k] * dz);
  }
  Eigen::MatrixXd a = eig.vectors.transpose() * u_re;
  Eigen::MatrixXd b = eig.vectors.transpose() * u_im;
  // (c - i s) * (a + i b) = (c a + s b) + i (c b - s a), row-wise phases
  Eigen::MatrixXd re = (a.array().colwise() * c + b.array().colwise() * s).matrix();
  Eigen::MatrixXd im = (b.array().colwise() * c - a.array().colwise() * s).matrix();
  u_re.noalias() = eig.vectors * re;
  u_im.noalias() = eig.vectors * im;
}

void apply_step_vector(const TridiagonalEig& eig, double dz, Eigen::VectorXcd& psi) {
  Eigen::VectorXcd y = eig.vectors.transpose() * psi;
  const std::complex<double> mi(0.0, -1.0);
  for (int k = 0; k < y.size(); ++k)
    y[k] *= std::exp(mi * eig.values[k] * dz);
  psi.noalias() = eig.vectors * y;
}

TridiagonalEig midpoint_eig(const LatticeConfig& cfg, double z, double dz) {
  const Eigen::VectorXd bonds = bond_couplings(cfg, z + dz / 2.0);
  const Eigen::VectorXd diag = Eigen::VectorXd::Zero(cfg.n_sites);
  return eig_tridiagonal(diag, bonds);
}

void check_step_size(const LatticeConfig& cfg, double dz) {
  if (!(dz > 0.0) || !std::isfinite(dz))
    throw std::invalid_argument("dz must be positive and finite");
  if (cfg.dkappa1 != 0.0 && dz > cfg.period / 200.0 * (1.0 + 1e-12))
    throw std::invalid_argument("dz must be <= period/200 for a driven lattice");
  if (dz > 0.05 / cfg.kappa0 * (1.0 + 1e-12))
    throw std::invalid_argument("dz must be <= 0.05/kappa0");
}

Eigen::MatrixXcd assemble(const Eigen::MatrixXd& re, const Eigen::MatrixXd& im) {
  return re.cast<std::complex<double>>() +
         std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
}

}  // namespace

Eigen::MatrixXcd step_unitary(const Eigen::MatrixXd& h_mid, double dz) {
  if (!(dz > 0.0) || !std::isfinite(dz))
    throw std::invalid_argument("dz must be positive and finite");
  if (h_mid.rows() != h_mid.cols() ||
      (h_mid - h_mid.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("step_unitary requires a real-symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_mid);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigensolver failed to converge");
  const Eigen::VectorXd& w = solver.eigenvalues();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::VectorXcd phases(w.size());
  const std::complex<double> mi(0.0, -1.0);
  for (int k = 0; k < w.size(); ++k) phases[k] = std::exp(mi * w[k] * dz);
  return v.cast<std::complex<double>>() * phases.asDiagonal() *
         v.transpose().cast<std::complex<double>>();
}

PropagationRecord propagate(const LatticeConfig& cfg, const StateVector& input,
                            double z_max, double dz, int stride) {
  validate(cfg);
  if (input.size() != cfg.n_sites)
    throw std::invalid_argument("input dimension does not match n_sites");
  if (std::abs(input.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("input state must have unit norm");
  if (!(z_max > 0.0) || !std::isfinite(z_max))
    throw std::invalid_argument("z_max must be positive and finite");
  check_step_size(cfg, dz);
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");

  const int steps = static_cast<int>(std::ceil(z_max / dz - 1e-12));
  const double h = z_max / steps;

  PropagationRecord rec;
  rec.config = cfg;
  rec.z_samples.reserve(steps / stride + 2);
  rec.states.reserve(steps / stride + 2);
  rec.z_samples.push_back(0.0);
  rec.states.push_back(input);

  Eigen::VectorXcd psi = input;
  for (int m = 0; m < steps; ++m) {
    apply_step_vector(midpoint_eig(cfg, m * h, h), h, psi);
    if ((m + 1) % stride == 0 || m + 1 == steps) {
      rec.z_samples.push_back((m + 1) * h);
      rec.states.push_back(psi);
    }
  }
  if (std::abs(rec.states.back().norm() - 1.0) > 1e-9)
    throw std::runtime_error("propagation lost unitarity");
  return rec;
}

Eigen::MatrixXcd interval_unitary(const LatticeConfig& cfg, double z0, double z1,
                                  int steps) {
  validate(cfg);
  if (!(z1 > z0)) throw std::invalid_argument("interval must have z1 > z0");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  const double h = (z1 - z0) / steps;
  const int n = cfg.n_sites;
  Eigen::MatrixXd u_re = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd u_im = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < steps; ++m)
    apply_step(midpoint_eig(cfg, z0 + m * h, h), h, u_re, u_im);
  return assemble(u_re, u_im);
}

MonodromyResult monodromy(const LatticeConfig& cfg, int steps) {
  validate(cfg);
  if (!(cfg.period > 0.0))
    throw std::invalid_argument("monodromy requires a positive period");
  if (steps < 1000) steps = 1000;
  MonodromyResult result;
  result.matrix = interval_unitary(cfg, 0.0, cfg.period, steps);
  result.period = cfg.period;
  result.gauge = cfg.gauge;
  return result;
}

PropagationRecord stroboscopic_series(const LatticeConfig& cfg,
                                      const StateVector& input, int n_periods,
                                      int steps) {
  if (n_periods < 1) throw std::invalid_argument("n_periods must be >= 1");
  if (input.size() != cfg.n_sites)
    throw std::invalid_argument("input dimension does not match n_sites");
  if (std::abs(input.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("input state must have unit norm");
  const MonodromyResult mono = monodromy(cfg, steps);

  PropagationRecord rec;
  rec.config = cfg;
  rec.z_samples.reserve(n_periods + 1);
  rec.states.reserve(n_periods + 1);
  Eigen::VectorXcd psi = input;
  rec.z_samples.push_back(0.0);
  rec.states.push_back(psi);
  for (int m = 1; m <= n_periods; ++m) {
    psi = mono.matrix * psi;
    rec.z_samples.push_back(m * mono.period);
    rec.states.push_back(psi);
  }
  return rec;
}

void write_csv(const PropagationRecord& rec, std::ostream& os) {
  os << "z,site,re,im,intensity\n";
  char line[160];
  for (std::size_t i = 0; i < rec.z_samples.size(); ++i) {
    const StateVector& psi = rec.states[i];
    for (int s = 0; s < psi.size(); ++s) {
      std::snprintf(line, sizeof line, "%.12g,%d,%.12g,%.12g,%.12g\n",
                    rec.z_samples[i], s + 1, psi[s].real(), psi[s].imag(),
                    std::norm(psi[s]));
      os << line;
    }
  }
}

}  // namespace floqlat
