#include <floqlat/eliminate.hpp>

#include <floqlat/floquet.hpp>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace floqlat {

namespace {

Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& h, const std::vector<int>& rows,
                           const std::vector<int>& cols) {
  Eigen::MatrixXcd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = h(rows[i] - 1, cols[j] - 1);
  return out;
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()[0];
}

}  // namespace

SubspacePartition outer_partition(int n_sites) {
  return make_partition(n_sites, {1, n_sites});
}

SubspacePartition make_partition(int n_sites, const std::vector<int>& kept) {
  if (n_sites < 2) throw std::invalid_argument("partition requires n_sites >= 2");
  if (kept.empty()) throw std::invalid_argument("kept set must be nonempty");
  std::vector<int> sorted = kept;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("kept set contains duplicates");
  if (sorted.front() < 1 || sorted.back() > n_sites)
    throw std::invalid_argument("kept indices out of range");
  if (static_cast<int>(sorted.size()) == n_sites)
    throw std::invalid_argument("eliminated set must be nonempty");
  SubspacePartition part;
  part.kept = sorted;
  for (int i = 1; i <= n_sites; ++i)
    if (!std::binary_search(sorted.begin(), sorted.end(), i))
      part.eliminated.push_back(i);
  return part;
}

EffectiveHamiltonian project_effective(const Eigen::MatrixXcd& h,
                                       const SubspacePartition& partition) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n) throw std::invalid_argument("matrix must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("matrix must be Hermitian");
  const int expected = static_cast<int>(partition.kept.size() + partition.eliminated.size());
  if (expected != n)
    throw std::invalid_argument("partition does not match matrix dimension");

  const Eigen::MatrixXcd php = submatrix(h, partition.kept, partition.kept);
  const Eigen::MatrixXcd phq = submatrix(h, partition.kept, partition.eliminated);
  const Eigen::MatrixXcd qhq = submatrix(h, partition.eliminated, partition.eliminated);
  const Eigen::MatrixXcd qhp = submatrix(h, partition.eliminated, partition.kept);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      qhq, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double h_norm = operator_norm(h);
  if (svd.singularValues().size() == 0 ||
      svd.singularValues().tail(1)[0] <= 1e-12 * h_norm)
    throw std::runtime_error(
        "eliminated block is singular: slaving the fast subspace is ill-defined");

  const Eigen::MatrixXcd slaving = svd.solve(qhp);  // (QHQ)^-1 QHP

  EffectiveHamiltonian eff;
  eff.matrix = php - phq * slaving;
  eff.partition = partition;
  eff.condition_ratio = operator_norm(slaving);
  // Symmetrize away the numerical skew so the Hermiticity invariant is exact.
  eff.matrix = 0.5 * (eff.matrix + eff.matrix.adjoint().eval());
  return eff;
}

EffectiveHamiltonian ssh4_effective(double kappa1, double kappa2) {
  if (kappa2 == 0.0)
    throw std::invalid_argument("ssh4_effective requires kappa2 != 0");
  const double coupling = -kappa1 * kappa1 / kappa2;
  EffectiveHamiltonian eff;
  eff.matrix = Eigen::MatrixXcd::Zero(2, 2);
  eff.matrix(0, 1) = coupling;
  eff.matrix(1, 0) = coupling;
  eff.partition = outer_partition(4);
  eff.condition_ratio = std::abs(kappa1 / kappa2);
  return eff;
}

double adiabatic_ratio(double kappa0, double dkappa) {
  const double denom = kappa0 + dkappa;
  if (denom == 0.0)
    throw std::invalid_argument("adiabatic_ratio undefined for kappa0 = -dkappa");
  return std::abs((kappa0 - dkappa) / denom);
}

double effective_stroboscopic_coupling(const LatticeConfig& cfg) {
  validate(cfg);
  return cfg.dkappa0;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::AE: return "AE";
    case Regime::HFLE: return "HFLE";
    case Regime::QAE_CANDIDATE: return "QAE_CANDIDATE";
    default: return "NONE";
  }
}

Regime classify_regime(const LatticeConfig& cfg, const RegimeThresholds& t) {
  validate(cfg);
  if (cfg.dkappa1 == 0.0) {
    if (adiabatic_ratio(cfg.kappa0, cfg.dkappa0) < 1.0 - t.margin)
      return Regime::AE;
    return Regime::NONE;
  }
  const double x = 2.0 * std::numbers::pi / cfg.period / bandwidth(cfg);
  const double dk_eff = effective_stroboscopic_coupling(cfg);
  if (x >= t.hf_threshold &&
      adiabatic_ratio(cfg.kappa0, dk_eff) < 1.0 - t.margin)
    return Regime::HFLE;
  const bool large = cfg.n_sites >= t.n_large;
  const double lo = large ? t.qae_lo_large_n : t.qae_lo_small_n;
  const double hi = large ? t.qae_hi_large_n : t.qae_hi_small_n;
  if (x >= lo && x <= hi) {
    // Detect the pi pair at the theta_0 = 0 section, where it is edge-localized.
    LatticeConfig section = cfg;
    section.gauge = 0.0;
    const ClassifyThresholds ct = default_thresholds(cfg.n_sites);
    const FloquetSpectrum sp = classify_modes(quasienergies(monodromy(section)),
                                              ct.tol_0, ct.tol_pi, ct.w_min);
    int n_pi = 0;
    for (const FloquetMode& m : sp.modes)
      if (m.label == ModeLabel::PI) ++n_pi;
    if (n_pi >= 2) return Regime::QAE_CANDIDATE;
  }
  return Regime::NONE;
}

DecayFit decay_fit(const LatticeConfig& config_template,
                   const std::vector<int>& sizes) {
  validate(config_template);
  if (config_template.dkappa1 != 0.0)
    throw std::invalid_argument("decay_fit requires a static template (dkappa1 = 0)");
  if (adiabatic_ratio(config_template.kappa0, config_template.dkappa0) >= 1.0)
    throw std::invalid_argument(
        "decay_fit requires adiabatic_ratio < 1 (decaying outer coupling)");
  if (sizes.size() < 2)
    throw std::invalid_argument("decay_fit requires at least two sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 4 || sizes[i] % 2 != 0)
      throw std::invalid_argument("sizes must be even and >= 4");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("sizes must be strictly increasing");
  }

  DecayFit fit;
  fit.sizes = sizes;
  fit.norms.reserve(sizes.size());
  for (int n : sizes) {
    LatticeConfig cfg = config_template;
    cfg.n_sites = n;
    if (cfg.period <= 0.0) cfg.period = 1.0;
    const Eigen::MatrixXcd h =
        build_hamiltonian(cfg, 0.0).cast<std::complex<double>>();
    fit.norms.push_back(operator_norm(
        project_effective(h, outer_partition(n)).matrix));
  }

  // Least squares of ln||H_eff|| = a + b N; N_cr = -1/b.
  const double m = static_cast<double>(sizes.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = sizes[i];
    const double y = std::log(fit.norms[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  const double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (!(b < 0.0))
    throw std::invalid_argument("effective coupling does not decay with N");
  fit.n_critical = -1.0 / b;
  const double ss_tot = syy - sy * sy / m;
  const double a = (sy - b * sx) / m;
  double ss_res = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double r = std::log(fit.norms[i]) - (a + b * sizes[i]);
    ss_res += r * r;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::string to_json(const EffectiveHamiltonian& eff) {
  nlohmann::json j;
  j["kept_indices"] = eff.partition.kept;
  j["eliminated_indices"] = eff.partition.eliminated;
  j["condition_ratio"] = eff.condition_ratio;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < eff.matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < eff.matrix.cols(); ++k)
      row.push_back({eff.matrix(i, k).real(), eff.matrix(i, k).imag()});
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j.dump(2);
}

std::string to_json(const DecayFit& fit) {
  nlohmann::json j;
  j["sizes"] = fit.sizes;
  j["norms"] = fit.norms;
  j["n_critical"] = fit.n_critical;
  j["r_squared"] = fit.r_squared;
  return j.dump(2);
}

}  // namespace floqlat
