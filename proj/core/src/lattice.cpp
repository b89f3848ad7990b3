#include <floqlat/lattice.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace floqlat {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const char* kConfigKeys[] = {"n_sites", "kappa0",  "dkappa0", "dkappa1",
                             "period",  "gauge",   "beta0"};

}  // namespace

void validate(const LatticeConfig& cfg) {
  if (cfg.n_sites < 2)
    throw std::invalid_argument("n_sites must be >= 2");
  if (!(cfg.kappa0 > 0.0) || !std::isfinite(cfg.kappa0))
    throw std::invalid_argument("kappa0 must be positive and finite");
  if (!std::isfinite(cfg.dkappa0) || !std::isfinite(cfg.dkappa1) ||
      !std::isfinite(cfg.period) || !std::isfinite(cfg.gauge) ||
      !std::isfinite(cfg.beta0))
    throw std::invalid_argument("config fields must be finite");
  if (cfg.kappa0 - std::abs(cfg.dkappa0) - std::abs(cfg.dkappa1) < 0.0)
    throw std::invalid_argument(
        "kappa0 - |dkappa0| - |dkappa1| must be >= 0 (bond couplings stay nonnegative)");
  if (cfg.dkappa1 != 0.0 && !(cfg.period > 0.0))
    throw std::invalid_argument("period must be > 0 for a driven lattice");
}

LatticeConfig lattice_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("lattice config must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : kConfigKeys)
      if (item.key() == key) known = true;
    if (!known)
      throw std::invalid_argument("unknown lattice config key: " + item.key());
  }
  for (const char* key : kConfigKeys)
    if (!j.contains(key))
      throw std::invalid_argument(std::string("missing lattice config key: ") + key);

  LatticeConfig cfg;
  try {
    if (!j["n_sites"].is_number_integer())
      throw std::invalid_argument("n_sites must be an integer");
    cfg.n_sites = j["n_sites"].get<int>();
    cfg.kappa0 = j["kappa0"].get<double>();
    cfg.dkappa0 = j["dkappa0"].get<double>();
    cfg.dkappa1 = j["dkappa1"].get<double>();
    cfg.period = j["period"].get<double>();
    cfg.gauge = j["gauge"].get<double>();
    cfg.beta0 = j["beta0"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("lattice config type error: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

std::string lattice_to_json(const LatticeConfig& cfg) {
  nlohmann::json j{{"n_sites", cfg.n_sites}, {"kappa0", cfg.kappa0},
                   {"dkappa0", cfg.dkappa0}, {"dkappa1", cfg.dkappa1},
                   {"period", cfg.period},   {"gauge", cfg.gauge},
                   {"beta0", cfg.beta0}};
  return j.dump(2);
}

double drive_coupling(const LatticeConfig& cfg, double z) {
  if (cfg.dkappa1 == 0.0) return cfg.dkappa0;
  return cfg.dkappa0 + cfg.dkappa1 * std::cos(kTwoPi * z / cfg.period + cfg.gauge);
}

Eigen::VectorXd bond_couplings(const LatticeConfig& cfg, double z) {
  validate(cfg);
  const double dk = drive_coupling(cfg, z);
  Eigen::VectorXd bonds(cfg.n_sites - 1);
  for (int j = 0; j < cfg.n_sites - 1; ++j)
    bonds[j] = (j % 2 == 0) ? cfg.kappa0 - dk : cfg.kappa0 + dk;
  return bonds;
}

Eigen::MatrixXd build_hamiltonian(const LatticeConfig& cfg, double z) {
  const Eigen::VectorXd bonds = bond_couplings(cfg, z);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cfg.n_sites, cfg.n_sites);
  for (int j = 0; j < cfg.n_sites - 1; ++j) {
    h(j, j + 1) = bonds[j];
    h(j + 1, j) = bonds[j];
  }
  return h;
}

Eigen::MatrixXd static_reference(const LatticeConfig& cfg) {
  LatticeConfig averaged = cfg;
  averaged.dkappa1 = 0.0;
  if (averaged.period <= 0.0) averaged.period = 1.0;
  return build_hamiltonian(averaged, 0.0);
}

double bandwidth(const LatticeConfig& cfg) {
  return 2.0 * ((cfg.kappa0 - cfg.dkappa0) + (cfg.kappa0 + cfg.dkappa0));
}

double gauge_shift_identity_check(const LatticeConfig& cfg, double z) {
  validate(cfg);
  if (cfg.dkappa0 != 0.0)
    throw std::invalid_argument(
        "half-period gauge identity requires a pure cosine drive (dkappa0 = 0)");
  if (cfg.dkappa1 == 0.0) return 0.0;
  const Eigen::MatrixXd lhs = build_hamiltonian(cfg, z + cfg.period / 2.0);
  LatticeConfig shifted = cfg;
  shifted.gauge += std::numbers::pi;
  const Eigen::MatrixXd rhs = build_hamiltonian(shifted, z);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace floqlat
