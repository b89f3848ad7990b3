#include <doctest.h>
#include <floqlat/lattice.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace floqlat;

namespace {

LatticeConfig driven4() {
  LatticeConfig cfg;
  cfg.n_sites = 4;
  cfg.kappa0 = 0.03;
  cfg.dkappa1 = 0.02;
  cfg.period = 74.79982508547127;  // omega/Delta = 0.7
  return cfg;
}

}  // namespace

TEST_CASE("config validation enforces the physical parameter domain") {
  CHECK_NOTHROW(validate(driven4()));

  LatticeConfig cfg = driven4();
  cfg.n_sites = 1;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);

  cfg = driven4();
  cfg.kappa0 = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.kappa0 = -0.01;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.kappa0 = std::nan("");
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);

  // Bond couplings must stay nonnegative at every z.
  cfg = driven4();
  cfg.dkappa0 = 0.011;  // 0.03 - 0.011 - 0.02 < 0
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.kappa0 = 0.04;  // exactly zero minimum bond is allowed
  cfg.dkappa0 = 0.02;  // (0.04 and 0.02 share their binary fraction, so the
  CHECK_NOTHROW(validate(cfg));  // difference is exact)

  cfg = driven4();
  cfg.period = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg.dkappa1 = 0.0;  // static lattice needs no period
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("JSON codec is strict and round-trips every field") {
  LatticeConfig cfg = driven4();
  cfg.dkappa0 = 0.005;
  cfg.dkappa1 = 0.01;
  cfg.gauge = 1.25;
  cfg.beta0 = 7.5;
  const LatticeConfig back = lattice_from_json(lattice_to_json(cfg));
  CHECK(back.n_sites == cfg.n_sites);
  CHECK(back.kappa0 == cfg.kappa0);
  CHECK(back.dkappa0 == cfg.dkappa0);
  CHECK(back.dkappa1 == cfg.dkappa1);
  CHECK(back.period == cfg.period);
  CHECK(back.gauge == cfg.gauge);
  CHECK(back.beta0 == cfg.beta0);

  const char* good =
      R"({"n_sites":4,"kappa0":0.03,"dkappa0":0.0,"dkappa1":0.02,)"
      R"("period":74.8,"gauge":0.0,"beta0":0.0})";
  CHECK_NOTHROW(lattice_from_json(good));

  SUBCASE("unknown key rejected") {
    const char* text =
        R"({"n_sites":4,"kappa0":0.03,"dkappa0":0.0,"dkappa1":0.02,)"
        R"("period":74.8,"gauge":0.0,"beta0":0.0,"extra":1})";
    CHECK_THROWS_AS(lattice_from_json(text), std::invalid_argument);
  }
  SUBCASE("missing key rejected") {
    const char* text =
        R"({"n_sites":4,"kappa0":0.03,"dkappa0":0.0,"dkappa1":0.02,)"
        R"("period":74.8,"gauge":0.0})";
    CHECK_THROWS_AS(lattice_from_json(text), std::invalid_argument);
  }
  SUBCASE("non-integer n_sites rejected") {
    const char* text =
        R"({"n_sites":4.5,"kappa0":0.03,"dkappa0":0.0,"dkappa1":0.02,)"
        R"("period":74.8,"gauge":0.0,"beta0":0.0})";
    CHECK_THROWS_AS(lattice_from_json(text), std::invalid_argument);
  }
  SUBCASE("malformed input rejected") {
    CHECK_THROWS_AS(lattice_from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(lattice_from_json("[1,2,3]"), std::invalid_argument);
    CHECK_THROWS_AS(lattice_from_json(R"({"n_sites":"4"})"), std::invalid_argument);
  }
}

TEST_CASE("drive and bond couplings follow the staggered cosine protocol") {
  LatticeConfig cfg = driven4();
  cfg.n_sites = 5;
  cfg.dkappa0 = 0.004;
  cfg.dkappa1 = 0.01;

  CHECK(drive_coupling(cfg, 0.0) == doctest::Approx(0.014).epsilon(1e-14));
  CHECK(drive_coupling(cfg, cfg.period / 2.0) ==
        doctest::Approx(-0.006).epsilon(1e-10));
  CHECK(drive_coupling(cfg, cfg.period) == doctest::Approx(0.014).epsilon(1e-10));

  cfg.gauge = std::numbers::pi;
  CHECK(drive_coupling(cfg, 0.0) == doctest::Approx(-0.006).epsilon(1e-10));
  cfg.gauge = 0.0;

  const double dk = drive_coupling(cfg, 0.0);
  const Eigen::VectorXd bonds = bond_couplings(cfg, 0.0);
  REQUIRE(bonds.size() == 4);
  CHECK(bonds[0] == doctest::Approx(cfg.kappa0 - dk));
  CHECK(bonds[1] == doctest::Approx(cfg.kappa0 + dk));
  CHECK(bonds[2] == doctest::Approx(cfg.kappa0 - dk));
  CHECK(bonds[3] == doctest::Approx(cfg.kappa0 + dk));
}

TEST_CASE("coupling matrix is tridiagonal, symmetric, traceless") {
  LatticeConfig cfg = driven4();
  cfg.n_sites = 6;
  cfg.beta0 = 11.0;  // common propagation constant never enters the matrix
  const Eigen::MatrixXd h = build_hamiltonian(cfg, 13.7);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (std::abs(i - j) > 1) CHECK(h(i, j) == 0.0);

  LatticeConfig no_beta = cfg;
  no_beta.beta0 = 0.0;
  CHECK((h - build_hamiltonian(no_beta, 13.7)).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("static lattice is z-independent") {
    LatticeConfig st = cfg;
    st.dkappa1 = 0.0;
    st.dkappa0 = 0.01;
    CHECK((build_hamiltonian(st, 0.0) - build_hamiltonian(st, 321.0))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("drive average and bandwidth of the reference chain") {
  LatticeConfig cfg = driven4();
  cfg.dkappa0 = 0.006;
  cfg.dkappa1 = 0.015;
  LatticeConfig averaged = cfg;
  averaged.dkappa1 = 0.0;
  CHECK((static_reference(cfg) - build_hamiltonian(averaged, 0.0))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(bandwidth(cfg) == doctest::Approx(4.0 * cfg.kappa0).epsilon(1e-15));
}

TEST_CASE("half-period drive shift equals a pi gauge shift") {
  LatticeConfig cfg = driven4();
  for (double z : {0.0, 5.0, 31.4, 74.0})
    CHECK(gauge_shift_identity_check(cfg, z) < 1e-15);

  cfg.dkappa0 = 0.005;  // static offset breaks the identity
  CHECK_THROWS_AS(gauge_shift_identity_check(cfg, 0.0), std::invalid_argument);
}
