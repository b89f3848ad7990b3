#include <doctest.h>

#include <floqlat/experiments.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace floqlat;

namespace {

constexpr double kPi = std::numbers::pi;

// omega/Delta = 0.7 drive on a 4-site chain; period = 2*pi / (0.7 * 4*kappa0).
LatticeConfig qae4(double gauge) {
  LatticeConfig cfg;
  cfg.n_sites = 4;
  cfg.kappa0 = 0.03;
  cfg.dkappa0 = 0.0;
  cfg.dkappa1 = 0.02;
  cfg.period = 74.79982508547127;
  cfg.gauge = gauge;
  return cfg;
}

LatticeConfig static_chain(int n, double kappa0, double dkappa0) {
  LatticeConfig cfg;
  cfg.n_sites = n;
  cfg.kappa0 = kappa0;
  cfg.dkappa0 = dkappa0;
  return cfg;
}

StateVector state4(std::complex<double> a, std::complex<double> b,
                   std::complex<double> c, std::complex<double> d) {
  StateVector psi(4);
  psi << a, b, c, d;
  return psi;
}

std::string qae_json(int n_periods, double total_length) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                R"({"lattice": {"n_sites": 4, "kappa0": 0.03, "dkappa0": 0.0,
                     "dkappa1": 0.02, "period": 74.79982508547127,
                     "gauge": 0.0, "beta0": 0.1},
                    "n_periods": %d, "total_length": %.17g})",
                n_periods, total_length);
  return buf;
}

}  // namespace

TEST_CASE("experiment config parses strictly and backfills the driven length") {
  const ExperimentConfig cfg = experiment_from_json(qae_json(7, 0.0));
  CHECK(cfg.lattice.n_sites == 4);
  CHECK(cfg.input_site == 1);       // defaulted
  CHECK(cfg.sample_stride == 1);    // defaulted
  CHECK(cfg.n_periods == 7);
  CHECK(cfg.total_length == doctest::Approx(7 * 74.79982508547127).epsilon(1e-15));

  // An explicit length must match n_periods * period for driven configs.
  CHECK_NOTHROW(experiment_from_json(qae_json(7, 7 * 74.79982508547127)));
  CHECK_THROWS_AS(experiment_from_json(qae_json(7, 500.0)), std::invalid_argument);

  // Static configs keep an explicit length; a positive period still backfills.
  const std::string static_text =
      R"({"lattice": {"n_sites": 4, "kappa0": 0.042, "dkappa0": 0.02,
           "dkappa1": 0.0, "period": 0.0, "gauge": 0.0, "beta0": 0.0},
          "total_length": 800.0, "input_site": 2, "sample_stride": 5})";
  const ExperimentConfig st = experiment_from_json(static_text);
  CHECK(st.total_length == 800.0);
  CHECK(st.input_site == 2);
  CHECK(st.sample_stride == 5);

  const std::string static_backfill =
      R"({"lattice": {"n_sites": 4, "kappa0": 0.042, "dkappa0": 0.02,
           "dkappa1": 0.0, "period": 30.0, "gauge": 0.0, "beta0": 0.0},
          "n_periods": 3})";
  CHECK(experiment_from_json(static_backfill).total_length == doctest::Approx(90.0));
}

TEST_CASE("experiment config rejects unknown keys unless allow-listed") {
  const std::string text =
      R"({"lattice": {"n_sites": 4, "kappa0": 0.03, "dkappa0": 0.0,
           "dkappa1": 0.0, "period": 0.0, "gauge": 0.0, "beta0": 0.0},
          "total_length": 10.0, "sizes": [4, 6]})";
  CHECK_THROWS_AS(experiment_from_json(text), std::invalid_argument);
  CHECK_NOTHROW(experiment_from_json(text, {"sizes"}));

  CHECK_THROWS_AS(experiment_from_json("[1,2]"), std::invalid_argument);
  CHECK_THROWS_AS(experiment_from_json("{\"total_length\": 1.0}"),
                  std::invalid_argument);  // lattice block is mandatory
  CHECK_THROWS_AS(experiment_from_json("{not json"), std::invalid_argument);
}

TEST_CASE("experiment config validates ranges") {
  auto with = [](const char* tail) {
    return std::string(
               R"({"lattice": {"n_sites": 4, "kappa0": 0.03, "dkappa0": 0.0,
                    "dkappa1": 0.0, "period": 0.0, "gauge": 0.0, "beta0": 0.0},)") +
           tail + "}";
  };
  CHECK_THROWS_AS(experiment_from_json(with(R"("input_site": 0)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(experiment_from_json(with(R"("input_site": 5)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(experiment_from_json(with(R"("n_periods": 0)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(experiment_from_json(with(R"("sample_stride": 0)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(experiment_from_json(with(R"("total_length": -1.0)")),
                  std::invalid_argument);
  // Lattice invariants propagate out of the nested block.
  CHECK_THROWS_AS(
      experiment_from_json(
          R"({"lattice": {"n_sites": 4, "kappa0": 0.0, "dkappa0": 0.0,
               "dkappa1": 0.0, "period": 0.0, "gauge": 0.0, "beta0": 0.0}})"),
      std::invalid_argument);
}

TEST_CASE("fidelity metrics on a hand-built record") {
  PropagationRecord rec;
  rec.z_samples = {0.0, 10.0, 20.0};
  rec.states.push_back(state4(1.0, 0.0, 0.0, 0.0));
  rec.states.push_back(state4(std::sqrt(0.3), std::sqrt(0.4), std::sqrt(0.2),
                              std::sqrt(0.1)));
  rec.states.push_back(state4(0.0, std::sqrt(0.05), 0.0, std::sqrt(0.95)));

  SUBCASE("input on site 1: channel {1,4}, inner {2,3}") {
    const FidelityReport rep = fidelity_report(rec, 1);
    CHECK(rep.max_inner_leakage == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(rep.outer_transfer_peak == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(rep.transfer_peak_z == 20.0);
    CHECK_FALSE(rep.eliminated);  // leakage 0.6 >= default 0.25

    FidelityThresholds loose;
    loose.max_leak = 0.7;
    loose.min_peak = 0.9;
    CHECK(fidelity_report(rec, 1, loose).eliminated);
  }

  SUBCASE("input on site 2: channel {2,3}, inner {1,4}") {
    const FidelityReport rep = fidelity_report(rec, 2);
    CHECK(rep.max_inner_leakage == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.outer_transfer_peak == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rep.transfer_peak_z == 10.0);
  }

  SUBCASE("ties keep the first peak position") {
    PropagationRecord tie;
    tie.z_samples = {0.0, 10.0, 20.0};
    tie.states.push_back(state4(1.0, 0.0, 0.0, 0.0));
    tie.states.push_back(state4(0.0, 0.0, 0.0, 0.5));
    tie.states.push_back(state4(0.0, 0.0, 0.0, 0.5));
    CHECK(fidelity_report(tie, 1).transfer_peak_z == 10.0);
  }

  SUBCASE("guards") {
    CHECK_THROWS_AS(fidelity_report(rec, 0), std::invalid_argument);
    CHECK_THROWS_AS(fidelity_report(rec, 5), std::invalid_argument);
    CHECK_THROWS_AS(fidelity_report(PropagationRecord{}, 1), std::invalid_argument);
  }

  SUBCASE("two-site record has no inner sites") {
    PropagationRecord two;
    two.z_samples = {0.0, 1.0};
    StateVector a(2), b(2);
    a << 1.0, 0.0;
    b << 0.0, 1.0;
    two.states = {a, b};
    const FidelityReport rep = fidelity_report(two, 1);
    CHECK(rep.max_inner_leakage == 0.0);
    CHECK(rep.outer_transfer_peak == doctest::Approx(1.0));
    CHECK(rep.eliminated);
  }
}

TEST_CASE("driven transfer is judged at stroboscopic sections") {
  ExperimentConfig cfg;
  cfg.lattice = qae4(kPi);
  cfg.input_site = 1;
  cfg.n_periods = 7;
  cfg.total_length = 7 * cfg.lattice.period;

  const auto [record, report] = run_propagation_experiment(cfg);
  CHECK(report.max_inner_leakage ==
        doctest::Approx(0.16697095357822117).epsilon(1e-9));
  CHECK(report.outer_transfer_peak ==
        doctest::Approx(0.9947344252627943).epsilon(1e-9));
  CHECK(report.transfer_peak_z ==
        doctest::Approx(523.5987755982989).epsilon(1e-12));
  CHECK(report.eliminated);

  // The full record keeps every integrator step; mid-period micromotion
  // sweeps through the inner sites, so its worst-case leakage is far larger
  // than the stroboscopic one that decides elimination.
  const FidelityReport full = fidelity_report(record, cfg.input_site);
  CHECK(full.max_inner_leakage > 0.5);
  CHECK(report.max_inner_leakage < 0.2);

  CHECK(record.z_samples.front() == 0.0);
  CHECK(record.z_samples.back() == doctest::Approx(cfg.total_length).epsilon(1e-12));
  for (const StateVector& psi : record.states)
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("static propagation fidelity matches frozen references") {
  auto run = [](double kappa0, double dkappa0) {
    ExperimentConfig cfg;
    cfg.lattice = static_chain(4, kappa0, dkappa0);
    cfg.input_site = 1;
    cfg.total_length = 800.0;
    return run_propagation_experiment(cfg).second;
  };

  // Strong dimerization: the outer pair is an almost closed two-level system.
  const FidelityReport ae = run(0.042, 0.02);
  CHECK(ae.max_inner_leakage == doctest::Approx(0.3349476999648889).epsilon(1e-9));
  CHECK(ae.outer_transfer_peak == doctest::Approx(0.9942036180991989).epsilon(1e-9));
  CHECK(ae.transfer_peak_z == doctest::Approx(660.7142857142857).epsilon(1e-12));
  CHECK_FALSE(ae.eliminated);

  // Deeper dimerization (kappa1/kappa2 = 0.2) passes the default thresholds.
  const FidelityReport deep = run(0.03, 0.02);
  CHECK(deep.max_inner_leakage == doctest::Approx(0.13793103238723206).epsilon(1e-9));
  CHECK(deep.outer_transfer_peak == doctest::Approx(0.9738483473200976).epsilon(1e-9));
  CHECK(deep.transfer_peak_z == doctest::Approx(800.0).epsilon(1e-12));
  CHECK(deep.eliminated);

  // Uniform chain: everything leaks through the inner sites.
  const FidelityReport uni = run(0.042, 0.0);
  CHECK(uni.max_inner_leakage == doctest::Approx(0.799982175943182).epsilon(1e-9));
  CHECK(uni.outer_transfer_peak == doctest::Approx(0.9923561976505293).epsilon(1e-9));
  CHECK(uni.transfer_peak_z == doctest::Approx(669.047619047619).epsilon(1e-12));
  CHECK_FALSE(uni.eliminated);
}

TEST_CASE("gauge grid reproduces the frozen stroboscopic asymmetry") {
  ExperimentConfig cfg;
  cfg.lattice = qae4(0.0);
  cfg.input_site = 1;
  cfg.n_periods = 7;
  cfg.total_length = 7 * cfg.lattice.period;

  const GaugeGrid grid = run_gauge_experiment(cfg);

  // Cell order: (gauge 0, input 1), (pi, 1), (0, 2), (pi, 2).
  CHECK(grid.cells[0].max_inner_leakage ==
        doctest::Approx(0.8770947120717674).epsilon(1e-6));
  CHECK(grid.cells[1].max_inner_leakage ==
        doctest::Approx(0.16697095357822117).epsilon(1e-6));
  CHECK(grid.cells[1].outer_transfer_peak ==
        doctest::Approx(0.9947344252627943).epsilon(1e-6));
  CHECK(grid.cells[1].transfer_peak_z ==
        doctest::Approx(7 * cfg.lattice.period).epsilon(1e-12));

  CHECK_FALSE(grid.cells[0].eliminated);
  CHECK(grid.cells[1].eliminated);
  CHECK_FALSE(grid.cells[2].eliminated);
  CHECK(grid.cells[3].eliminated);

  // The drive is even about the period midpoint at gauge 0 and pi, which makes
  // the stroboscopic operator symmetric; with mirror symmetry the two input
  // channels then give identical metrics at the same gauge.
  CHECK(std::abs(grid.cells[0].max_inner_leakage - grid.cells[2].max_inner_leakage) < 1e-9);
  CHECK(std::abs(grid.cells[0].outer_transfer_peak - grid.cells[2].outer_transfer_peak) < 1e-9);
  CHECK(std::abs(grid.cells[1].max_inner_leakage - grid.cells[3].max_inner_leakage) < 1e-9);
  CHECK(std::abs(grid.cells[1].outer_transfer_peak - grid.cells[3].outer_transfer_peak) < 1e-9);

  // Stroboscopic traces: n_periods + 1 samples spaced by one period.
  for (const PropagationRecord& rec : grid.records) {
    REQUIRE(rec.z_samples.size() == 8);
    CHECK(rec.z_samples[1] == doctest::Approx(cfg.lattice.period).epsilon(1e-12));
  }
}

TEST_CASE("gauge dependence of the transfer collapses as the drive speeds up") {
  // Pure cosine drive; total length fixed at 8 periods of the slowest drive.
  const double delta = 4 * 0.03;
  const double total = 8.0 * 2.0 * kPi / (4.0 * delta);
  double spread[3];
  int idx = 0;
  for (int x : {4, 8, 16}) {
    double lo = 2.0, hi = 0.0;
    for (double gauge : {0.0, kPi / 2, kPi, 3 * kPi / 2}) {
      ExperimentConfig cfg;
      cfg.lattice = qae4(gauge);
      cfg.lattice.period = 2.0 * kPi / (x * delta);
      cfg.input_site = 1;
      cfg.n_periods = 2 * x;  // keeps n_periods * period = total
      cfg.total_length = total;
      const FidelityReport rep = run_propagation_experiment(cfg).second;
      CHECK(rep.outer_transfer_peak > 0.9);
      lo = std::min(lo, rep.outer_transfer_peak);
      hi = std::max(hi, rep.outer_transfer_peak);
    }
    spread[idx++] = hi - lo;
  }
  CHECK(spread[0] > spread[1]);
  CHECK(spread[1] > spread[2]);
  CHECK(spread[2] > 0.0);
}

TEST_CASE("fast drive over a detuned chain treats all gauge cells alike") {
  ExperimentConfig cfg;
  cfg.lattice = qae4(0.0);
  cfg.lattice.dkappa0 = 0.008;
  cfg.lattice.period = 2.0 * kPi / (8.0 * 4 * 0.03);
  cfg.input_site = 1;
  cfg.n_periods = 16;
  cfg.total_length = 16 * cfg.lattice.period;

  const GaugeGrid grid = run_gauge_experiment(cfg);
  CHECK(grid.cells[1].eliminated == grid.cells[0].eliminated);
  CHECK(grid.cells[2].eliminated == grid.cells[0].eliminated);
  CHECK(grid.cells[3].eliminated == grid.cells[0].eliminated);
  // Same-gauge symmetry holds with a static detuning too.
  CHECK(std::abs(grid.cells[0].max_inner_leakage - grid.cells[2].max_inner_leakage) < 1e-9);
  CHECK(std::abs(grid.cells[1].max_inner_leakage - grid.cells[3].max_inner_leakage) < 1e-9);
}

TEST_CASE("finite-size scan: pi-pair splitting decays with chain length") {
  ExperimentConfig cfg;
  cfg.lattice = qae4(kPi);
  cfg.input_site = 1;
  cfg.n_periods = 7;
  cfg.total_length = 7 * cfg.lattice.period;

  const auto table = run_finite_size_experiment(cfg, {4, 6, 8});
  REQUIRE(table.size() == 3);
  CHECK(table[0].n_sites == 4);
  CHECK(table[1].n_sites == 6);
  CHECK(table[2].n_sites == 8);
  for (const FiniteSizePoint& row : table) CHECK_FALSE(row.zero_mode_based);

  CHECK(table[0].splitting == doctest::Approx(0.00627741895854).epsilon(1e-6));
  CHECK(table[1].splitting == doctest::Approx(0.00433853132124).epsilon(1e-6));
  CHECK(table[2].splitting == doctest::Approx(0.00117848956847).epsilon(1e-6));
  CHECK(table[0].splitting > table[1].splitting);
  CHECK(table[1].splitting > table[2].splitting);

  SUBCASE("guards") {
    CHECK_THROWS_AS(run_finite_size_experiment(cfg, {}), std::invalid_argument);
    CHECK_THROWS_AS(run_finite_size_experiment(cfg, {5}), std::invalid_argument);
    CHECK_THROWS_AS(run_finite_size_experiment(cfg, {2}), std::invalid_argument);
  }
}

TEST_CASE("finite-size scan falls back to zero modes for static chains") {
  ExperimentConfig cfg;
  cfg.lattice = static_chain(6, 0.042, 0.02);
  cfg.input_site = 1;
  cfg.total_length = 400.0;

  const auto table = run_finite_size_experiment(cfg, {6});
  REQUIRE(table.size() == 1);
  CHECK(table[0].zero_mode_based);

  // Independent oracle: difference of the two smallest-|E| chain eigenvalues.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      build_hamiltonian(cfg.lattice, 0.0));
  std::vector<double> evs(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + 6);
  std::sort(evs.begin(), evs.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  CHECK(table[0].splitting == doctest::Approx(std::abs(evs[0] - evs[1])).epsilon(1e-12));
  CHECK(table[0].splitting > 0.0);
}

TEST_CASE("intensity map renders exact PGM bytes") {
  PropagationRecord rec;
  rec.z_samples = {0.0, 1.0};
  StateVector s0(3), s1(3);
  s0 << 1.0, 0.0, 0.0;
  s1 << std::sqrt(1.2),                       // clamps to white
      std::complex<double>(0.5, 0.5),         // intensity 0.5 -> 128
      std::complex<double>(0.0, 0.6);         // intensity 0.36 -> 92
  rec.states = {s0, s1};

  const std::string path = "render_test.pgm";
  render_intensity_map(rec, path);

  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const std::string expected = std::string("P5\n2 3\n255\n") +
                               '\xff' + '\xff' +   // site 1: 1.0, clamp(1.2)
                               '\x00' + '\x80' +   // site 2: 0.0, 0.5
                               '\x00' + '\x5c';    // site 3: 0.0, 0.36
  CHECK(bytes == expected);

  // Deterministic re-render.
  render_intensity_map(rec, path);
  std::ifstream in2(path, std::ios::binary);
  std::string bytes2((std::istreambuf_iterator<char>(in2)),
                     std::istreambuf_iterator<char>());
  CHECK(bytes2 == bytes);
  std::remove(path.c_str());

  CHECK_THROWS_AS(render_intensity_map(PropagationRecord{}, path),
                  std::invalid_argument);
}

TEST_CASE("finite-size CSV layout") {
  FiniteSizePoint a;
  a.n_sites = 4;
  a.splitting = 0.00627741895854;
  a.zero_mode_based = false;
  a.fidelity.max_inner_leakage = 0.167;
  a.fidelity.outer_transfer_peak = 0.995;
  a.fidelity.eliminated = true;
  FiniteSizePoint b;
  b.n_sites = 6;
  b.splitting = 0.004;
  b.zero_mode_based = true;
  b.fidelity.max_inner_leakage = 0.5;
  b.fidelity.outer_transfer_peak = 0.25;
  b.fidelity.eliminated = false;

  std::ostringstream os;
  write_csv(std::vector<FiniteSizePoint>{a, b}, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line ==
        "n_sites,splitting,mode_type,max_inner_leakage,outer_transfer_peak,eliminated");
  std::getline(is, line);
  CHECK(line == "4,0.00627741895854,pi,0.167,0.995,1");
  std::getline(is, line);
  CHECK(line == "6,0.004,zero,0.5,0.25,0");
}

TEST_CASE("fidelity report exports to JSON") {
  FidelityReport rep;
  rep.max_inner_leakage = 0.167;
  rep.outer_transfer_peak = 0.995;
  rep.transfer_peak_z = 523.6;
  rep.eliminated = true;
  const nlohmann::json j = nlohmann::json::parse(to_json(rep));
  CHECK(j.at("max_inner_leakage").get<double>() == doctest::Approx(0.167));
  CHECK(j.at("outer_transfer_peak").get<double>() == doctest::Approx(0.995));
  CHECK(j.at("transfer_peak_z").get<double>() == doctest::Approx(523.6));
  CHECK(j.at("eliminated").get<bool>());
}

TEST_CASE("repeated runs are bit-for-bit deterministic") {
  ExperimentConfig cfg;
  cfg.lattice = static_chain(4, 0.05, 0.02);
  cfg.input_site = 1;
  cfg.total_length = 100.0;

  const auto [rec1, rep1] = run_propagation_experiment(cfg);
  const auto [rec2, rep2] = run_propagation_experiment(cfg);
  CHECK(rep1.max_inner_leakage == rep2.max_inner_leakage);
  CHECK(rep1.outer_transfer_peak == rep2.outer_transfer_peak);

  std::ostringstream csv1, csv2;
  write_csv(rec1, csv1);
  write_csv(rec2, csv2);
  CHECK(csv1.str() == csv2.str());
}
