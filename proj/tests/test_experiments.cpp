#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mpqec/experiments.hpp"
#include "mpqec/fixtures.hpp"
#include "mpqec/io.hpp"
#include "mpqec/multiset.hpp"

using namespace mpqec;
namespace ex = mpqec::experiments;

namespace {

std::string fixture(const std::string& name) { return std::string(MPQEC_FIXTURE_DIR) + "/" + name; }

std::string scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("mpqec_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

struct HlSetup {
  NoiseModel model;
  HnlsSolution sol;
  GaugedModel gauged;
};

HlSetup setup(const NoiseModel& m) {
  HlSetup s{m, solve_hnls(m), {}};
  s.gauged = apply_gauge(m, s.sol.rho0, s.sol.rho1);
  return s;
}

}  // namespace

TEST_CASE("hnls subcommand verdicts and exit codes") {
  ex::ExperimentConfig cfg;
  cfg.out_dir = scratch_dir("hnls");
  cfg.model_path = fixture("qutrit.json");
  auto rep = ex::cmd_hnls(cfg);
  CHECK(rep.exit_code == ex::kExitOk);
  CHECK(rep.data["verdict"] == "HL");
  CHECK(std::abs(rep.data["value"].get<double>() - 0.5) < 1e-6);
  CHECK(std::filesystem::exists(cfg.out_dir + "/hnls.json"));

  cfg.model_path = fixture("qubit_dephasing.json");
  rep = ex::cmd_hnls(cfg);
  CHECK(rep.exit_code == ex::kExitOk);
  CHECK(rep.data["verdict"] == "SQL");
  CHECK(std::abs(rep.data["alpha"].get<double>() - 0.125) < 1e-4);

  cfg.model_path = fixture("bad_nonhermitian.json");
  CHECK(ex::cmd_hnls(cfg).exit_code == ex::kExitBadInput);
  cfg.model_path = fixture("does_not_exist.json");
  CHECK(ex::cmd_hnls(cfg).exit_code == ex::kExitBadInput);

  // No Lindblad operators: the span is the identity alone and ||H - S|| = 1 for H = Z.
  CMatrix z = CMatrix::Zero(2, 2);
  z(0, 0) = 1;
  z(1, 1) = -1;
  io::save_json(io::model_to_json(make_model(z, {}, "bare")), cfg.out_dir + "/bare.json");
  cfg.model_path = cfg.out_dir + "/bare.json";
  rep = ex::cmd_hnls(cfg);
  CHECK(rep.exit_code == ex::kExitOk);
  CHECK(rep.data["verdict"] == "HL");
  CHECK(std::abs(rep.data["value"].get<double>() - 1.0) < 1e-6);
}

TEST_CASE("output directory precedence") {
  ex::ExperimentConfig cfg;
  cfg.out_dir = scratch_dir("precedence") + "/nested";
  CHECK(ex::resolve_output_dir(cfg) == cfg.out_dir);
  CHECK(std::filesystem::is_directory(cfg.out_dir));
}

TEST_CASE("qutrit demo reproduces the worked numbers") {
  ex::ExperimentConfig cfg;
  cfg.out_dir = scratch_dir("demo");
  auto rep = ex::cmd_qutrit_demo(cfg);
  CHECK(rep.exit_code == 0);
  bool seen = false;
  for (const auto& row : rep.data["qfi_table"]) {
    const int nu = row["N_U"];
    const double t = row["t"];
    CHECK(std::abs(row["qfi_11"].get<double>() - 0.25 * nu * nu * t * t) < 1e-9);
    CHECK(std::abs(row["qfi_41"].get<double>() - 16.0 / 25.0 * nu * nu * t * t) < 1e-9);
    if (nu == 10 && t == 1.0) {
      CHECK(row["qfi_11"].get<double>() == doctest::Approx(25.0));
      CHECK(row["qfi_41"].get<double>() == doctest::Approx(64.0));
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("least squares") {
  auto f = ex::least_squares({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  // y = x plus alternating noise; SE from the residual formula by hand.
  auto g = ex::least_squares({0, 1, 2, 3}, {0.1, 0.9, 2.1, 2.9});
  CHECK(g.slope == doctest::Approx(0.96));
  CHECK(g.intercept == doctest::Approx(0.06));
  // Residuals 0.04, -0.12, 0.12, -0.04; rss 0.032; sxx 5.
  CHECK(g.slope_se == doctest::Approx(std::sqrt(0.032 / 2 / 5)));
  CHECK_THROWS_AS(ex::least_squares({1}, {1}), InvalidInput);
}

TEST_CASE("qutrit scan: the small-ancilla code is exact") {
  auto s = setup(fixtures::qutrit_model());
  auto recs = ex::gamma_scan(s.model, s.sol, s.gauged, {"small"}, {4, 8, 12}, {}, {1.0}, 1);
  REQUIRE(recs.size() == 3);
  for (const auto& r : recs) {
    CHECK(r.status == "ok");
    CHECK(std::abs(r.gamma_L) < 1e-8);
    CHECK(r.signal == doctest::Approx(r.m).epsilon(1e-9));
  }
}

TEST_CASE("scan CSV is deterministic, versioned and re-derivable") {
  auto s = setup(fixtures::generic_hl_model());
  std::vector<double> tg{0.5, 1.0};
  auto run = [&] {
    auto recs = ex::gamma_scan(s.model, s.sol, s.gauged, {"random", "small"}, {4, 6}, {3, 1, 2}, tg, 2);
    std::ostringstream out;
    ex::write_scan_csv(out, recs, tg);
    return out.str();
  };
  const std::string a = run(), b = run();
  CHECK(a == b);
  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  CHECK(line == std::string("# ") + io::kCsvVersion + " gamma_scan");
  std::getline(in, line);
  auto header = split(line);
  CHECK(header.front() == "code");
  CHECK(header.back() == "status");
  int rows = 0;
  std::uint64_t last_seed = 0;
  while (std::getline(in, line)) {
    auto cells = split(line);
    REQUIRE(cells.size() == header.size());
    const int m = std::stoi(cells[1]);
    StructuredCode code = cells[0] == "small" ? build_small_ancilla(s.sol, m)
                                              : build_random_free(s.sol, m, std::stoull(cells[2]));
    if (cells[0] == "random" && rows % 3) CHECK(std::stoull(cells[2]) > last_seed);
    if (cells[0] == "random") last_seed = std::stoull(cells[2]);
    auto dyn = logical_rates(code, s.gauged);
    CHECK(std::stod(cells[3]) == dyn.gamma_L);
    CHECK(std::stod(cells[4]) == dyn.signal);
    CHECK(std::stod(cells[6]) == predicted_qfi(dyn, 2, 0.5));
    CHECK(std::stod(cells[7]) == predicted_qfi(dyn, 2, 1.0));
    ++rows;
  }
  CHECK(rows == 2 * 3 + 2);
}

TEST_CASE("scan records failures per point and continues") {
  auto s = setup(fixtures::qutrit_model());
  // m = 2 is below the construction minimum.
  auto recs = ex::gamma_scan(s.model, s.sol, s.gauged, {"small"}, {2, 4}, {}, {1.0}, 1);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].status != "ok");
  CHECK(recs[1].status == "ok");
}

TEST_CASE("feasible random ladder stops at the enumeration cap") {
  auto s = setup(fixtures::generic_hl_model());
  auto ladder = ex::feasible_random_ladder(s.sol, {4, 8, 12, 16, 20, 40});
  REQUIRE(!ladder.empty());
  CHECK(ladder.front() == 4);
  CHECK(ladder.size() < 6);
  for (int m : ladder) {
    auto c = build_random_free(s.sol, m, 0);
    CHECK(c.string_count(0) <= multiset::kEnumerationCap);
    CHECK(c.string_count(1) <= multiset::kEnumerationCap);
  }
}

TEST_CASE("gamma-scan subcommand writes both CSVs") {
  ex::ExperimentConfig cfg;
  cfg.out_dir = scratch_dir("scan");
  cfg.model_path = fixture("generic_d3_r2.json");
  cfg.code = "both";
  cfg.m_ladder = {4, 8};
  cfg.seeds = {0, 1, 2, 3};
  auto rep = ex::cmd_gamma_scan(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.data["failed_points"] == 0);
  CHECK(slurp(cfg.out_dir + "/gamma_scan.csv").find("wall") == std::string::npos);
  CHECK(slurp(cfg.out_dir + "/gamma_scan_timing.csv").find("wall_time_s") != std::string::npos);

  cfg.model_path = fixture("qubit_dephasing.json");
  CHECK(ex::cmd_gamma_scan(cfg).exit_code == ex::kExitBadInput);
  cfg.model_path = fixture("qutrit.json");
  cfg.m_ladder = {8, 4};
  CHECK(ex::cmd_gamma_scan(cfg).exit_code == ex::kExitBadInput);
}

TEST_CASE("trend analysis flags growth") {
  auto s = setup(fixtures::generic_hl_model());
  std::vector<ex::ScanRecord> recs;
  for (int m : {4, 8, 16}) {
    ex::ScanRecord r;
    r.code = "small";
    r.m = m;
    r.gamma_L = 0.01 * m;
    r.signal = m * 2 * s.sol.value;
    r.signal_per_m = 2 * s.sol.value;
    recs.push_back(r);
  }
  auto tr = ex::analyse_trends(recs, s.sol, s.model);
  CHECK(tr.reference_m == 8);
  CHECK(tr.envelope == doctest::Approx(0.16));
  CHECK(tr.small_bounded);
  CHECK_FALSE(tr.no_growth);
  CHECK(tr.signal_band);
  recs[2].gamma_L = 1.0;
  tr = ex::analyse_trends(recs, s.sol, s.model);
  CHECK_FALSE(tr.small_bounded);
}

TEST_CASE("simulate subcommand matches the prediction at small size") {
  ex::ExperimentConfig cfg;
  cfg.out_dir = scratch_dir("simulate");
  cfg.model_path = fixture("qutrit.json");
  cfg.code = "ancilla";
  cfg.t = 0.5;
  cfg.n = 2;
  auto rep = ex::cmd_simulate(cfg);
  REQUIRE(rep.exit_code == 0);
  // Noiseless logical qubits: QFI = n^2 signal^2 t^2.
  CHECK(rep.data["predicted_qfi"].get<double>() == doctest::Approx(1.0));
  // The only deviation is the first-order interleaving error.
  const double dev = rep.data["relative_deviation"].get<double>();
  CHECK(dev <= 10 * cfg.dt * cfg.t);
  cfg.dt /= 2;
  auto half = ex::cmd_simulate(cfg);
  CHECK(dev / half.data["relative_deviation"].get<double>() == doctest::Approx(2.0).epsilon(0.25));
  cfg.dt *= 2;
  const std::string csv = slurp(cfg.out_dir + "/simulate_trajectory.csv");
  CHECK(csv.rfind(std::string("# ") + io::kCsvVersion, 0) == 0);
  cfg.model_path = fixture("qubit_dephasing.json");
  CHECK(ex::cmd_simulate(cfg).exit_code != 0);
  cfg.model_path = fixture("qutrit.json");
  cfg.dt = 0.3;
  CHECK(ex::cmd_simulate(cfg).exit_code == ex::kExitBadInput);
}

TEST_CASE("validate: fast suite passes, corrupted code fails") {
  ex::ExperimentConfig cfg;
  cfg.out_dir = scratch_dir("validate");
  auto rep = ex::cmd_validate(cfg);
  CHECK(rep.exit_code == 0);
  CHECK(rep.data["failed"] == 0);
  cfg.code_path = fixture("corrupted_code.json");
  rep = ex::cmd_validate(cfg);
  CHECK(rep.exit_code == 1);
  cfg.suite = "huge";
  CHECK(ex::cmd_validate(cfg).exit_code == ex::kExitBadInput);
}
