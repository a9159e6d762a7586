#pragma once
// Subcommands of the command-line harness. Each returns a report with an exit
// code, a JSON payload and a plain-text summary, and writes its files into the
// resolved output directory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpqec/code_factory.hpp"
#include "mpqec/logical_dynamics.hpp"

namespace mpqec::experiments {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 1;
inline constexpr int kExitSolver = 2;

struct ExperimentConfig {
  std::string model_path;
  std::string code = "small";  // small | random | ancilla | both (scan only)
  std::string code_path;       // validate: extra code file for the orthogonality check
  std::vector<int> m_ladder;
  std::vector<std::uint64_t> seeds;
  std::vector<double> t_grid{0.5, 1.0};
  int m = 4;
  int n = 1;
  double t = 1.0;
  double dt = 1e-3;
  double omega = 0.0;
  int stride = 100;
  std::string suite = "fast";
  std::string out_dir;  // empty: MPQEC_OUT_DIR, then ./mpqec_out
  double tol_scale = 1.0;

  Tolerance tol() const { return Tolerance{}.scaled(tol_scale); }
};

// Creates the directory if needed.
std::string resolve_output_dir(const ExperimentConfig& cfg);

struct Report {
  int exit_code = kExitOk;
  nlohmann::json data;
  std::string summary;
};

Report cmd_hnls(const ExperimentConfig& cfg);
Report cmd_qutrit_demo(const ExperimentConfig& cfg);
Report cmd_gamma_scan(const ExperimentConfig& cfg);
Report cmd_simulate(const ExperimentConfig& cfg);
Report cmd_validate(const ExperimentConfig& cfg);

struct ScanRecord {
  std::string code;
  int m = 0;
  std::optional<std::uint64_t> seed;
  double gamma_L = 0.0;
  double signal = 0.0;
  double signal_per_m = 0.0;
  std::vector<double> qfi;  // predicted QFI at the t grid
  double wall_time = 0.0;
  std::string status = "ok";
};

// Largest packable, enumerable random-code ladder prefix.
std::vector<int> feasible_random_ladder(const HnlsSolution& sol, const std::vector<int>& ladder);

// One record per (code, m, seed), computed in a work pool and returned sorted.
std::vector<ScanRecord> gamma_scan(const NoiseModel& model, const HnlsSolution& sol, const GaugedModel& gauged,
                                   const std::vector<std::string>& codes, const std::vector<int>& ladder,
                                   const std::vector<std::uint64_t>& seeds, const std::vector<double>& t_grid,
                                   int n, const Tolerance& tol = {});

// Deterministic CSV (no wall time) and the separate timing CSV.
void write_scan_csv(std::ostream& out, const std::vector<ScanRecord>& records, const std::vector<double>& t_grid);
void write_timing_csv(std::ostream& out, const std::vector<ScanRecord>& records);

struct LinearFit {
  double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Boundedness and convergence checks over a scan.
struct TrendReport {
  int reference_m = 0;
  double envelope = 0.0;          // 2 gamma_L(small, reference_m)
  bool small_bounded = true;
  LinearFit small_fit;
  bool no_growth = true;          // slope - 2 SE <= 0
  double hl_signal = 0.0;         // 2 ||H - S||
  double c_bound = 0.0;           // sum_i |<phi_i|H|phi_i>|
  double c_fitted = 0.0;          // least-squares C in |signal/m - hl| = C/m
  bool signal_band = true;
  std::vector<std::pair<int, double>> random_fraction;  // (m, share of seeds within envelope)
  bool random_concentrated = true;
  std::vector<std::string> flags;
};

TrendReport analyse_trends(const std::vector<ScanRecord>& records, const HnlsSolution& sol, const NoiseModel& model);

}  // namespace mpqec::experiments
