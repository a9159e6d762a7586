#include "mpqec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpqec/code_view.hpp"
#include "mpqec/fixtures.hpp"
#include "mpqec/hnls_solver.hpp"
#include "mpqec/io.hpp"
#include "mpqec/kernels.hpp"
#include "mpqec/multiset.hpp"
#include "mpqec/simulation.hpp"

namespace mpqec::experiments {

using nlohmann::json;

std::string resolve_output_dir(const ExperimentConfig& cfg) {
  std::string dir = cfg.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("MPQEC_OUT_DIR");
    dir = env && *env ? env : "mpqec_out";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

// Pass/fail bookkeeping shared by the demo and validate subcommands.
struct Checks {
  json rows = json::array();
  std::ostringstream text;
  int failed = 0;

  void add(const std::string& name, bool ok, const std::string& detail) {
    rows.push_back({{"check", name}, {"passed", ok}, {"detail", detail}});
    text << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failed;
  }

  template <class F>
  void run(const std::string& name, F&& f) {
    try {
      f(*this);
    } catch (const std::exception& e) {
      add(name, false, std::string("error: ") + e.what());
    }
  }
};

bool is_input_error(const Error& e) {
  return dynamic_cast<const InvalidInput*>(&e) || dynamic_cast<const ShapeError*>(&e) ||
         dynamic_cast<const DimensionTooLarge*>(&e);
}

CMatrix qutrit_q0() {
  CMatrix q = CMatrix::Zero(3, 3);
  q(0, 0) = 1.0 / std::sqrt(12.0);
  q(2, 2) = -1.0 / std::sqrt(12.0);
  return q;
}

double sign_free_distance(const CMatrix& a, const CMatrix& b) { return std::min(max_abs(a - b), max_abs(a + b)); }

DenseCode dense_code_for(const std::string& code, const HnlsSolution& sol, int m, std::uint64_t seed) {
  if (code == "ancilla") return build_ancilla_assisted(sol);
  if (code == "small") return materialize(build_small_ancilla(sol, m));
  if (code == "random") return materialize(build_random_free(sol, m, seed));
  throw InvalidInput("unknown code '" + code + "' (expected small, random or ancilla)");
}

CMatrix logical_plus() { return CMatrix::Constant(2, 2, 0.5); }

// Relative error of the simulated logical coherence against the closed-form
// channel at time t, starting from |+_L>.
double interleave_error(const NoiseModel& model, const DenseCode& c, const LogicalDynamics& dyn,
                        const RecoveryChannel& rec, double omega, double t, double dt) {
  EvolutionSpec spec{probe_generator(model, c.dims(), c.m), t, dt, omega, &rec};
  CMatrix t4 = logical_step_map(spec);
  CVector v(4);
  v << 0.5, 0.5, 0.5, 0.5;
  for (int k = 0; k < spec.steps(); ++k) v = t4 * v;
  CMatrix expect = predicted_logical_state(logical_plus(), dyn, omega, t);
  return std::abs(v(1) - expect(0, 1)) / std::abs(expect(0, 1));
}

}  // namespace

Report cmd_hnls(const ExperimentConfig& cfg) {
  Report rep;
  NoiseModel model;
  try {
    model = io::load_model(cfg.model_path);
  } catch (const Error& e) {
    rep.exit_code = kExitBadInput;
    rep.summary = std::string("bad input: ") + e.what() + '\n';
    return rep;
  }
  const Tolerance tol = cfg.tol();
  try {
    std::ostringstream s;
    rep.data = {{"model", model.label}, {"d", model.d}, {"r", model.r()}};
    if (hnls_holds(model, tol)) {
      HnlsSolution sol = solve_hnls(model, tol);
      rep.data["verdict"] = "HL";
      rep.data["value"] = sol.value;
      rep.data["solution"] = io::solution_to_json(sol);
      s << "verdict HL  ||H - S|| = " << fmt(sol.value, 10) << "  gap " << fmt(sol.gap, 3) << '\n';
    } else {
      SqlCoefficient sql = solve_sql_alpha(model, tol);
      rep.data["verdict"] = "SQL";
      rep.data["alpha"] = sql.alpha;
      rep.data["solution"] = io::sql_to_json(sql);
      s << "verdict SQL  alpha = " << fmt(sql.alpha, 10) << "  gap " << fmt(sql.gap, 3) << '\n';
    }
    rep.summary = s.str();
  } catch (const Error& e) {
    rep.exit_code = is_input_error(e) ? kExitBadInput : kExitSolver;
    rep.summary = std::string(e.what()) + '\n';
    return rep;
  }
  io::save_json(rep.data, resolve_output_dir(cfg) + "/hnls.json");
  return rep;
}

Report cmd_qutrit_demo(const ExperimentConfig& cfg) {
  Report rep;
  Checks ck;
  const NoiseModel model = fixtures::qutrit_model();
  const HnlsSolution sol = solve_hnls(model, cfg.tol());
  const GaugedModel gauged = apply_gauge(model, sol.rho0, sol.rho1);
  ck.add("hnls value", std::abs(sol.value - 0.5) <= 1e-6, "||H - S|| = " + fmt(sol.value, 12));

  const DenseCode c11 = build_ancilla_assisted(sol);
  const StructuredCode c41 = build_small_ancilla(sol, 4);
  const LogicalDynamics d11 = logical_rates(c11, gauged, cfg.tol());
  const LogicalDynamics d41 = logical_rates(c41, gauged, cfg.tol());
  ck.add("(1,1) code gamma_L", std::abs(d11.gamma_L) <= 1e-8, "gamma_L = " + fmt(d11.gamma_L, 3));
  ck.add("(4,1) code gamma_L", std::abs(d41.gamma_L) <= 1e-8, "gamma_L = " + fmt(d41.gamma_L, 3));
  ck.add("(4,1) code signal", std::abs(d41.signal - 4.0) <= 1e-8, "signal = " + fmt(d41.signal, 12));

  auto view = make_view(c41);
  QecReport qec = check_qec_condition(*view, model, std::array<CMatrix, 2>{sol.rho0, sol.rho1});
  double qdist = qec.Q[0] ? sign_free_distance(*qec.Q[0], qutrit_q0()) : 1.0;
  ck.add("(4,1) QEC condition", qec.satisfied && qec.max_residual <= 1e-8,
         "residual " + fmt(qec.max_residual, 3));
  ck.add("(4,1) Q_0 = (|0><0| - |2><2|)/sqrt 12", qdist <= 1e-8, "distance " + fmt(qdist, 3));

  json table = json::array();
  std::ostringstream tt;
  tt << "N_U      t   F(1,1)   F(4,1)\n";
  for (int nu : {10, 20})
    for (double t : {0.0, 0.5, 1.0}) {
      double f11 = resource_qfi(d11, 2, nu, t), f41 = resource_qfi(d41, 5, nu, t);
      double e11 = 0.25 * nu * nu * t * t, e41 = 16.0 / 25.0 * nu * nu * t * t;
      bool ok = std::abs(f11 - e11) <= 1e-10 * nu * nu && std::abs(f41 - e41) <= 1e-10 * nu * nu;
      table.push_back({{"N_U", nu}, {"t", t}, {"qfi_11", f11}, {"qfi_41", f41}, {"ok", ok}});
      tt << nu << "  " << t << "  " << fmt(f11, 10) << "  " << fmt(f41, 10) << '\n';
      ck.add("QFI table N_U=" + std::to_string(nu) + " t=" + fmt(t), ok,
             fmt(f11, 10) + " vs " + fmt(e11, 10) + ", " + fmt(f41, 10) + " vs " + fmt(e41, 10));
    }
  rep.data = {{"checks", ck.rows},
              {"qfi_table", table},
              {"dynamics_11", io::dynamics_to_json(d11)},
              {"dynamics_41", io::dynamics_to_json(d41)},
              {"Q0", qec.Q[0] ? io::to_json(*qec.Q[0]) : json()}};
  rep.summary = ck.text.str() + tt.str();
  rep.exit_code = std::min(ck.failed, 100);
  io::save_json(rep.data, resolve_output_dir(cfg) + "/qutrit_demo.json");
  return rep;
}

std::vector<int> feasible_random_ladder(const HnlsSolution& sol, const std::vector<int>& ladder) {
  std::vector<int> out;
  const int bits = kernels::bits_for(static_cast<int>(sol.basis.rows()));
  for (int m : ladder) {
    if (m < 3 || m * bits > 64) break;
    bool ok = true;
    try {
      StructuredCode c = build_random_free(sol, m, 0);
      ok = c.string_count(0) <= multiset::kEnumerationCap && c.string_count(1) <= multiset::kEnumerationCap;
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) break;
    out.push_back(m);
  }
  return out;
}

std::vector<ScanRecord> gamma_scan(const NoiseModel& model, const HnlsSolution& sol, const GaugedModel& gauged,
                                   const std::vector<std::string>& codes, const std::vector<int>& ladder,
                                   const std::vector<std::uint64_t>& seeds, const std::vector<double>& t_grid,
                                   int n, const Tolerance& tol) {
  (void)model;
  std::vector<ScanRecord> points;
  for (const auto& code : codes)
    for (int m : ladder) {
      if (code == "small") {
        ScanRecord r;
        r.code = code;
        r.m = m;
        points.push_back(r);
      } else if (code == "random") {
        for (auto s : seeds) {
          ScanRecord r;
          r.code = code;
          r.m = m;
          r.seed = s;
          points.push_back(r);
        }
      } else {
        throw InvalidInput("scan code must be small or random");
      }
    }
  const long np = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (long p = 0; p < np; ++p) {
    ScanRecord& r = points[p];
    auto t0 = std::chrono::steady_clock::now();
    try {
      StructuredCode c = r.code == "small" ? build_small_ancilla(sol, r.m) : build_random_free(sol, r.m, *r.seed);
      LogicalDynamics dyn = logical_rates(c, gauged, tol, kernels::Exec::Serial);
      r.gamma_L = dyn.gamma_L;
      r.signal = dyn.signal;
      r.signal_per_m = dyn.signal / r.m;
      for (double t : t_grid) r.qfi.push_back(predicted_qfi(dyn, n, t));
    } catch (const std::exception& e) {
      r.status = e.what();
      r.qfi.assign(t_grid.size(), std::nan(""));
    }
    r.wall_time = seconds_since(t0);
  }
  std::sort(points.begin(), points.end(), [](const ScanRecord& a, const ScanRecord& b) {
    if (a.code != b.code) return a.code < b.code;
    if (a.m != b.m) return a.m < b.m;
    return a.seed.value_or(0) < b.seed.value_or(0);
  });
  return points;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRecord>& records, const std::vector<double>& t_grid) {
  std::vector<std::string> cols{"code", "m", "seed", "gamma_L", "signal", "signal_per_m"};
  for (double t : t_grid) cols.push_back("qfi_t" + io::CsvWriter::num(t));
  cols.push_back("status");
  io::CsvWriter w(out, "gamma_scan", cols);
  for (const auto& r : records) {
    std::vector<std::string> cells{r.code, std::to_string(r.m), r.seed ? std::to_string(*r.seed) : "",
                                   io::CsvWriter::num(r.gamma_L), io::CsvWriter::num(r.signal),
                                   io::CsvWriter::num(r.signal_per_m)};
    for (double f : r.qfi) cells.push_back(io::CsvWriter::num(f));
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    cells.push_back(status);
    w.row(cells);
  }
}

void write_timing_csv(std::ostream& out, const std::vector<ScanRecord>& records) {
  io::CsvWriter w(out, "gamma_scan_timing", {"code", "m", "seed", "wall_time_s"});
  for (const auto& r : records)
    w.row({r.code, std::to_string(r.m), r.seed ? std::to_string(*r.seed) : "", io::CsvWriter::num(r.wall_time)});
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidInput("least_squares needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = y[i] - f.intercept - f.slope * x[i];
      rss += e * e;
    }
    f.slope_se = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

TrendReport analyse_trends(const std::vector<ScanRecord>& records, const HnlsSolution& sol, const NoiseModel& model) {
  TrendReport tr;
  tr.hl_signal = 2.0 * sol.value;
  for (long i = 0; i < sol.basis.cols(); ++i)
    tr.c_bound += std::abs(sol.basis.col(i).dot(model.H * sol.basis.col(i)));
  std::vector<const ScanRecord*> small;
  for (const auto& r : records)
    if (r.code == "small" && r.status == "ok") small.push_back(&r);
  if (small.empty()) return tr;
  // Envelope from m = 8 when scanned, else the second ladder point.
  const ScanRecord* ref = small.size() > 1 ? small[1] : small[0];
  for (const auto* r : small)
    if (r->m == 8) ref = r;
  tr.reference_m = ref->m;
  tr.envelope = 2.0 * ref->gamma_L;
  const double slack = 1e-8;
  std::vector<double> ms, gs, inv, dev;
  for (const auto* r : small) {
    ms.push_back(r->m);
    gs.push_back(r->gamma_L);
    if (r->gamma_L > tr.envelope + slack) {
      tr.small_bounded = false;
      tr.flags.push_back("small m=" + std::to_string(r->m) + " gamma_L above envelope");
    }
    double d = std::abs(r->signal_per_m - tr.hl_signal);
    inv.push_back(1.0 / r->m);
    dev.push_back(d);
    if (d > tr.c_bound / r->m + slack) {
      tr.signal_band = false;
      tr.flags.push_back("small m=" + std::to_string(r->m) + " signal/m outside the C/m band");
    }
  }
  if (small.size() >= 2) {
    tr.small_fit = least_squares(ms, gs);
    tr.no_growth = tr.small_fit.slope - 2.0 * tr.small_fit.slope_se <= 0.0;
    if (!tr.no_growth) tr.flags.push_back("small-ancilla gamma_L grows with m");
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    num += inv[i] * dev[i];
    den += inv[i] * inv[i];
  }
  tr.c_fitted = num / den;
  std::vector<int> rms;
  for (const auto& r : records)
    if (r.code == "random" && std::find(rms.begin(), rms.end(), r.m) == rms.end()) rms.push_back(r.m);
  for (int m : rms) {
    int total = 0, within = 0;
    for (const auto& r : records)
      if (r.code == "random" && r.m == m) {
        ++total;
        if (r.status == "ok" && r.gamma_L <= tr.envelope + slack) ++within;
      }
    double share = total ? double(within) / total : 0.0;
    tr.random_fraction.push_back({m, share});
    if (share < 0.95) {
      tr.random_concentrated = false;
      tr.flags.push_back("random m=" + std::to_string(m) + " only " + fmt(100 * share, 4) + "% within envelope");
    }
  }
  return tr;
}

namespace {

json trend_json(const TrendReport& tr) {
  json rf = json::array();
  for (auto [m, s] : tr.random_fraction) rf.push_back({{"m", m}, {"share_within", s}});
  return {{"reference_m", tr.reference_m},   {"envelope", tr.envelope},     {"small_bounded", tr.small_bounded},
          {"slope", tr.small_fit.slope},     {"slope_se", tr.small_fit.slope_se},
          {"no_growth", tr.no_growth},       {"hl_signal", tr.hl_signal},   {"c_bound", tr.c_bound},
          {"c_fitted", tr.c_fitted},         {"signal_band", tr.signal_band}, {"random", rf},
          {"random_concentrated", tr.random_concentrated}, {"flags", tr.flags}};
}

void check_ladder(const std::vector<int>& ladder) {
  if (ladder.empty()) throw InvalidInput("m ladder is empty");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1]) throw InvalidInput("m ladder must be increasing");
}

}  // namespace

Report cmd_gamma_scan(const ExperimentConfig& cfg) {
  Report rep;
  NoiseModel model;
  try {
    model = io::load_model(cfg.model_path);
    check_ladder(cfg.m_ladder);
    if (!hnls_holds(model, cfg.tol())) throw InvalidInput("model is not HNLS; gamma-scan needs an HL model");
  } catch (const Error& e) {
    rep.exit_code = kExitBadInput;
    rep.summary = std::string("bad input: ") + e.what() + '\n';
    return rep;
  }
  HnlsSolution sol;
  GaugedModel gauged;
  try {
    sol = solve_hnls(model, cfg.tol());
    gauged = apply_gauge(model, sol.rho0, sol.rho1, cfg.tol());
  } catch (const Error& e) {
    rep.exit_code = kExitSolver;
    rep.summary = std::string(e.what()) + '\n';
    return rep;
  }
  std::vector<std::string> codes;
  if (cfg.code == "both") codes = {"random", "small"};
  else codes = {cfg.code};
  std::ostringstream s;
  std::vector<ScanRecord> records;
  for (const auto& code : codes) {
    std::vector<int> ladder = cfg.m_ladder;
    if (code == "random") {
      ladder = feasible_random_ladder(sol, cfg.m_ladder);
      s << "feasible random-code ladder:";
      for (int m : ladder) s << ' ' << m;
      s << '\n';
    }
    std::vector<std::uint64_t> seeds = cfg.seeds.empty() ? std::vector<std::uint64_t>{0} : cfg.seeds;
    try {
      auto part = gamma_scan(model, sol, gauged, {code}, ladder, seeds, cfg.t_grid, cfg.n, cfg.tol());
      records.insert(records.end(), part.begin(), part.end());
    } catch (const Error& e) {
      rep.exit_code = kExitBadInput;
      rep.summary = s.str() + "bad input: " + e.what() + '\n';
      return rep;
    }
  }
  std::sort(records.begin(), records.end(), [](const ScanRecord& a, const ScanRecord& b) {
    if (a.code != b.code) return a.code < b.code;
    if (a.m != b.m) return a.m < b.m;
    return a.seed.value_or(0) < b.seed.value_or(0);
  });
  const std::string dir = resolve_output_dir(cfg);
  {
    std::ofstream out(dir + "/gamma_scan.csv");
    write_scan_csv(out, records, cfg.t_grid);
    std::ofstream tim(dir + "/gamma_scan_timing.csv");
    write_timing_csv(tim, records);
  }
  TrendReport tr = analyse_trends(records, sol, model);
  int failures = 0;
  for (const auto& r : records) {
    if (r.status != "ok") ++failures;
    if (r.code == "small") s << "small  m=" << r.m << "  gamma_L=" << fmt(r.gamma_L) << "  signal/m=" << fmt(r.signal_per_m) << '\n';
  }
  for (auto [m, share] : tr.random_fraction)
    s << "random m=" << m << "  share within envelope " << fmt(100 * share, 4) << "%\n";
  for (const auto& f : tr.flags) s << "flag: " << f << '\n';
  if (failures) s << failures << " scan points failed; see status column\n";
  rep.data = {{"records", records.size()}, {"failed_points", failures}, {"trends", trend_json(tr)}};
  io::save_json(rep.data, dir + "/gamma_scan.json");
  rep.summary = s.str();
  return rep;
}

Report cmd_simulate(const ExperimentConfig& cfg) {
  Report rep;
  NoiseModel model;
  try {
    model = io::load_model(cfg.model_path);
    if (cfg.n < 1 || cfg.n > 6) throw InvalidInput("n must be between 1 and 6");
    if (cfg.stride < 1) throw InvalidInput("stride must be positive");
  } catch (const Error& e) {
    rep.exit_code = kExitBadInput;
    rep.summary = std::string("bad input: ") + e.what() + '\n';
    return rep;
  }
  try {
    const Tolerance tol = cfg.tol();
    HnlsSolution sol = solve_hnls(model, tol);
    GaugedModel gauged = apply_gauge(model, sol.rho0, sol.rho1, tol);
    DenseCode code = dense_code_for(cfg.code, sol, cfg.m, cfg.seeds.empty() ? 0 : cfg.seeds.front());
    LogicalDynamics dyn = logical_rates(code, gauged, tol);
    RecoveryChannel rec = build_optimal_recovery(code, gauged, tol);
    EvolutionSpec spec{probe_generator(model, code.dims(), code.m), cfg.t, cfg.dt, cfg.omega, &rec};
    const int steps = spec.steps();
    const double h = 1e-5;
    CMatrix maps[3];
    for (int k = 0; k < 3; ++k) {
      EvolutionSpec s = spec;
      s.omega = cfg.omega + (k - 1) * h;
      maps[k] = logical_step_map(s);
    }
    CVector g = ghz_state(cfg.n);
    CMatrix rho[3];
    for (auto& r : rho) r = g * g.adjoint();
    std::vector<TrajectoryPoint> traj;
    const long top = (1L << cfg.n) - 1;
    for (int step = 0; step <= steps; ++step) {
      if (step % cfg.stride == 0 || step == steps) {
        TrajectoryPoint p;
        p.t = step * cfg.dt;
        p.p0 = rho[1](0, 0).real();
        p.p1 = rho[1](top, top).real();
        p.coherence = std::abs(rho[1](0, top));
        CMatrix d = (rho[2] - rho[0]) / (2 * h);
        p.qfi = qfi(DensityMatrix((rho[1] + rho[1].adjoint()) / 2.0, 1e-6), HermitianMatrix((d + d.adjoint()) / 2.0),
                    tol).value;
        traj.push_back(p);
      }
      if (step < steps)
        for (int k = 0; k < 3; ++k)
          for (int b = 0; b < cfg.n; ++b) rho[k] = apply_block_map(maps[k], rho[k], b, cfg.n);
    }
    const std::string dir = resolve_output_dir(cfg);
    {
      std::ofstream out(dir + "/simulate_trajectory.csv");
      io::write_trajectory_csv(out, traj);
    }
    const double predicted = predicted_qfi(dyn, cfg.n, cfg.t);
    const double simulated = traj.back().qfi;
    rep.data = {{"code", cfg.code},
                {"m", code.m},
                {"n", cfg.n},
                {"t", cfg.t},
                {"dt", cfg.dt},
                {"dim", code.dim()},
                {"dynamics", io::dynamics_to_json(dyn)},
                {"predicted_qfi", predicted},
                {"simulated_qfi", simulated},
                {"relative_deviation", predicted > 0 ? std::abs(simulated - predicted) / predicted : 0.0}};
    io::save_json(rep.data, dir + "/simulate.json");
    std::ostringstream s;
    s << "code " << cfg.code << " m=" << code.m << " dim=" << code.dim() << "  gamma_L=" << fmt(dyn.gamma_L)
      << "  signal=" << fmt(dyn.signal) << '\n'
      << "QFI at t=" << cfg.t << ": simulated " << fmt(simulated, 8) << ", predicted " << fmt(predicted, 8) << '\n';
    rep.summary = s.str();
  } catch (const Error& e) {
    rep.exit_code = is_input_error(e) ? kExitBadInput : kExitSolver;
    rep.summary = std::string(e.what()) + '\n';
  }
  return rep;
}

Report cmd_validate(const ExperimentConfig& cfg) {
  Report rep;
  Checks ck;
  const Tolerance tol = cfg.tol();
  const bool full = cfg.suite == "full";
  if (cfg.suite != "fast" && !full) {
    rep.exit_code = kExitBadInput;
    rep.summary = "bad input: suite must be fast or full\n";
    return rep;
  }
  const NoiseModel qutrit = fixtures::qutrit_model();
  const NoiseModel generic = fixtures::generic_hl_model();
  HnlsSolution qs, gs;
  GaugedModel qg, gg;
  ck.run("hnls qutrit", [&](Checks& c) {
    qs = solve_hnls(qutrit, tol);
    qg = apply_gauge(qutrit, qs.rho0, qs.rho1, tol);
    c.add("hnls qutrit", std::abs(qs.value - 0.5) <= 1e-6, "value " + fmt(qs.value, 12));
  });
  ck.run("hnls generic", [&](Checks& c) {
    gs = solve_hnls(generic, tol);
    gg = apply_gauge(generic, gs.rho0, gs.rho1, tol);
    c.add("hnls generic", gs.gap <= 100 * tol.tau, "gap " + fmt(gs.gap, 3));
  });
  ck.run("sql dephasing alpha", [&](Checks& c) {
    auto sql = solve_sql_alpha(fixtures::qubit_dephasing_model(1.0), tol);
    c.add("sql dephasing alpha", std::abs(sql.alpha - 0.125) <= 1e-4, "alpha " + fmt(sql.alpha, 10));
  });
  ck.run("(4,1) code", [&](Checks& c) {
    auto code = build_small_ancilla(qs, 4);
    auto qec = check_qec_condition(*make_view(code), qutrit, std::array<CMatrix, 2>{qs.rho0, qs.rho1});
    double qd = qec.Q[0] ? sign_free_distance(*qec.Q[0], qutrit_q0()) : 1.0;
    c.add("(4,1) QEC condition and Q_0", qec.satisfied && qd <= 1e-8, "residual " + fmt(qec.max_residual, 3));
    auto dyn = logical_rates(code, qg, tol);
    c.add("(4,1) gamma_L and signal", std::abs(dyn.gamma_L) <= 1e-8 && std::abs(dyn.signal - 4) <= 1e-8,
          "gamma_L " + fmt(dyn.gamma_L, 3) + ", signal " + fmt(dyn.signal, 12));
  });
  ck.run("Gram trick vs explicit B", [&](Checks& c) {
    double worst = 0;
    for (int m : {3, 4}) {
      std::vector<DenseCode> codes{materialize(build_small_ancilla(gs, m)), materialize(build_random_free(gs, m, 1))};
      for (const auto& code : codes) {
        auto dyn = logical_rates(code, gg, tol);
        auto dims = code.dims();
        const auto& ls = gg.model.lindblads;
        const int r = static_cast<int>(ls.size());
        CMatrix x(code.dim(), m * r), y(code.dim(), m * r);
        for (int s = 0; s < m; ++s)
          for (int i = 0; i < r; ++i) {
            CVector l0 = kernels::apply_site(ls[i], s, dims, code.ket0);
            CVector l1 = kernels::apply_site(ls[i], s, dims, code.ket1);
            x.col(s * r + i) = l0 - code.ket0.dot(l0) * code.ket0;
            y.col(s * r + i) = l1 - code.ket1.dot(l1) * code.ket1;
          }
        Eigen::HouseholderQR<CMatrix> qx(x), qy(y);
        CMatrix ux = qx.householderQ() * CMatrix::Identity(code.dim(), x.cols());
        CMatrix uy = qy.householderQ() * CMatrix::Identity(code.dim(), y.cols());
        double tn = trace_norm((ux.adjoint() * x) * (y.adjoint() * uy));
        worst = std::max(worst, std::abs(tn - dyn.trace_norm_B));
      }
    }
    c.add("Gram trick vs explicit B", worst <= 1e-8, "max deviation " + fmt(worst, 3));
  });
  ck.run("optimal recovery", [&](Checks& c) {
    auto code = materialize(build_small_ancilla(gs, 3));
    auto dyn = logical_rates(code, gg, tol);
    auto rec = build_optimal_recovery(code, gg, tol);
    auto [gamma, beta] = recovery_rates(code, gg, rec);
    c.add("optimal recovery attains gamma_L", std::abs(gamma - dyn.gamma_L) <= 10 * tol.tau,
          "gamma(R) " + fmt(gamma, 10) + " vs " + fmt(dyn.gamma_L, 10));
  });
  ck.run("GHZ dephasing QFI", [&](Checks& c) {
    std::vector<int> ns = full ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{2};
    double worst = 0;
    for (int n : ns) {
      auto fam = [&](double w) {
        EvolutionSpec spec{probe_generator(fixtures::qubit_dephasing_model(0.1), std::vector<int>(n, 2), n), 1.0,
                           1e-3, w, nullptr};
        CVector g = ghz_state(n);
        return evolve_lindblad(DensityMatrix(g * g.adjoint()), spec, tol).matrix();
      };
      double f = qfi_central(fam, 0.0, 1e-5, tol).value, e = ghz_dephasing_qfi(n, 0.1, 1.0);
      worst = std::max(worst, std::abs(f - e) / e);
    }
    c.add("GHZ dephasing QFI", worst <= 1e-5, "max relative deviation " + fmt(worst, 3));
  });
  ck.run("interleaved QEC convergence", [&](Checks& c) {
    const int m = full ? 5 : 3;
    std::vector<double> dts = full ? std::vector<double>{1e-3, 5e-4} : std::vector<double>{2e-3, 1e-3};
    auto code = materialize(build_small_ancilla(qs, m));
    auto dyn = logical_rates(code, qg, tol);
    auto rec = build_optimal_recovery(code, qg, tol);
    double e1 = interleave_error(qutrit, code, dyn, rec, 1.0, 1.0, dts[0]);
    double e2 = interleave_error(qutrit, code, dyn, rec, 1.0, 1.0, dts[1]);
    double order = std::log2(e1 / e2);
    c.add("interleaved QEC convergence m=" + std::to_string(m), e2 <= 0.05 && std::abs(order - 1.0) <= 0.3,
          "errors " + fmt(e1, 4) + ", " + fmt(e2, 4) + ", order " + fmt(order, 4));
  });
  ck.run("ancilla bound and colouring", [&](Checks& c) {
    bool ok = true;
    int checked = 0;
    for (const HnlsSolution* sol : {&qs, &gs})
      for (int m = 3; m <= (full ? 10 : 7); ++m) {
        auto code = build_small_ancilla(*sol, m);
        if (code.coloring[0].empty()) color_ancilla(code);
        const long d = sol->basis.rows();
        ok = ok && code.ancilla_dim() <= d * d * m * m && code.palette <= palette_bound(code) &&
             palette_bound(code) <= d * d * m * m;
        for (int k = 0; k < 2; ++k)
          if (code.string_count(k) <= 1e4) ok = ok && multiset::is_proper(code.counts[k], code.coloring[k]);
        ++checked;
      }
    c.add("ancilla bound and colouring", ok, std::to_string(checked) + " codes");
  });
  if (full) {
    ck.run("scaling trends", [&](Checks& c) {
      std::vector<std::uint64_t> seeds;
      for (std::uint64_t s = 0; s < 100; ++s) seeds.push_back(s);
      auto small = gamma_scan(generic, gs, gg, {"small"}, {4, 8, 16, 24}, {}, {1.0}, 1, tol);
      auto rnd = gamma_scan(generic, gs, gg, {"random"}, {8, 12, 16}, seeds, {1.0}, 1, tol);
      small.insert(small.end(), rnd.begin(), rnd.end());
      auto tr = analyse_trends(small, gs, generic);
      c.add("scaling trends", tr.small_bounded && tr.no_growth && tr.signal_band && tr.random_concentrated,
            tr.flags.empty() ? "no flags" : tr.flags.front());
    });
  }
  if (!cfg.code_path.empty()) {
    ck.run("orthogonality of error spaces", [&](Checks& c) {
      StructuredCode code = io::code_from_json(io::load_json(cfg.code_path));
      NoiseModel model = cfg.model_path.empty() ? qutrit : io::load_model(cfg.model_path);
      auto rep0 = check_L0_perp_L1(code, model, tol.tau);
      c.add("orthogonality of error spaces (" + cfg.code_path + ")", rep0.orthogonal,
            "max overlap " + fmt(rep0.max_overlap, 3) + " via " + rep0.method);
    });
  }
  rep.data = {{"suite", cfg.suite}, {"checks", ck.rows}, {"failed", ck.failed}};
  rep.summary = ck.text.str() + std::to_string(ck.failed) + " failed\n";
  rep.exit_code = std::min(ck.failed, 100);
  io::save_json(rep.data, resolve_output_dir(cfg) + "/validate.json");
  return rep;
}

}  // namespace mpqec::experiments
