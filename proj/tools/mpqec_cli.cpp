#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpqec/errors.hpp"
#include "mpqec/experiments.hpp"

namespace {

namespace ex = mpqec::experiments;

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// "a..b" (inclusive) or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(s.substr(0, dots)), hi = std::stoull(s.substr(dots + 2));
    if (hi < lo) throw mpqec::InvalidInput("empty seed range '" + s + "'");
    for (std::uint64_t k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  for (int v : parse_ints(s)) {
    if (v < 0) throw mpqec::InvalidInput("seeds must be nonnegative");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    out.push_back(std::stod(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg-limit error correction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  ex::ExperimentConfig cfg;
  app.add_option("--tol", cfg.tol_scale, "Scale factor applied to every numerical tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out_dir, "Output directory (default: $MPQEC_OUT_DIR, then ./mpqec_out)");

  auto* hnls = app.add_subcommand("hnls", "Decide HNLS and report the HL or SQL coefficient");
  hnls->add_option("model", cfg.model_path, "Noise model JSON")->required();

  app.add_subcommand("qutrit-demo", "Qutrit worked example: codes, rates and resource QFI table");

  std::string ladder = "4,8,12", seeds = "0", tgrid = "0.5,1";
  auto* scan = app.add_subcommand("gamma-scan", "gamma_L and signal over an m ladder");
  scan->add_option("model", cfg.model_path, "Noise model JSON")->required();
  scan->add_option("--code", cfg.code, "small, random or both")->check(CLI::IsMember({"small", "random", "both"}));
  scan->add_option("--m", ladder, "Comma-separated increasing m ladder");
  scan->add_option("--seeds", seeds, "Random-code seeds, a..b or a comma list");
  scan->add_option("--t", tgrid, "Times for the predicted QFI columns");
  scan->add_option("--n", cfg.n, "Logical qubits in the predicted QFI");

  auto* sim = app.add_subcommand("simulate", "Brute-force interleaved evolution of an n-block GHZ state");
  sim->add_option("model", cfg.model_path, "Noise model JSON")->required();
  sim->add_option("--code", cfg.code, "small, random or ancilla")->check(CLI::IsMember({"small", "random", "ancilla"}));
  sim->add_option("--m", cfg.m, "Probes per logical qubit");
  sim->add_option("--n", cfg.n, "Logical qubits");
  sim->add_option("--t", cfg.t, "Total time");
  sim->add_option("--dt", cfg.dt, "Time step");
  sim->add_option("--omega", cfg.omega, "Signal value");
  sim->add_option("--stride", cfg.stride, "Steps between trajectory samples");
  sim->add_option("--seed", seeds, "Phase seed for the random code");

  auto* val = app.add_subcommand("validate", "Run the built-in verification suite");
  val->add_option("--suite", cfg.suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  val->add_option("--code", cfg.code_path, "Code JSON checked for orthogonality of its error spaces");
  val->add_option("--model", cfg.model_path, "Model used with --code (default: qutrit)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ex::kExitBadInput;
  }

  ex::Report rep;
  try {
    if (*scan) {
      cfg.m_ladder = parse_ints(ladder);
      cfg.seeds = parse_seeds(seeds);
      cfg.t_grid = parse_doubles(tgrid);
    }
    if (*sim) cfg.seeds = parse_seeds(seeds);
    if (*hnls) rep = ex::cmd_hnls(cfg);
    else if (app.got_subcommand("qutrit-demo")) rep = ex::cmd_qutrit_demo(cfg);
    else if (*scan) rep = ex::cmd_gamma_scan(cfg);
    else if (*sim) rep = ex::cmd_simulate(cfg);
    else rep = ex::cmd_validate(cfg);
  } catch (const mpqec::InvalidInput& e) {
    std::cerr << e.what() << '\n';
    return ex::kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad number: " << e.what() << '\n';
    return ex::kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return ex::kExitSolver;
  }
  std::cout << rep.summary;
  return rep.exit_code;
}
