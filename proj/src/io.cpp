#include "mpqec/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace mpqec::io {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

cplx complex_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
    throw ShapeError("complex entries must be [re, im] pairs");
  return {e[0].get<double>(), e[1].get<double>()};
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const CVector& v) {
  json out = json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ShapeError("matrix must be a nonempty array of rows");
  const long rows = static_cast<long>(j.size());
  if (!j[0].is_array()) throw ShapeError("matrix rows must be arrays");
  const long cols = static_cast<long>(j[0].size());
  CMatrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<long>(j[i].size()) != cols) throw ShapeError("ragged matrix rows");
    for (long k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

CVector vector_from_json(const json& j) {
  if (!j.is_array()) throw ShapeError("vector must be an array");
  CVector v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v(i) = complex_from_json(j[i]);
  return v;
}

json model_to_json(const NoiseModel& model) {
  json ls = json::array();
  for (const auto& l : model.lindblads) ls.push_back(to_json(l));
  return {{"d", model.d}, {"H", to_json(model.H)}, {"lindblads", ls}, {"label", model.label}};
}

NoiseModel model_from_json(const json& j) {
  const int d = field(j, "d").get<int>();
  CMatrix h = matrix_from_json(field(j, "H"));
  const json& ls = field(j, "lindblads");
  if (!ls.is_array()) throw ShapeError("lindblads must be an array of matrices");
  std::vector<CMatrix> lind;
  for (const auto& l : ls) lind.push_back(matrix_from_json(l));
  if (h.rows() != d || h.cols() != d) throw ShapeError("H does not match the declared dimension d");
  std::string label = j.contains("label") ? j.at("label").get<std::string>() : std::string();
  return make_model(std::move(h), std::move(lind), std::move(label));
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("malformed JSON in '" + path + "': " + e.what());
  }
}

NoiseModel load_model(const std::string& path) {
  try {
    return model_from_json(load_json(path));
  } catch (const json::exception& e) {
    throw InvalidInput("bad model file '" + path + "': " + e.what());
  }
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  // One line per top-level field keeps matrices readable.
  if (!j.is_object()) {
    out << j.dump() << '\n';
    return;
  }
  out << "{\n";
  std::size_t i = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++i)
    out << "  " << json(it.key()).dump() << ": " << it.value().dump() << (i + 1 < j.size() ? ",\n" : "\n");
  out << "}\n";
}

json solution_to_json(const HnlsSolution& sol) {
  std::vector<double> lam(sol.lambdas.data(), sol.lambdas.data() + sol.lambdas.size());
  return {{"value", sol.value},       {"S_star", to_json(sol.S_star)}, {"rho0", to_json(sol.rho0)},
          {"rho1", to_json(sol.rho1)}, {"basis", to_json(sol.basis)},   {"lambdas", lam},
          {"d0", sol.d0},             {"d1", sol.d1},                  {"dual_value", sol.dual_value},
          {"gap", sol.gap},           {"iterations", sol.iterations}};
}

json sql_to_json(const SqlCoefficient& sql) {
  json h = json::array();
  for (auto z : sql.h) h.push_back(complex_to_json(z));
  return {{"alpha", sql.alpha},       {"h", h},         {"hh", to_json(sql.hh)},
          {"offset", sql.offset},     {"gap", sql.gap}, {"residual", sql.residual},
          {"iterations", sql.iterations}};
}

json code_to_json(const StructuredCode& code) {
  json j = {{"family", family_name(code.family)},
            {"m", code.m},
            {"d", code.d},
            {"counts", {code.counts[0], code.counts[1]}},
            {"bases", {to_json(code.bases[0]), to_json(code.bases[1])}},
            {"tagged", code.tagged},
            {"palette", code.palette},
            {"ancilla_dim", code.ancilla_dim()}};
  if (code.phases) {
    json p = {{"seed", code.phases->seed}};
    if (code.phases->has_table()) p["table"] = {code.phases->table[0], code.phases->table[1]};
    j["phases"] = p;
  }
  if (!code.coloring[0].empty() || !code.coloring[1].empty()) j["coloring"] = {code.coloring[0], code.coloring[1]};
  return j;
}

StructuredCode code_from_json(const json& j) {
  try {
    StructuredCode c;
    c.family = family_from_name(field(j, "family").get<std::string>());
    c.m = field(j, "m").get<int>();
    c.d = field(j, "d").get<int>();
    const json& counts = field(j, "counts");
    const json& bases = field(j, "bases");
    if (counts.size() != 2 || bases.size() != 2) throw ShapeError("counts and bases need one entry per codeword");
    for (int k = 0; k < 2; ++k) {
      c.counts[k] = counts[k].get<std::vector<int>>();
      c.bases[k] = matrix_from_json(bases[k]);
      if (static_cast<int>(c.counts[k].size()) != c.d || c.bases[k].rows() != c.d || c.bases[k].cols() != c.d)
        throw ShapeError("codeword " + std::to_string(k) + " does not match d");
      int total = 0;
      for (int n : c.counts[k]) total += n;
      if (total != c.m) throw ShapeError("letter counts do not sum to m");
    }
    c.tagged = j.value("tagged", c.family == CodeFamily::SqlSmall || c.family == CodeFamily::SqlRandom);
    c.palette = j.value("palette", 0);
    if (j.contains("phases")) {
      PhaseSpec p;
      p.seed = j["phases"].at("seed").get<std::uint64_t>();
      if (j["phases"].contains("table"))
        for (int k = 0; k < 2; ++k) p.table[k] = j["phases"]["table"][k].get<std::vector<double>>();
      c.phases = p;
    }
    if (j.contains("coloring"))
      for (int k = 0; k < 2; ++k) c.coloring[k] = j["coloring"][k].get<std::vector<int>>();
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad code description: ") + e.what());
  }
}

json dense_code_to_json(const DenseCode& code) {
  return {{"m", code.m},
          {"d", code.d},
          {"ancilla_dim", code.ancilla_dim},
          {"ket0", to_json(code.ket0)},
          {"ket1", to_json(code.ket1)}};
}

DenseCode dense_code_from_json(const json& j) {
  DenseCode c;
  c.m = field(j, "m").get<int>();
  c.d = field(j, "d").get<int>();
  c.ancilla_dim = field(j, "ancilla_dim").get<int>();
  c.ket0 = vector_from_json(field(j, "ket0"));
  c.ket1 = vector_from_json(field(j, "ket1"));
  if (c.ket0.size() != c.dim() || c.ket1.size() != c.dim()) throw ShapeError("codeword length does not match dims");
  return c;
}

json dynamics_to_json(const LogicalDynamics& dyn) {
  auto tables = [](const std::vector<CMatrix>& v) {
    json out = json::array();
    for (const auto& m : v) out.push_back(to_json(m));
    return out;
  };
  std::vector<double> mu(dyn.mu.data(), dyn.mu.data() + dyn.mu.size());
  return {{"m", dyn.m},
          {"r", dyn.r},
          {"signal", dyn.signal},
          {"offset_rotation", dyn.offset_rotation},
          {"gamma_L", dyn.gamma_L},
          {"beta_L", dyn.beta_L},
          {"term1", dyn.term1},
          {"term2", dyn.term2},
          {"trace_norm_B", dyn.trace_norm_B},
          {"mu", mu},
          {"b", {to_json(dyn.b[0]), to_json(dyn.b[1])}},
          {"a", {tables(dyn.a[0]), tables(dyn.a[1])}},
          {"eta", {tables(dyn.eta[0]), tables(dyn.eta[1])}}};
}

CsvWriter::CsvWriter(std::ostream& out, const std::string& schema, const std::vector<std::string>& columns)
    : out_(out), width_(columns.size()) {
  out_ << "# " << kCsvVersion << ' ' << schema << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw ShapeError("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
}

std::string CsvWriter::num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj) {
  CsvWriter w(out, "trajectory", {"t", "p0", "p1", "coherence", "qfi"});
  for (const auto& p : traj)
    w.row({CsvWriter::num(p.t), CsvWriter::num(p.p0), CsvWriter::num(p.p1), CsvWriter::num(p.coherence),
           CsvWriter::num(p.qfi)});
}

}  // namespace mpqec::io
