#pragma once
// JSON and CSV serialisation. Complex entries are [re, im] pairs; matrices are
// arrays of rows.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpqec/code_factory.hpp"
#include "mpqec/hnls_solver.hpp"
#include "mpqec/logical_dynamics.hpp"
#include "mpqec/simulation.hpp"

namespace mpqec::io {

using json = nlohmann::json;

json to_json(const CMatrix& m);
json to_json(const CVector& v);
CMatrix matrix_from_json(const json& j);
CVector vector_from_json(const json& j);

json model_to_json(const NoiseModel& model);
// Missing fields raise InvalidInput; shape or Hermiticity problems ShapeError.
NoiseModel model_from_json(const json& j);
NoiseModel load_model(const std::string& path);
void save_json(const json& j, const std::string& path);
json load_json(const std::string& path);

json solution_to_json(const HnlsSolution& sol);
json sql_to_json(const SqlCoefficient& sql);

json code_to_json(const StructuredCode& code);
StructuredCode code_from_json(const json& j);
json dense_code_to_json(const DenseCode& code);
DenseCode dense_code_from_json(const json& j);

json dynamics_to_json(const LogicalDynamics& dyn);

// Fixed-precision CSV: a versioned comment line, a column header, then rows.
// Numbers use 17 significant digits so rows round-trip exactly.
inline constexpr const char* kCsvVersion = "mpqec-csv/1";

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::string& schema, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  static std::string num(double x);

 private:
  std::ostream& out_;
  std::size_t width_;
};

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj);

}  // namespace mpqec::io
