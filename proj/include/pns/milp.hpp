#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pns {

enum class RowSense : uint8_t { kLe, kGe, kEq };
enum class VarKind : uint8_t { kBinary, kContinuous };
enum class ObjSense : uint8_t { kMin, kMax };

constexpr double kInf = 1e30;  // bounds at or beyond this magnitude are infinite
constexpr double kDefaultFeasTol = 1e-6;

inline bool is_finite_bound(double v) { return v > -kInf && v < kInf; }

// One linear constraint. Coefficients are sparse, keyed by variable index,
// and must be finite and nonzero.
struct Row {
  std::string name;
  std::map<int, double> coeffs;
  double rhs = 0.0;
  RowSense sense = RowSense::kLe;
};

// Canonical in-memory MILP: minimize objective . x subject to the rows and
// bounds, with binary variables occupying indices [0, num_binary). Instances
// originally stated as maximization are stored negated with sense_flag kMax.
// Immutable by convention after construction; all operations on instances are
// pure functions.
struct MilpInstance {
  std::string name;
  int num_vars = 0;
  int num_binary = 0;
  ObjSense sense_flag = ObjSense::kMin;
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarKind> var_kind;
  std::vector<std::string> var_names;
  // Free-form annotations (generator provenance, search parameters). Not part
  // of structural equality and not persisted to MPS.
  std::map<std::string, std::string> meta;

  int num_rows() const { return static_cast<int>(rows.size()); }
  bool pure_binary() const { return num_binary == num_vars; }

  // Throws std::invalid_argument when a structural invariant is violated.
  void validate() const;

  double objective_value(std::span<const double> x) const;

  // Maps a canonical (minimization) objective value back to the sense the
  // instance was stated in.
  double to_original_sense(double min_form_value) const {
    return sense_flag == ObjSense::kMax ? -min_form_value : min_form_value;
  }
};

// Structural equality over all model data (names included, meta excluded).
// Coefficients compare exactly.
bool structurally_equal(const MilpInstance& a, const MilpInstance& b);

// A candidate assignment together with its evaluation against an instance.
struct Solution {
  std::vector<double> values;
  double objective = 0.0;
  bool feasible = false;
  bool integral = false;
};

Solution make_solution(const MilpInstance& inst, std::vector<double> values,
                       double tol = kDefaultFeasTol);

class MpsParseError : public std::runtime_error {
 public:
  MpsParseError(int line, const std::string& message)
      : std::runtime_error("mps parse error at line " + std::to_string(line) +
                           ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Reads free-form MPS (sections NAME/OBJSENSE/ROWS/COLUMNS/RHS/BOUNDS/ENDATA,
// INTORG/INTEND markers). Returns the canonical minimization instance with
// binary variables permuted to the front. Fixed-column MPS is not supported.
MilpInstance parse_mps(const std::string& text);

// Inverse of parse_mps on canonical instances: parse_mps(write_mps(i)) is
// structurally equal to i. Floats carry 17 significant digits.
std::string write_mps(const MilpInstance& inst);

// True iff every row is satisfied within tol, every bound holds within tol,
// and every binary component is within tol of {0, 1}.
bool check_feasible(const MilpInstance& inst, std::span<const double> x,
                    double tol = kDefaultFeasTol);

}  // namespace pns
