#include "pns/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pns {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, int line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || errno == ERANGE || !std::isfinite(v)) {
    throw MpsParseError(line, "invalid numeric value '" + tok + "'");
  }
  return v;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

enum class Section { kNone, kName, kObjSense, kRows, kColumns, kRhs, kBounds };

struct ParsedVar {
  std::string name;
  double obj = 0.0;
  double lo = 0.0;
  double up = kInf;
  bool integer = false;
  bool lo_set = false;
  bool up_set = false;
};

}  // namespace

void MilpInstance::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid instance: " + msg); };
  const size_t n = static_cast<size_t>(num_vars);
  if (num_vars < 0 || num_binary < 0 || num_binary > num_vars) fail("bad variable counts");
  if (objective.size() != n || lower.size() != n || upper.size() != n ||
      var_kind.size() != n || var_names.size() != n) {
    fail("field sizes disagree with num_vars");
  }
  std::unordered_set<std::string> seen;
  for (int j = 0; j < num_vars; ++j) {
    if (!std::isfinite(objective[j])) fail("objective coefficient not finite");
    if (std::isnan(lower[j]) || std::isnan(upper[j])) fail("NaN bound");
    if (lower[j] > upper[j]) fail("lower bound exceeds upper bound for " + var_names[j]);
    const bool binary = j < num_binary;
    if (binary != (var_kind[j] == VarKind::kBinary)) fail("binary variables must occupy the leading indices");
    if (binary) {
      if ((lower[j] != 0.0 && lower[j] != 1.0) || (upper[j] != 0.0 && upper[j] != 1.0)) {
        fail("binary variable " + var_names[j] + " has bounds outside {0,1}");
      }
    }
    if (var_names[j].empty()) fail("empty variable name");
    if (!seen.insert(var_names[j]).second) fail("duplicate variable name " + var_names[j]);
  }
  seen.clear();
  for (const Row& row : rows) {
    if (row.name.empty()) fail("empty row name");
    if (!seen.insert(row.name).second) fail("duplicate row name " + row.name);
    if (!std::isfinite(row.rhs)) fail("rhs not finite");
    for (const auto& [j, coeff] : row.coeffs) {
      if (j < 0 || j >= num_vars) fail("coefficient index out of range");
      if (!std::isfinite(coeff) || coeff == 0.0) fail("coefficients must be finite and nonzero");
    }
  }
}

double MilpInstance::objective_value(std::span<const double> x) const {
  double v = 0.0;
  for (int j = 0; j < num_vars; ++j) v += objective[j] * x[j];
  return v;
}

bool structurally_equal(const MilpInstance& a, const MilpInstance& b) {
  if (a.name != b.name || a.num_vars != b.num_vars || a.num_binary != b.num_binary ||
      a.sense_flag != b.sense_flag || a.objective != b.objective ||
      a.lower != b.lower || a.upper != b.upper || a.var_kind != b.var_kind ||
      a.var_names != b.var_names || a.rows.size() != b.rows.size()) {
    return false;
  }
  for (size_t i = 0; i < a.rows.size(); ++i) {
    const Row& ra = a.rows[i];
    const Row& rb = b.rows[i];
    if (ra.name != rb.name || ra.rhs != rb.rhs || ra.sense != rb.sense ||
        ra.coeffs != rb.coeffs) {
      return false;
    }
  }
  return true;
}

bool check_feasible(const MilpInstance& inst, std::span<const double> x, double tol) {
  if (x.size() != static_cast<size_t>(inst.num_vars)) {
    throw std::invalid_argument("check_feasible: expected " + std::to_string(inst.num_vars) +
                                " values, got " + std::to_string(x.size()));
  }
  for (int j = 0; j < inst.num_vars; ++j) {
    if (x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol) return false;
    if (j < inst.num_binary) {
      const double r = std::round(x[j]);
      if ((r != 0.0 && r != 1.0) || std::abs(x[j] - r) > tol) return false;
    }
  }
  for (const Row& row : inst.rows) {
    double act = 0.0;
    for (const auto& [j, coeff] : row.coeffs) act += coeff * x[j];
    switch (row.sense) {
      case RowSense::kLe:
        if (act > row.rhs + tol) return false;
        break;
      case RowSense::kGe:
        if (act < row.rhs - tol) return false;
        break;
      case RowSense::kEq:
        if (std::abs(act - row.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

Solution make_solution(const MilpInstance& inst, std::vector<double> values, double tol) {
  Solution s;
  s.objective = inst.objective_value(values);
  s.feasible = check_feasible(inst, values, tol);
  s.integral = true;
  for (int j = 0; j < inst.num_binary; ++j) {
    const double r = std::round(values[j]);
    if ((r != 0.0 && r != 1.0) || std::abs(values[j] - r) > tol) {
      s.integral = false;
      break;
    }
  }
  s.values = std::move(values);
  return s;
}

MilpInstance parse_mps(const std::string& text) {
  std::vector<ParsedVar> vars;
  std::unordered_map<std::string, int> var_index;
  std::vector<Row> rows;  // constraint rows, objective handled separately
  std::unordered_map<std::string, int> row_index;
  std::string obj_row_name;
  std::string instance_name;
  bool maximize = false;
  bool in_integer_block = false;
  bool saw_endata = false;
  bool objsense_pending = false;
  std::map<std::string, std::string> meta;
  std::unordered_set<int64_t> seen_entries;  // (row+1) * 2^32 + col for duplicate detection

  auto var_of = [&](const std::string& name) -> int {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    const int idx = static_cast<int>(vars.size());
    ParsedVar v;
    v.name = name;
    v.integer = in_integer_block;
    if (v.integer) v.up = 1.0;  // integer defaults are binary [0,1]
    vars.push_back(std::move(v));
    var_index.emplace(name, idx);
    return idx;
  };

  Section section = Section::kNone;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') {
      // "* META <key> <value...>" comments carry instance metadata.
      std::vector<std::string> ctoks = tokenize(line);
      if (ctoks.size() >= 3 && ctoks[0] == "*" && ctoks[1] == "META") {
        std::string value = ctoks.size() > 3 ? ctoks[3] : "";
        for (size_t i = 4; i < ctoks.size(); ++i) value += " " + ctoks[i];
        meta.emplace(ctoks[2], std::move(value));
      }
      continue;
    }

    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;

    if (header) {
      const std::string key = upper(toks[0]);
      if (key == "NAME") {
        instance_name = toks.size() > 1 ? toks[1] : "";
        section = Section::kName;
      } else if (key == "OBJSENSE") {
        section = Section::kObjSense;
        if (toks.size() > 1) {
          const std::string v = upper(toks[1]);
          maximize = (v == "MAX" || v == "MAXIMIZE");
          if (!maximize && v != "MIN" && v != "MINIMIZE") {
            throw MpsParseError(lineno, "unknown objective sense '" + toks[1] + "'");
          }
        } else {
          objsense_pending = true;
        }
      } else if (key == "ROWS") {
        section = Section::kRows;
      } else if (key == "COLUMNS") {
        section = Section::kColumns;
      } else if (key == "RHS") {
        section = Section::kRhs;
      } else if (key == "BOUNDS") {
        section = Section::kBounds;
      } else if (key == "ENDATA") {
        saw_endata = true;
        break;
      } else {
        throw MpsParseError(lineno, "unsupported section '" + toks[0] + "'");
      }
      continue;
    }

    switch (section) {
      case Section::kObjSense: {
        if (!objsense_pending) throw MpsParseError(lineno, "unexpected data in OBJSENSE");
        const std::string v = upper(toks[0]);
        maximize = (v == "MAX" || v == "MAXIMIZE");
        if (!maximize && v != "MIN" && v != "MINIMIZE") {
          throw MpsParseError(lineno, "unknown objective sense '" + toks[0] + "'");
        }
        objsense_pending = false;
        break;
      }
      case Section::kRows: {
        if (toks.size() != 2) throw MpsParseError(lineno, "ROWS entries need a type and a name");
        const std::string type = upper(toks[0]);
        const std::string& name = toks[1];
        if (type == "N") {
          if (!obj_row_name.empty()) throw MpsParseError(lineno, "multiple objective rows");
          obj_row_name = name;
        } else if (type == "L" || type == "G" || type == "E") {
          if (row_index.count(name) || name == obj_row_name) {
            throw MpsParseError(lineno, "duplicate row name " + name);
          }
          Row row;
          row.name = name;
          row.sense = type == "L" ? RowSense::kLe : type == "G" ? RowSense::kGe : RowSense::kEq;
          row_index.emplace(name, static_cast<int>(rows.size()));
          rows.push_back(std::move(row));
        } else {
          throw MpsParseError(lineno, "unknown row type '" + toks[0] + "'");
        }
        break;
      }
      case Section::kColumns: {
        // Marker lines toggle the integrality block.
        if (toks.size() >= 3 && toks[1] == "'MARKER'") {
          const std::string& mark = toks[2];
          if (mark == "'INTORG'") {
            in_integer_block = true;
          } else if (mark == "'INTEND'") {
            in_integer_block = false;
          } else {
            throw MpsParseError(lineno, "unknown marker " + mark);
          }
          break;
        }
        if (toks.size() < 3 || toks.size() % 2 == 0) {
          throw MpsParseError(lineno, "COLUMNS entries need a column name and (row, value) pairs");
        }
        const int j = var_of(toks[0]);
        for (size_t i = 1; i + 1 < toks.size(); i += 2) {
          const std::string& row_name = toks[i];
          const double value = parse_number(toks[i + 1], lineno);
          if (row_name == obj_row_name && !obj_row_name.empty()) {
            const int64_t key = -1ll * (1ll << 32) + j;
            if (!seen_entries.insert(key).second) {
              throw MpsParseError(lineno, "duplicate objective entry for column " + toks[0]);
            }
            vars[j].obj = value;
            continue;
          }
          auto it = row_index.find(row_name);
          if (it == row_index.end()) throw MpsParseError(lineno, "unknown row '" + row_name + "'");
          const int64_t key = (static_cast<int64_t>(it->second) + 1) * (1ll << 32) + j;
          if (!seen_entries.insert(key).second) {
            throw MpsParseError(lineno, "duplicate coefficient for (" + row_name + ", " + toks[0] + ")");
          }
          if (value != 0.0) rows[it->second].coeffs.emplace(j, value);
        }
        break;
      }
      case Section::kRhs: {
        if (toks.size() < 3 || toks.size() % 2 == 0) {
          throw MpsParseError(lineno, "RHS entries need a set name and (row, value) pairs");
        }
        for (size_t i = 1; i + 1 < toks.size(); i += 2) {
          const std::string& row_name = toks[i];
          const double value = parse_number(toks[i + 1], lineno);
          if (row_name == obj_row_name && !obj_row_name.empty()) {
            throw MpsParseError(lineno, "objective-row RHS entries are not supported");
          }
          auto it = row_index.find(row_name);
          if (it == row_index.end()) throw MpsParseError(lineno, "unknown row '" + row_name + "'");
          rows[it->second].rhs = value;
        }
        break;
      }
      case Section::kBounds: {
        if (toks.size() < 3) throw MpsParseError(lineno, "BOUNDS entries need a type, set name and column");
        const std::string type = upper(toks[0]);
        auto it = var_index.find(toks[2]);
        if (it == var_index.end()) throw MpsParseError(lineno, "unknown column '" + toks[2] + "'");
        ParsedVar& v = vars[it->second];
        auto value = [&]() -> double {
          if (toks.size() < 4) throw MpsParseError(lineno, "bound type " + type + " needs a value");
          return parse_number(toks[3], lineno);
        };
        if (type == "LO") {
          v.lo = value();
          v.lo_set = true;
        } else if (type == "UP") {
          v.up = value();
          v.up_set = true;
        } else if (type == "FX") {
          v.lo = v.up = value();
          v.lo_set = v.up_set = true;
        } else if (type == "FR") {
          v.lo = -kInf;
          v.up = kInf;
          v.lo_set = v.up_set = true;
        } else if (type == "MI") {
          v.lo = -kInf;
          v.lo_set = true;
        } else if (type == "PL") {
          v.up = kInf;
          v.up_set = true;
        } else if (type == "BV") {
          v.integer = true;
          v.lo = 0.0;
          v.up = 1.0;
          v.lo_set = v.up_set = true;
        } else {
          throw MpsParseError(lineno, "unsupported bound type '" + toks[0] + "'");
        }
        break;
      }
      case Section::kName:
        throw MpsParseError(lineno, "unexpected data after NAME");
      case Section::kNone:
        throw MpsParseError(lineno, "data before any section header");
    }
  }
  if (!saw_endata) throw MpsParseError(lineno, "missing ENDATA");
  if (obj_row_name.empty() && !vars.empty()) {
    throw MpsParseError(lineno, "no objective (N) row declared");
  }

  // Integer variables must be binary: bounds inside {0,1}.
  for (ParsedVar& v : vars) {
    if (!v.integer) continue;
    if (!v.up_set && v.up == kInf) v.up = 1.0;
    const bool lo_ok = v.lo == 0.0 || v.lo == 1.0;
    const bool up_ok = v.up == 0.0 || v.up == 1.0;
    if (!lo_ok || !up_ok || v.lo > v.up) {
      throw MpsParseError(lineno, "general integer variable '" + v.name +
                                      "' is not supported (bounds must lie in {0,1})");
    }
  }

  // Canonical order: binary variables first, each block keeping file order.
  std::vector<int> order;
  order.reserve(vars.size());
  for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
    if (vars[j].integer) order.push_back(j);
  }
  const int q = static_cast<int>(order.size());
  for (int j = 0; j < static_cast<int>(vars.size()); ++j) {
    if (!vars[j].integer) order.push_back(j);
  }
  std::vector<int> new_index(vars.size());
  for (int pos = 0; pos < static_cast<int>(order.size()); ++pos) new_index[order[pos]] = pos;

  MilpInstance inst;
  inst.name = instance_name;
  inst.meta = std::move(meta);
  inst.num_vars = static_cast<int>(vars.size());
  inst.num_binary = q;
  inst.sense_flag = maximize ? ObjSense::kMax : ObjSense::kMin;
  inst.objective.resize(vars.size());
  inst.lower.resize(vars.size());
  inst.upper.resize(vars.size());
  inst.var_kind.resize(vars.size());
  inst.var_names.resize(vars.size());
  for (int j = 0; j < inst.num_vars; ++j) {
    const ParsedVar& v = vars[order[j]];
    inst.objective[j] = maximize ? -v.obj : v.obj;
    inst.lower[j] = v.lo;
    inst.upper[j] = v.up;
    inst.var_kind[j] = v.integer ? VarKind::kBinary : VarKind::kContinuous;
    inst.var_names[j] = v.name;
  }
  inst.rows.reserve(rows.size());
  for (Row& row : rows) {
    Row out;
    out.name = std::move(row.name);
    out.rhs = row.rhs;
    out.sense = row.sense;
    for (const auto& [j, coeff] : row.coeffs) out.coeffs.emplace(new_index[j], coeff);
    inst.rows.push_back(std::move(out));
  }
  inst.validate();
  return inst;
}

std::string write_mps(const MilpInstance& inst) {
  inst.validate();
  std::unordered_set<std::string> row_names;
  for (const Row& row : inst.rows) row_names.insert(row.name);
  std::string obj_name = "OBJ";
  while (row_names.count(obj_name)) obj_name += "_";

  std::ostringstream out;
  out << "NAME";
  if (!inst.name.empty()) out << " " << inst.name;
  out << "\n";
  for (const auto& [key, value] : inst.meta) {
    const auto bad = [](const std::string& s, const char* what) {
      return s.find('\n') != std::string::npos || s.find('\r') != std::string::npos ||
             (what[0] == 'k' && s.find_first_of(" \t") != std::string::npos);
    };
    if (key.empty() || bad(key, "key") || bad(value, "value")) {
      throw std::invalid_argument("meta entry '" + key + "' cannot be serialized");
    }
    out << "* META " << key;
    if (!value.empty()) out << " " << value;
    out << "\n";
  }
  if (inst.sense_flag == ObjSense::kMax) out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n";
  out << " N  " << obj_name << "\n";
  for (const Row& row : inst.rows) {
    const char tag = row.sense == RowSense::kLe ? 'L' : row.sense == RowSense::kGe ? 'G' : 'E';
    out << " " << tag << "  " << row.name << "\n";
  }

  // Column-major entries; the objective is written in the file's sense.
  std::vector<std::vector<std::pair<std::string, double>>> entries(inst.num_vars);
  for (int j = 0; j < inst.num_vars; ++j) {
    const double c = inst.sense_flag == ObjSense::kMax ? -inst.objective[j] : inst.objective[j];
    if (c != 0.0) entries[j].emplace_back(obj_name, c);
  }
  for (const Row& row : inst.rows) {
    for (const auto& [j, coeff] : row.coeffs) entries[j].emplace_back(row.name, coeff);
  }

  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  for (int j = 0; j < inst.num_vars; ++j) {
    const bool want_int = j < inst.num_binary;
    if (want_int != in_int) {
      out << "    MARKER" << marker++ << " 'MARKER' " << (want_int ? "'INTORG'" : "'INTEND'") << "\n";
      in_int = want_int;
    }
    if (entries[j].empty()) {
      // Mention the column so the variable exists after a round trip.
      out << "    " << inst.var_names[j] << " " << obj_name << " 0\n";
      continue;
    }
    for (const auto& [row_name, coeff] : entries[j]) {
      out << "    " << inst.var_names[j] << " " << row_name << " " << format_double(coeff) << "\n";
    }
  }
  if (in_int) out << "    MARKER" << marker++ << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  for (const Row& row : inst.rows) {
    if (row.rhs != 0.0) out << "    RHS " << row.name << " " << format_double(row.rhs) << "\n";
  }

  std::ostringstream bounds;
  for (int j = 0; j < inst.num_vars; ++j) {
    const std::string& name = inst.var_names[j];
    const double lo = inst.lower[j];
    const double up = inst.upper[j];
    if (j < inst.num_binary) {
      if (lo == 0.0 && up == 1.0) continue;  // binary default
      bounds << "    FX BND " << name << " " << format_double(lo) << "\n";
      continue;
    }
    if (lo == up) {
      bounds << "    FX BND " << name << " " << format_double(lo) << "\n";
      continue;
    }
    if (!is_finite_bound(lo) && !is_finite_bound(up)) {
      bounds << "    FR BND " << name << "\n";
      continue;
    }
    if (!is_finite_bound(lo)) bounds << "    MI BND " << name << "\n";
    if (is_finite_bound(lo) && lo != 0.0) bounds << "    LO BND " << name << " " << format_double(lo) << "\n";
    if (is_finite_bound(up)) bounds << "    UP BND " << name << " " << format_double(up) << "\n";
  }
  const std::string bounds_body = bounds.str();
  if (!bounds_body.empty()) out << "BOUNDS\n" << bounds_body;
  out << "ENDATA\n";
  return out.str();
}

}  // namespace pns
