#pragma once

#include <map>
#include <string>
#include <vector>

#include "agh/model.h"

namespace agh::milp {

inline constexpr double kBigM = 1e6;

enum class WindowSemantics { StartInWindow, CompleteByWindow };

WindowSemantics parse_semantics(const std::string& name);

enum class VarType { Binary, Continuous };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct Variable {
  std::string name;
  VarType type = VarType::Continuous;
  double lb = 0.0;
  double ub = 0.0; // +inf when unbounded

  bool operator==(const Variable&) const = default;
};

struct Term {
  int var = 0;
  double coef = 0.0;

  bool operator==(const Term&) const = default;
};

struct Constraint {
  std::string name;
  std::string tag; // constraint family: "serve", "flow", ..., "timing", "precedence"
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  bool operator==(const Constraint&) const = default;
};

struct MilpModel {
  std::vector<Variable> vars;
  std::vector<Term> objective;
  std::vector<Constraint> constraints;
  std::map<std::string, int> index; // variable name -> position

  int add_var(Variable v);
  int var(const std::string& name) const;
  int count(VarType type) const;
  int count_tag(const std::string& tag) const;

  bool operator==(const MilpModel& o) const {
    return vars == o.vars && objective == o.objective && constraints == o.constraints;
  }
};

struct BuildOptions {
  WindowSemantics semantics = WindowSemantics::StartInWindow;
  // Adds the depot-to-sink arc with this cost instead of excluding it
  // (0 keeps it excluded).
  double depot_arc_cost = 0.0;
};

// Variable names: x_f<op>_v<v>_<i>_<j> and T_f<op>_v<v>_<i>, vehicles
// numbered from 1, node n+1 is the sink copy of the depot.
std::string x_name(int op_id, int v, int i, int j);
std::string t_name(int op_id, int v, int i);

// Per fleet with n flights and V vehicles: V*n*(n+1) arc binaries (no arc
// into the depot, out of the sink, or depot to sink) and V*n start times.
// Rows: serve n, flow n*V, fleetsize 1, balance 1, capacity V, timing
// V*n*n; precedence n*V1*V2 per ordered fleet pair of increasing level. Windows are [arrival, departure].
MilpModel build(const Instance& inst, const BuildOptions& opts = {});

std::string emit_lp(const MilpModel& m);
MilpModel parse_lp(const std::string& text);

struct Violation {
  std::string tag;
  std::string message;
};

struct ConstraintReport {
  std::vector<Violation> violations;
  double objective = 0.0;

  bool ok() const { return violations.empty(); }
  int count(const std::string& tag) const;
};

// Evaluates every model constraint on the (x, T) assignment induced by a
// global solution. Vehicles are numbered by route order within each fleet.
ConstraintReport check_solution(const Instance& inst, const GlobalSolution& sol,
                                WindowSemantics semantics = WindowSemantics::CompleteByWindow);

// The induced assignment itself (every model variable gets a value).
std::vector<double> induced_assignment(const Instance& inst, const MilpModel& m,
                                       const GlobalSolution& sol);

// Names of constraints violated by an assignment, and out-of-bound variables.
std::vector<std::string> violated(const MilpModel& m, const std::vector<double>& values,
                                  double tol = 1e-6);
double objective_value(const MilpModel& m, const std::vector<double>& values);

// Reads "name value" lines (unknown names ignored, missing names are 0).
std::vector<double> parse_assignment(const MilpModel& m, const std::string& text);

// Routes and start times encoded by an arc assignment of a built model.
GlobalSolution solution_from_assignment(const Instance& inst, const MilpModel& m,
                                        const std::vector<double>& values);

} // namespace agh::milp
