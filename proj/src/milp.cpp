#include "agh/milp.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace agh::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTimeTol = 1e-9;
constexpr std::size_t kLineWidth = 200;

std::string num(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tag_of(const std::string& name) {
  const auto cut = name.find('_');
  return name.substr(0, cut);
}

} // namespace

WindowSemantics parse_semantics(const std::string& name) {
  if (name == "start_in_window") return WindowSemantics::StartInWindow;
  if (name == "complete_by_window") return WindowSemantics::CompleteByWindow;
  throw InputError("unknown window semantics: " + name);
}

int MilpModel::add_var(Variable v) {
  if (index.contains(v.name)) {
    throw InputError("duplicate variable " + v.name);
  }
  const int id = static_cast<int>(vars.size());
  index.emplace(v.name, id);
  vars.push_back(std::move(v));
  return id;
}

int MilpModel::var(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) {
    throw InputError("unknown variable " + name);
  }
  return it->second;
}

int MilpModel::count(VarType type) const {
  return static_cast<int>(
    std::count_if(vars.begin(), vars.end(), [type](const Variable& v) { return v.type == type; }));
}

int MilpModel::count_tag(const std::string& tag) const {
  return static_cast<int>(std::count_if(constraints.begin(), constraints.end(),
                                        [&](const Constraint& c) { return c.tag == tag; }));
}

int ConstraintReport::count(const std::string& tag) const {
  return static_cast<int>(std::count_if(violations.begin(), violations.end(),
                                        [&](const Violation& v) { return v.tag == tag; }));
}

std::string x_name(int op_id, int v, int i, int j) {
  return "x_f" + std::to_string(op_id) + "_v" + std::to_string(v) + "_" + std::to_string(i) + "_" +
         std::to_string(j);
}

std::string t_name(int op_id, int v, int i) {
  return "T_f" + std::to_string(op_id) + "_v" + std::to_string(v) + "_" + std::to_string(i);
}

MilpModel build(const Instance& inst, const BuildOptions& opts) {
  const auto report = validate_instance(inst);
  if (!report.ok()) {
    throw InputError("invalid instance: " + report.issues.front());
  }
  const int n = inst.num_flights();
  const int sink = n + 1;
  MilpModel m;

  auto add = [&](std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    Constraint c;
    c.tag = tag_of(name);
    c.name = std::move(name);
    c.terms = std::move(terms);
    c.sense = sense;
    c.rhs = rhs;
    m.constraints.push_back(std::move(c));
  };
  auto arc_allowed = [&](int i, int j) {
    if (i == j || j == kDepotNode || i == sink) {
      return false;
    }
    return !(i == kDepotNode && j == sink) || opts.depot_arc_cost > 0.0;
  };

  for (const auto& op : inst.operations()) {
    const int f = op.op_id;
    const int V = inst.fleet(f).max_vehicles;
    for (int v = 1; v <= V; ++v) {
      for (int i = 0; i <= n; ++i) {
        for (int j = 1; j <= sink; ++j) {
          if (!arc_allowed(i, j)) {
            continue;
          }
          const int id = m.add_var({x_name(f, v, i, j), VarType::Binary, 0.0, 1.0});
          const double c =
            (i == kDepotNode && j == sink) ? opts.depot_arc_cost : inst.distance(i, j);
          m.objective.push_back({id, c});
        }
      }
    }
  }
  for (const auto& op : inst.operations()) {
    const int f = op.op_id;
    for (int v = 1; v <= inst.fleet(f).max_vehicles; ++v) {
      for (int i = 1; i <= n; ++i) {
        const auto& fl = inst.flight(i);
        double ub = fl.departure;
        if (opts.semantics == WindowSemantics::CompleteByWindow) {
          ub -= op.duration(fl.flight_type);
        }
        m.add_var({t_name(f, v, i), VarType::Continuous, std::max(0.0, fl.arrival), ub});
      }
    }
  }

  for (const auto& op : inst.operations()) {
    const int f = op.op_id;
    const auto& fleet = inst.fleet(f);
    const int V = fleet.max_vehicles;
    const std::string fs = "_f" + std::to_string(f);
    auto x = [&](int v, int i, int j) { return m.var(x_name(f, v, i, j)); };

    for (int j = 1; j <= n; ++j) {
      std::vector<Term> t;
      for (int v = 1; v <= V; ++v) {
        for (int i = 0; i <= n; ++i) {
          if (arc_allowed(i, j)) t.push_back({x(v, i, j), 1.0});
        }
      }
      add("serve" + fs + "_j" + std::to_string(j), std::move(t), Sense::Equal, 1.0);
    }
    for (int v = 1; v <= V; ++v) {
      for (int u = 1; u <= n; ++u) {
        std::vector<Term> t;
        for (int i = 0; i <= n; ++i) {
          if (arc_allowed(i, u)) t.push_back({x(v, i, u), 1.0});
        }
        for (int j = 1; j <= sink; ++j) {
          if (arc_allowed(u, j)) t.push_back({x(v, u, j), -1.0});
        }
        add("flow" + fs + "_v" + std::to_string(v) + "_u" + std::to_string(u), std::move(t),
            Sense::Equal, 0.0);
      }
    }
    {
      std::vector<Term> t;
      for (int v = 1; v <= V; ++v) {
        for (int j = 1; j <= n; ++j) t.push_back({x(v, 0, j), 1.0});
      }
      add("fleetsize" + fs, std::move(t), Sense::LessEqual, V);
    }
    {
      std::vector<Term> t;
      for (int v = 1; v <= V; ++v) {
        for (int j = 1; j <= n; ++j) t.push_back({x(v, 0, j), 1.0});
        for (int i = 1; i <= n; ++i) t.push_back({x(v, i, sink), -1.0});
      }
      add("balance" + fs, std::move(t), Sense::Equal, 0.0);
    }
    for (int v = 1; v <= V; ++v) {
      std::vector<Term> t;
      for (int i = 1; i <= n; ++i) {
        const double d = inst.flight(i).demand.at(f);
        for (int j = 1; j <= sink; ++j) {
          if (arc_allowed(i, j)) t.push_back({x(v, i, j), d});
        }
      }
      add("capacity" + fs + "_v" + std::to_string(v), std::move(t), Sense::LessEqual, fleet.capacity);
    }
    // Arcs into the sink carry no timing row: the sink has no start time.
    for (int v = 1; v <= V; ++v) {
      for (int i = 0; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
          if (!arc_allowed(i, j)) {
            continue;
          }
          const double d_i = i == kDepotNode ? 0.0 : op.duration(inst.flight(i).flight_type);
          const double t_ij = travel_time(inst, f, i, j);
          std::vector<Term> t;
          if (i != kDepotNode) t.push_back({m.var(t_name(f, v, i)), 1.0});
          t.push_back({m.var(t_name(f, v, j)), -1.0});
          t.push_back({x(v, i, j), kBigM});
          add("timing" + fs + "_v" + std::to_string(v) + "_" + std::to_string(i) + "_" +
                std::to_string(j),
              std::move(t), Sense::LessEqual, kBigM - d_i - t_ij);
        }
      }
    }
  }

  for (const auto& op1 : inst.operations()) {
    for (const auto& op2 : inst.operations()) {
      if (op1.level >= op2.level) {
        continue;
      }
      const int V1 = inst.fleet(op1.op_id).max_vehicles;
      const int V2 = inst.fleet(op2.op_id).max_vehicles;
      for (int i = 1; i <= n; ++i) {
        const double d = op1.duration(inst.flight(i).flight_type);
        for (int v1 = 1; v1 <= V1; ++v1) {
          for (int v2 = 1; v2 <= V2; ++v2) {
            add("precedence_f" + std::to_string(op1.op_id) + "_f" + std::to_string(op2.op_id) + "_i" +
                  std::to_string(i) + "_v" + std::to_string(v1) + "_" + std::to_string(v2),
                {{m.var(t_name(op1.op_id, v1, i)), 1.0}, {m.var(t_name(op2.op_id, v2, i)), -1.0}},
                Sense::LessEqual, -d);
          }
        }
      }
    }
  }
  return m;
}

namespace {

void write_terms(std::ostringstream& out, const MilpModel& m, const std::vector<Term>& terms,
                 std::size_t& col) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    std::string piece;
    const double c = terms[k].coef;
    if (k > 0 || c < 0) {
      piece += c < 0 ? "- " : "+ ";
    }
    piece += num(std::fabs(c)) + " " + m.vars[static_cast<std::size_t>(terms[k].var)].name;
    if (col + piece.size() + 1 > kLineWidth) {
      out << "\n  ";
      col = 2;
    } else if (col > 0) {
      out << ' ';
      ++col;
    }
    out << piece;
    col += piece.size();
  }
}

} // namespace

std::string emit_lp(const MilpModel& m) {
  std::ostringstream out;
  out << "Minimize\n obj:";
  std::size_t col = 5;
  write_terms(out, m, m.objective, col);
  out << "\nSubject To\n";
  for (const auto& c : m.constraints) {
    out << ' ' << c.name << ':';
    col = c.name.size() + 2;
    write_terms(out, m, c.terms, col);
    const char* sense = c.sense == Sense::LessEqual ? "<=" : c.sense == Sense::GreaterEqual ? ">=" : "=";
    out << ' ' << sense << ' ' << num(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.type == VarType::Continuous) {
      out << ' ' << num(v.lb) << " <= " << v.name << " <= " << num(v.ub) << '\n';
    }
  }
  out << "Binaries\n";
  col = 0;
  for (const auto& v : m.vars) {
    if (v.type != VarType::Binary) {
      continue;
    }
    if (col + v.name.size() + 1 > kLineWidth) {
      out << '\n';
      col = 0;
    }
    out << ' ' << v.name;
    col += v.name.size() + 1;
  }
  out << "\nEnd\n";
  return out.str();
}

namespace {

double parse_num(const std::string& tok) {
  if (tok == "inf" || tok == "+inf" || tok == "infinity") return kInf;
  if (tok == "-inf" || tok == "-infinity") return -kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw InputError("bad number: " + tok);
    return v;
  } catch (const std::logic_error&) {
    throw InputError("bad number: " + tok);
  }
}

bool is_number(const std::string& tok) {
  return !tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.' ||
                          ((tok[0] == '-' || tok[0] == '+') && tok.size() > 1));
}

// Linear expression "[+|-] coef name ..." split into tokens.
std::vector<std::pair<std::string, double>> parse_expr(const std::vector<std::string>& toks) {
  std::vector<std::pair<std::string, double>> out;
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  for (const auto& t : toks) {
    if (t == "+") {
      sign = 1.0;
    } else if (t == "-") {
      sign = -1.0;
    } else if (is_number(t) && !have_coef) {
      coef = parse_num(t);
      have_coef = true;
    } else {
      out.emplace_back(t, sign * coef);
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

} // namespace

MilpModel parse_lp(const std::string& text) {
  enum class Section { None, Objective, Constraints, Bounds, Binaries, End };
  // Join continuation lines into logical statements per section.
  std::vector<std::pair<Section, std::string>> stmts;
  Section sec = Section::None;
  std::istringstream in(text);
  std::string line;
  auto lower = [](std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  while (std::getline(in, line)) {
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    const auto head = lower(toks[0]);
    if (toks.size() == 1 && (head == "minimize" || head == "minimise")) {
      sec = Section::Objective;
      continue;
    }
    if (toks.size() == 2 && head == "subject" && lower(toks[1]) == "to") {
      sec = Section::Constraints;
      continue;
    }
    if (toks.size() == 1 && head == "bounds") {
      sec = Section::Bounds;
      continue;
    }
    if (toks.size() == 1 && (head == "binaries" || head == "binary")) {
      sec = Section::Binaries;
      continue;
    }
    if (toks.size() == 1 && head == "end") {
      sec = Section::End;
      break;
    }
    const bool continuation = line[0] == ' ' && line.size() > 1 && line[1] == ' ';
    if (continuation && !stmts.empty() && stmts.back().first == sec) {
      stmts.back().second += " " + line;
    } else {
      stmts.emplace_back(sec, line);
    }
  }
  if (sec != Section::End) {
    throw InputError("LP text lacks End");
  }

  MilpModel m;
  std::vector<std::pair<std::string, double>> obj;
  struct RawRow {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    Sense sense;
    double rhs;
  };
  std::vector<RawRow> rows;
  std::map<std::string, std::pair<double, double>> bounds;
  std::vector<std::string> binaries;
  std::vector<std::string> order; // first appearance of each variable

  std::set<std::string> noted;
  auto note = [&](const std::string& name) {
    if (noted.insert(name).second) order.push_back(name);
  };

  for (const auto& [s, body] : stmts) {
    auto toks = split_ws(body);
    switch (s) {
      case Section::Objective: {
        if (!toks.empty() && toks[0].back() == ':') toks.erase(toks.begin());
        for (auto& t : parse_expr(toks)) {
          note(t.first);
          obj.push_back(t);
        }
        break;
      }
      case Section::Constraints: {
        if (toks.empty() || toks[0].back() != ':') throw InputError("unnamed constraint: " + body);
        RawRow r;
        r.name = toks[0].substr(0, toks[0].size() - 1);
        if (toks.size() < 3) throw InputError("bad constraint: " + body);
        const auto& op = toks[toks.size() - 2];
        r.sense = op == "<=" ? Sense::LessEqual : op == ">=" ? Sense::GreaterEqual : Sense::Equal;
        if (op != "<=" && op != ">=" && op != "=") throw InputError("bad sense in: " + body);
        r.rhs = parse_num(toks.back());
        r.terms = parse_expr({toks.begin() + 1, toks.end() - 2});
        for (auto& t : r.terms) note(t.first);
        rows.push_back(std::move(r));
        break;
      }
      case Section::Bounds: {
        if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
          bounds[toks[2]] = {parse_num(toks[0]), parse_num(toks[4])};
          note(toks[2]);
        } else if (toks.size() == 3 && (toks[1] == ">=" || toks[1] == "<=")) {
          auto& b = bounds.try_emplace(toks[0], 0.0, kInf).first->second;
          (toks[1] == ">=" ? b.first : b.second) = parse_num(toks[2]);
          note(toks[0]);
        } else {
          throw InputError("unsupported bound: " + body);
        }
        break;
      }
      case Section::Binaries:
        for (auto& t : toks) {
          binaries.push_back(t);
          note(t);
        }
        break;
      default:
        throw InputError("statement outside any section: " + body);
    }
  }

  // The builder adds every binary before any continuous variable, and the
  // writer lists both groups in model order.
  std::set<std::string> is_bin(binaries.begin(), binaries.end());
  std::vector<std::string> var_order = binaries;
  for (const auto& [s, body] : stmts) {
    if (s == Section::Bounds) {
      const auto toks = split_ws(body);
      var_order.push_back(toks.size() == 5 ? toks[2] : toks[0]);
    }
  }
  {
    std::set<std::string> listed(var_order.begin(), var_order.end());
    for (const auto& name : order) {
      if (listed.insert(name).second) {
        var_order.push_back(name);
      }
    }
  }
  for (const auto& name : var_order) {
    Variable v;
    v.name = name;
    if (is_bin.contains(name)) {
      v.type = VarType::Binary;
      v.lb = 0.0;
      v.ub = 1.0;
    } else {
      v.type = VarType::Continuous;
      auto it = bounds.find(name);
      v.lb = it == bounds.end() ? 0.0 : it->second.first;
      v.ub = it == bounds.end() ? kInf : it->second.second;
    }
    m.add_var(std::move(v));
  }
  for (const auto& [name, c] : obj) m.objective.push_back({m.var(name), c});
  for (auto& r : rows) {
    Constraint c;
    c.name = r.name;
    c.tag = tag_of(r.name);
    for (auto& [name, coef] : r.terms) c.terms.push_back({m.var(name), coef});
    c.sense = r.sense;
    c.rhs = r.rhs;
    m.constraints.push_back(std::move(c));
  }
  return m;
}

ConstraintReport check_solution(const Instance& inst, const GlobalSolution& sol,
                                WindowSemantics semantics) {
  ConstraintReport rep;
  auto flag = [&](const std::string& tag, const std::string& msg) {
    rep.violations.push_back({tag, msg});
  };
  const int n = inst.num_flights();
  // start[(flight, op)] of the (first) visit.
  std::map<std::pair<int, int>, double> start;
  std::map<std::pair<int, int>, int> visits;
  std::map<int, int> routes_per_op;
  bool structural = true;

  for (const auto& r : sol.routes) {
    if (!inst.fleets().contains(r.op_id)) {
      flag("structure", "route of unknown op " + std::to_string(r.op_id));
      structural = false;
      continue;
    }
    if (r.start_times.size() != r.visits.size()) {
      flag("structure", "route of op " + std::to_string(r.op_id) + " lacks start times");
      structural = false;
      continue;
    }
    bool known = true;
    for (int j : r.visits) {
      if (j < 1 || j > n) {
        flag("structure", "route visits unknown flight " + std::to_string(j));
        known = false;
      }
    }
    if (!known) {
      structural = false;
      continue;
    }
    if (r.visits.empty()) {
      continue;
    }
    const auto& op = inst.operation(r.op_id);
    const auto& fleet = inst.fleet(r.op_id);
    const std::string who = "op " + std::to_string(r.op_id) + " route " +
                            std::to_string(++routes_per_op[r.op_id]);
    int load = 0;
    int prev = kDepotNode;
    double prev_done = 0.0;
    for (std::size_t k = 0; k < r.visits.size(); ++k) {
      const int j = r.visits[k];
      const auto& fl = inst.flight(j);
      const double t = r.start_times[k];
      const double d = op.duration(fl.flight_type);
      load += fl.demand.at(r.op_id);
      if (visits[{j, r.op_id}]++ == 0) {
        start[{j, r.op_id}] = t;
      }
      if (prev_done + travel_time(inst, r.op_id, prev, j) > t + kTimeTol) {
        flag("timing", who + ": flight " + std::to_string(j) + " starts before the vehicle can arrive");
      }
      if (t < 0.0) {
        flag("nonneg", who + ": negative start at flight " + std::to_string(j));
      }
      if (t < fl.arrival - kTimeTol || t > fl.departure + kTimeTol) {
        flag("window", who + ": start at flight " + std::to_string(j) + " outside its window");
      } else if (semantics == WindowSemantics::CompleteByWindow && t + d > fl.departure + kTimeTol) {
        flag("window", who + ": service at flight " + std::to_string(j) + " ends after departure");
      }
      prev = j;
      prev_done = t + d;
    }
    if (load > fleet.capacity) {
      flag("capacity", who + ": load " + std::to_string(load) + " exceeds capacity");
    }
    std::set<int> distinct(r.visits.begin(), r.visits.end());
    if (distinct.size() != r.visits.size()) {
      flag("flow", who + ": revisits a flight");
    }
  }
  for (const auto& op : inst.operations()) {
    if (routes_per_op[op.op_id] > inst.fleet(op.op_id).max_vehicles) {
      flag("fleetsize", "op " + std::to_string(op.op_id) + " uses more vehicles than available");
    }
    for (int j = 1; j <= n; ++j) {
      const int c = visits[{j, op.op_id}];
      if (c != 1) {
        flag("serve", "flight " + std::to_string(j) + " served " + std::to_string(c) +
                      " times by op " + std::to_string(op.op_id));
      }
    }
  }
  for (const auto& op1 : inst.operations()) {
    for (const auto& op2 : inst.operations()) {
      if (op1.level >= op2.level) {
        continue;
      }
      for (int j = 1; j <= n; ++j) {
        auto a = start.find({j, op1.op_id});
        auto b = start.find({j, op2.op_id});
        if (a == start.end() || b == start.end()) {
          continue;
        }
        if (a->second + op1.duration(inst.flight(j).flight_type) > b->second + kTimeTol) {
          flag("precedence", "flight " + std::to_string(j) + ": op " + std::to_string(op2.op_id) +
                         " starts before op " + std::to_string(op1.op_id) + " completes");
        }
      }
    }
  }
  if (structural) {
    rep.objective = global_cost(inst, sol);
  }
  return rep;
}

std::vector<double> induced_assignment(const Instance& inst, const MilpModel& m,
                                       const GlobalSolution& sol) {
  const int n = inst.num_flights();
  const int sink = n + 1;
  std::vector<double> values(m.vars.size(), 0.0);
  std::map<int, int> vehicle;
  std::map<std::pair<int, int>, double> start;
  for (const auto& r : sol.routes) {
    for (std::size_t k = 0; k < r.visits.size(); ++k) {
      start.try_emplace({r.visits[k], r.op_id}, r.start_times.at(k));
    }
  }
  for (const auto& r : sol.routes) {
    if (r.visits.empty()) {
      continue;
    }
    const int v = ++vehicle[r.op_id];
    if (v > inst.fleet(r.op_id).max_vehicles) {
      throw InputError("solution uses more vehicles than the model has");
    }
    int prev = kDepotNode;
    for (int j : r.visits) {
      values[static_cast<std::size_t>(m.var(x_name(r.op_id, v, prev, j)))] = 1.0;
      prev = j;
    }
    values[static_cast<std::size_t>(m.var(x_name(r.op_id, v, prev, sink)))] = 1.0;
  }
  // Every vehicle's time variable of a flight takes the flight's actual
  // start, so cross-vehicle rows see the real schedule.
  for (const auto& op : inst.operations()) {
    for (int v = 1; v <= inst.fleet(op.op_id).max_vehicles; ++v) {
      for (int j = 1; j <= n; ++j) {
        const int id = m.var(t_name(op.op_id, v, j));
        auto it = start.find({j, op.op_id});
        values[static_cast<std::size_t>(id)] =
          it == start.end() ? m.vars[static_cast<std::size_t>(id)].lb : it->second;
      }
    }
  }
  return values;
}

std::vector<std::string> violated(const MilpModel& m, const std::vector<double>& values,
                                  double tol) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < m.vars.size(); ++k) {
    const auto& v = m.vars[k];
    const double x = values[k];
    if (x < v.lb - tol || x > v.ub + tol ||
        (v.type == VarType::Binary && std::fabs(x - std::round(x)) > tol)) {
      out.push_back("bound:" + v.name);
    }
  }
  for (const auto& c : m.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) {
      lhs += t.coef * values[static_cast<std::size_t>(t.var)];
    }
    const bool ok = c.sense == Sense::LessEqual      ? lhs <= c.rhs + tol
                    : c.sense == Sense::GreaterEqual ? lhs >= c.rhs - tol
                                                     : std::fabs(lhs - c.rhs) <= tol;
    if (!ok) {
      out.push_back(c.name);
    }
  }
  return out;
}

double objective_value(const MilpModel& m, const std::vector<double>& values) {
  double z = 0.0;
  for (const auto& t : m.objective) {
    z += t.coef * values[static_cast<std::size_t>(t.var)];
  }
  return z;
}

std::vector<double> parse_assignment(const MilpModel& m, const std::string& text) {
  std::vector<double> values(m.vars.size(), 0.0);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto toks = split_ws(line);
    if (toks.size() < 2) {
      continue;
    }
    auto it = m.index.find(toks[0]);
    if (it == m.index.end()) {
      continue;
    }
    values[static_cast<std::size_t>(it->second)] = parse_num(toks[1]);
  }
  return values;
}

GlobalSolution solution_from_assignment(const Instance& inst, const MilpModel& m,
                                        const std::vector<double>& values) {
  const int n = inst.num_flights();
  const int sink = n + 1;
  auto on = [&](const std::string& name) {
    auto it = m.index.find(name);
    return it != m.index.end() && values[static_cast<std::size_t>(it->second)] > 0.5;
  };
  GlobalSolution sol;
  for (const auto& op : inst.operations()) {
    for (int v = 1; v <= inst.fleet(op.op_id).max_vehicles; ++v) {
      Route r{op.op_id, {}, {}};
      int cur = kDepotNode;
      for (int steps = 0; steps <= n; ++steps) {
        int next = -1;
        for (int j = 1; j <= sink && next < 0; ++j) {
          if (j != cur && on(x_name(op.op_id, v, cur, j))) next = j;
        }
        if (next < 0 || next == sink) {
          break;
        }
        r.visits.push_back(next);
        r.start_times.push_back(values[static_cast<std::size_t>(m.var(t_name(op.op_id, v, next)))]);
        cur = next;
      }
      if (!r.visits.empty()) {
        sol.routes.push_back(std::move(r));
      }
    }
  }
  sol.objective = global_cost(inst, sol);
  return sol;
}

} // namespace agh::milp
