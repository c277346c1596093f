#include "gridrules/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <map>

#include "gridrules/common.hpp"

namespace gridrules {

int LinearProgram::add_variable(std::string vname, double lower, double upper, double cost) {
  vars.push_back(LpVariable{std::move(vname), lower, upper, cost});
  return static_cast<int>(vars.size()) - 1;
}

void LinearProgram::add_constraint(std::string cname, std::vector<std::pair<int, double>> terms, Relation rel,
                                   double rhs) {
  cons.push_back(LpConstraint{std::move(cname), std::move(terms), rel, rhs});
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

namespace {

constexpr double kTolOpt = 1e-9;
constexpr double kTolFeas = 1e-9;
constexpr double kTolPivot = 1e-9;
constexpr int kBlandAfter = 1000;
constexpr int kMaxIterations = 50000;

// Standard-form problem: min c'y, A y = b, y >= 0. Column meanings are kept
// so the solution can be mapped back to the caller's variables.
struct Standard {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd cost;        // phase-2 cost
  int n_structural = 0;        // structural columns (before slacks)
  int first_artificial = 0;    // columns >= this are artificial
  std::vector<int> basis;      // basis column per row

  // Per original variable: mapping back to x.
  // kind 0: x = shift + y[col]; kind 1: x = shift - y[col]; kind 2: x = y[col] - y[col2]; kind 3: fixed at shift.
  struct VarMap {
    int kind = 0;
    int col = -1, col2 = -1;
    double shift = 0.0;
  };
  std::vector<VarMap> vmap;
};

struct RowBuild {
  std::vector<std::pair<int, double>> terms;  // structural column -> coef
  Relation rel;
  double rhs;
};

void build_standard(const LinearProgram& lp, Standard& st) {
  const int nx = static_cast<int>(lp.vars.size());
  st.vmap.resize(nx);
  int ncol = 0;
  std::vector<RowBuild> rows;

  for (int i = 0; i < nx; ++i) {
    const LpVariable& v = lp.vars[i];
    if (v.lower > v.upper + 1e-12) fail(ErrorCode::Infeasible, "variable '" + v.name + "' has empty bounds");
    Standard::VarMap& m = st.vmap[i];
    bool lo_fin = std::isfinite(v.lower), up_fin = std::isfinite(v.upper);
    if (lo_fin && up_fin && v.upper - v.lower <= 1e-14) {
      m.kind = 3;
      m.shift = v.lower;
    } else if (lo_fin) {
      m.kind = 0;
      m.col = ncol++;
      m.shift = v.lower;
      if (up_fin) rows.push_back(RowBuild{{{m.col, 1.0}}, Relation::LessEq, v.upper - v.lower});
    } else if (up_fin) {
      m.kind = 1;
      m.col = ncol++;
      m.shift = v.upper;
    } else {
      m.kind = 2;
      m.col = ncol++;
      m.col2 = ncol++;
    }
  }
  st.n_structural = ncol;

  for (const LpConstraint& c : lp.cons) {
    // Accumulate per-column coefficients; fixed variables fold into the rhs.
    std::map<int, double> coef;
    double rhs = c.rhs;
    auto add = [&coef](int col, double v) {
      if (col >= 0 && v != 0.0) coef[col] += v;
    };
    for (const auto& [vi, cv] : c.terms) {
      if (vi < 0 || vi >= nx) fail(ErrorCode::InvalidArgument, "constraint '" + c.name + "' references unknown variable");
      const Standard::VarMap& m = st.vmap[vi];
      switch (m.kind) {
        case 0: add(m.col, cv); rhs -= cv * m.shift; break;
        case 1: add(m.col, -cv); rhs -= cv * m.shift; break;
        case 2: add(m.col, cv); add(m.col2, -cv); break;
        case 3: rhs -= cv * m.shift; break;
      }
    }
    RowBuild r;
    r.rel = c.rel;
    r.rhs = rhs;
    for (const auto& [col, v] : coef)
      if (v != 0.0) r.terms.emplace_back(col, v);
    rows.push_back(std::move(r));
  }

  // Normalize rhs >= 0, then append slack/surplus and artificial columns.
  const int m = static_cast<int>(rows.size());
  int n_slack = 0, n_art = 0;
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      r.rhs = -r.rhs;
      for (auto& t : r.terms) t.second = -t.second;
      if (r.rel == Relation::LessEq)
        r.rel = Relation::GreaterEq;
      else if (r.rel == Relation::GreaterEq)
        r.rel = Relation::LessEq;
    }
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEq) ++n_art;
  }
  const int ntot = st.n_structural + n_slack + n_art;
  st.first_artificial = st.n_structural + n_slack;
  st.a = Eigen::MatrixXd::Zero(m, ntot);
  st.b = Eigen::VectorXd::Zero(m);
  st.cost = Eigen::VectorXd::Zero(ntot);
  st.basis.assign(m, -1);

  int slack_at = st.n_structural;
  int art_at = st.first_artificial;
  for (int r = 0; r < m; ++r) {
    for (const auto& [col, v] : rows[r].terms) st.a(r, col) = v;
    st.b(r) = rows[r].rhs;
    switch (rows[r].rel) {
      case Relation::LessEq:
        st.a(r, slack_at) = 1.0;
        st.basis[r] = slack_at++;
        break;
      case Relation::GreaterEq:
        st.a(r, slack_at++) = -1.0;
        st.a(r, art_at) = 1.0;
        st.basis[r] = art_at++;
        break;
      case Relation::Equal:
        st.a(r, art_at) = 1.0;
        st.basis[r] = art_at++;
        break;
    }
  }

  for (int i = 0; i < nx; ++i) {
    const Standard::VarMap& m_ = st.vmap[i];
    double c = lp.vars[i].cost;
    if (m_.kind == 0) st.cost(m_.col) += c;
    if (m_.kind == 1) st.cost(m_.col) -= c;
    if (m_.kind == 2) {
      st.cost(m_.col) += c;
      st.cost(m_.col2) -= c;
    }
  }
}

// One simplex phase on the canonical tableau. Returns: 0 optimal, 1 unbounded.
int run_phase(Standard& st, const Eigen::VectorXd& cost, bool allow_artificial_entering, int& iterations) {
  const int m = static_cast<int>(st.a.rows());
  const int n = static_cast<int>(st.a.cols());
  const int n_enter = allow_artificial_entering ? n : st.first_artificial;

  Eigen::VectorXd reduced = cost;
  for (int r = 0; r < m; ++r)
    if (cost(st.basis[r]) != 0.0) reduced -= cost(st.basis[r]) * st.a.row(r).transpose();

  while (true) {
    if (iterations >= kMaxIterations)
      fail(ErrorCode::Numeric, "simplex stalled after " + std::to_string(iterations) + " iterations");
    bool bland = iterations >= kBlandAfter;

    int pc = -1;
    if (bland) {
      for (int j = 0; j < n_enter; ++j)
        if (reduced(j) < -kTolOpt) {
          pc = j;
          break;
        }
    } else {
      double best = -kTolOpt;
      for (int j = 0; j < n_enter; ++j)
        if (reduced(j) < best) {
          best = reduced(j);
          pc = j;
        }
    }
    if (pc < 0) return 0;

    int pr = -1;
    double best_ratio = kInf;
    for (int r = 0; r < m; ++r) {
      double arc = st.a(r, pc);
      if (arc > kTolPivot) {
        double ratio = st.b(r) / arc;
        if (ratio < best_ratio - 1e-12 || (ratio < best_ratio + 1e-12 && (pr < 0 || st.basis[r] < st.basis[pr]))) {
          best_ratio = ratio;
          pr = r;
        }
      }
    }
    if (pr < 0) return 1;

    double piv = st.a(pr, pc);
    st.a.row(pr) /= piv;
    st.b(pr) /= piv;
    for (int r = 0; r < m; ++r) {
      if (r == pr) continue;
      double f = st.a(r, pc);
      if (f != 0.0) {
        st.a.row(r) -= f * st.a.row(pr);
        st.b(r) -= f * st.b(pr);
        if (st.b(r) < 0.0 && st.b(r) > -1e-11) st.b(r) = 0.0;
      }
    }
    double f = reduced(pc);
    reduced -= f * st.a.row(pr).transpose();
    reduced(pc) = 0.0;
    st.basis[pr] = pc;
    ++iterations;
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  LpSolution sol;
  Standard st;
  build_standard(lp, st);
  const int m = static_cast<int>(st.a.rows());
  const int n = static_cast<int>(st.a.cols());

  int iterations = 0;

  // Phase 1: minimize the sum of artificials.
  if (st.first_artificial < n) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n);
    for (int j = st.first_artificial; j < n; ++j) c1(j) = 1.0;
    int rc = run_phase(st, c1, true, iterations);
    if (rc != 0) fail(ErrorCode::Internal, "phase-1 simplex reported unbounded");
    double w = 0.0;
    for (int r = 0; r < m; ++r)
      if (st.basis[r] >= st.first_artificial) w += st.b(r);
    double scale = 1.0 + st.b.cwiseAbs().maxCoeff();
    if (w > kTolFeas * scale) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Pivot remaining artificials out of the basis where the row allows it.
    for (int r = 0; r < m; ++r) {
      if (st.basis[r] < st.first_artificial) continue;
      int pc = -1;
      for (int j = 0; j < st.first_artificial; ++j)
        if (std::fabs(st.a(r, j)) > kTolPivot) {
          pc = j;
          break;
        }
      if (pc < 0) continue;  // redundant row; artificial stays basic at zero
      double piv = st.a(r, pc);
      st.a.row(r) /= piv;
      st.b(r) /= piv;
      for (int rr = 0; rr < m; ++rr) {
        if (rr == r) continue;
        double f = st.a(rr, pc);
        if (f != 0.0) {
          st.a.row(rr) -= f * st.a.row(r);
          st.b(rr) -= f * st.b(r);
        }
      }
      st.basis[r] = pc;
    }
  }

  // Phase 2.
  int rc = run_phase(st, st.cost, false, iterations);
  sol.iterations = iterations;
  if (rc == 1) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r) y(st.basis[r]) = st.b(r);

  const int nx = static_cast<int>(lp.vars.size());
  sol.x = Eigen::VectorXd::Zero(nx);
  for (int i = 0; i < nx; ++i) {
    const auto& vm = st.vmap[i];
    switch (vm.kind) {
      case 0: sol.x(i) = vm.shift + y(vm.col); break;
      case 1: sol.x(i) = vm.shift - y(vm.col); break;
      case 2: sol.x(i) = y(vm.col) - y(vm.col2); break;
      case 3: sol.x(i) = vm.shift; break;
    }
  }
  double obj = 0.0;
  for (int i = 0; i < nx; ++i) obj += lp.vars[i].cost * sol.x(i);
  sol.objective = obj;
  sol.status = LpStatus::Optimal;
  return sol;
}

namespace {

std::string lp_num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// LP-format identifiers cannot contain operator characters.
std::string lp_name(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
  return out;
}

void write_terms(std::ostream& os, const std::vector<std::pair<int, double>>& terms, const LinearProgram& lp) {
  bool first = true;
  for (const auto& [vi, c] : terms) {
    if (c == 0.0) continue;
    if (first) {
      if (c < 0.0) os << "- ";
      first = false;
    } else {
      os << (c < 0.0 ? " - " : " + ");
    }
    double a = std::fabs(c);
    if (a != 1.0) os << lp_num(a) << " ";
    os << lp_name(lp.vars[vi].name);
  }
  if (first) os << "0";
}

}  // namespace

void write_lp_file(const LinearProgram& lp, const std::vector<int>& binary_vars, std::ostream& os) {
  std::vector<bool> is_bin(lp.vars.size(), false);
  for (int b : binary_vars) is_bin[b] = true;

  os << "\\ " << lp.name << "\n";
  os << "Minimize\n obj: ";
  std::vector<std::pair<int, double>> obj_terms;
  for (int i = 0; i < static_cast<int>(lp.vars.size()); ++i)
    if (lp.vars[i].cost != 0.0) obj_terms.emplace_back(i, lp.vars[i].cost);
  if (obj_terms.empty())
    os << (lp.vars.empty() ? "0" : ("0 " + lp_name(lp.vars.front().name)));
  else
    write_terms(os, obj_terms, lp);
  os << "\nSubject To\n";
  for (const LpConstraint& c : lp.cons) {
    os << " " << lp_name(c.name) << ": ";
    write_terms(os, c.terms, lp);
    switch (c.rel) {
      case Relation::LessEq: os << " <= "; break;
      case Relation::Equal: os << " = "; break;
      case Relation::GreaterEq: os << " >= "; break;
    }
    os << lp_num(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (std::size_t i = 0; i < lp.vars.size(); ++i) {
    const LpVariable& v = lp.vars[i];
    if (is_bin[i]) continue;
    bool lo_fin = std::isfinite(v.lower), up_fin = std::isfinite(v.upper);
    if (!lo_fin && !up_fin)
      os << " " << lp_name(v.name) << " free\n";
    else if (lo_fin && up_fin)
      os << " " << lp_num(v.lower) << " <= " << lp_name(v.name) << " <= " << lp_num(v.upper) << "\n";
    else if (lo_fin)
      os << " " << lp_name(v.name) << " >= " << lp_num(v.lower) << "\n";
    else
      os << " " << lp_name(v.name) << " <= " << lp_num(v.upper) << "\n";
  }
  if (!binary_vars.empty()) {
    os << "Binary\n";
    for (int b : binary_vars) os << " " << lp_name(lp.vars[b].name) << "\n";
  }
  os << "End\n";
}

}  // namespace gridrules
