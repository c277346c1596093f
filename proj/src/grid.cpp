#include "gridrules/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gridrules/common.hpp"

namespace gridrules {

GenKind gen_kind_from_string(const std::string& s) {
  if (s == "thermal") return GenKind::Thermal;
  if (s == "hydro") return GenKind::Hydro;
  if (s == "wind") return GenKind::Wind;
  if (s == "pv") return GenKind::Pv;
  fail(ErrorCode::Parse, "unknown generator kind '" + s + "'");
}

const char* to_string(GenKind k) {
  switch (k) {
    case GenKind::Thermal: return "thermal";
    case GenKind::Hydro: return "hydro";
    case GenKind::Wind: return "wind";
    case GenKind::Pv: return "pv";
  }
  return "?";
}

GridSpec GridSpec::from_json(const nlohmann::json& j) {
  GridSpec g;
  try {
    g.name = j.value("name", "grid");
    g.slack_bus_id = j.at("slack_bus_id").get<int>();
    for (const auto& jb : j.at("buses")) {
      Bus b;
      b.id = jb.at("id").get<int>();
      b.load_mw = jb.value("load_MW", 0.0);
      g.buses.push_back(b);
    }
    for (const auto& jb : j.at("branches")) {
      Branch b;
      b.from = jb.at("from").get<int>();
      b.to = jb.at("to").get<int>();
      b.name = jb.value("name", std::to_string(b.from) + "-" + std::to_string(b.to));
      b.reactance_pu = jb.at("reactance_pu").get<double>();
      b.rating_mw = jb.at("rating_MW").get<double>();
      b.emergency_rating_mw = jb.value("emergency_rating_MW", 1.1 * b.rating_mw);
      b.outage_candidate = jb.value("outage_eligible", true);
      g.branches.push_back(b);
    }
    for (const auto& jg : j.at("generators")) {
      Generator gen;
      gen.bus = jg.at("bus").get<int>();
      gen.kind = gen_kind_from_string(jg.value("kind", "thermal"));
      gen.name = jg.value("name", std::string(to_string(gen.kind)) + std::to_string(gen.bus));
      gen.p_min_mw = jg.value("p_min_MW", 0.0);
      gen.p_max_mw = jg.at("p_max_MW").get<double>();
      gen.cost_per_mwh = jg.value("marginal_cost_$/MWh", 0.0);
      g.generators.push_back(gen);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("grid spec: ") + e.what());
  }
  g.validate();
  return g;
}

GridSpec GridSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open grid spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "grid spec '" + path + "': " + e.what());
  }
  return from_json(j);
}

nlohmann::json GridSpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["slack_bus_id"] = slack_bus_id;
  j["buses"] = nlohmann::json::array();
  for (const Bus& b : buses) j["buses"].push_back({{"id", b.id}, {"load_MW", b.load_mw}});
  j["branches"] = nlohmann::json::array();
  for (const Branch& b : branches)
    j["branches"].push_back({{"name", b.name},
                             {"from", b.from},
                             {"to", b.to},
                             {"reactance_pu", b.reactance_pu},
                             {"rating_MW", b.rating_mw},
                             {"emergency_rating_MW", b.emergency_rating_mw},
                             {"outage_eligible", b.outage_candidate}});
  j["generators"] = nlohmann::json::array();
  for (const Generator& g : generators)
    j["generators"].push_back({{"name", g.name},
                               {"bus", g.bus},
                               {"p_min_MW", g.p_min_mw},
                               {"p_max_MW", g.p_max_mw},
                               {"marginal_cost_$/MWh", g.cost_per_mwh},
                               {"kind", to_string(g.kind)}});
  return j;
}

int GridSpec::bus_index(int bus_id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == bus_id) return static_cast<int>(i);
  return -1;
}

namespace {

bool connected_without(const GridSpec& g, int skip_branch) {
  if (g.buses.empty()) return false;
  std::vector<std::vector<int>> adj(g.buses.size());
  for (std::size_t k = 0; k < g.branches.size(); ++k) {
    if (static_cast<int>(k) == skip_branch) continue;
    int a = g.bus_index(g.branches[k].from), b = g.bus_index(g.branches[k].to);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(g.buses.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
}

}  // namespace

void GridSpec::validate() const {
  if (buses.empty()) fail(ErrorCode::InvalidArgument, "grid has no buses");
  std::set<int> ids;
  for (const Bus& b : buses)
    if (!ids.insert(b.id).second) fail(ErrorCode::InvalidArgument, "duplicate bus id " + std::to_string(b.id));
  if (bus_index(slack_bus_id) < 0) fail(ErrorCode::InvalidArgument, "slack bus id not found");
  for (const Branch& b : branches) {
    if (bus_index(b.from) < 0 || bus_index(b.to) < 0)
      fail(ErrorCode::InvalidArgument, "branch '" + b.name + "' references unknown bus");
    if (b.from == b.to) fail(ErrorCode::InvalidArgument, "branch '" + b.name + "' is a self-loop");
    if (!(b.reactance_pu > 0.0)) fail(ErrorCode::InvalidArgument, "branch '" + b.name + "' needs reactance > 0");
    if (b.rating_mw < 0.0 || b.emergency_rating_mw < 0.0)
      fail(ErrorCode::InvalidArgument, "branch '" + b.name + "' has a negative rating");
  }
  for (const Generator& g : generators) {
    if (bus_index(g.bus) < 0) fail(ErrorCode::InvalidArgument, "generator '" + g.name + "' references unknown bus");
    if (g.p_min_mw > g.p_max_mw) fail(ErrorCode::InvalidArgument, "generator '" + g.name + "' has p_min > p_max");
  }
  for (const Bus& b : buses)
    if (b.load_mw < 0.0) fail(ErrorCode::InvalidArgument, "bus " + std::to_string(b.id) + " has negative load");
  if (!connected_without(*this, -1)) fail(ErrorCode::InvalidArgument, "grid graph is not connected");
}

std::vector<int> GridSpec::dispatchable_gens() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (!is_renewable(generators[i].kind)) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> GridSpec::renewable_gens() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (is_renewable(generators[i].kind)) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> GridSpec::load_buses() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].load_mw > 0.0) out.push_back(static_cast<int>(i));
  return out;
}

Eigen::VectorXd GridSpec::nominal_loads() const {
  auto lb = load_buses();
  Eigen::VectorXd v(lb.size());
  for (std::size_t i = 0; i < lb.size(); ++i) v(i) = buses[lb[i]].load_mw;
  return v;
}

Eigen::VectorXd GridSpec::renewable_capacities() const {
  auto rg = renewable_gens();
  Eigen::VectorXd v(rg.size());
  for (std::size_t i = 0; i < rg.size(); ++i) v(i) = generators[rg[i]].p_max_mw;
  return v;
}

Eigen::VectorXd GridSpec::emergency_ratings() const {
  Eigen::VectorXd v(branches.size());
  for (std::size_t i = 0; i < branches.size(); ++i) v(i) = branches[i].emergency_rating_mw;
  return v;
}

std::uint64_t GridSpec::content_hash() const {
  std::string s = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

DcNetwork DcNetwork::build(const GridSpec& spec) {
  spec.validate();
  const int nb = static_cast<int>(spec.buses.size());
  const int nl = static_cast<int>(spec.branches.size());
  const int slack = spec.bus_index(spec.slack_bus_id);

  // Reduced susceptance matrix (slack row/column removed).
  auto red = [slack](int i) { return i < slack ? i : i - 1; };
  Eigen::MatrixXd b_red = Eigen::MatrixXd::Zero(nb - 1, nb - 1);
  for (const Branch& br : spec.branches) {
    double b = 1.0 / br.reactance_pu;
    int i = spec.bus_index(br.from), j = spec.bus_index(br.to);
    if (i != slack) b_red(red(i), red(i)) += b;
    if (j != slack) b_red(red(j), red(j)) += b;
    if (i != slack && j != slack) {
      b_red(red(i), red(j)) -= b;
      b_red(red(j), red(i)) -= b;
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(b_red);
  if (nb > 1 && !lu.isInvertible())
    fail(ErrorCode::Numeric, "singular reduced admittance matrix (islanded grid?)");
  Eigen::MatrixXd x_red = nb > 1 ? Eigen::MatrixXd(lu.inverse()) : Eigen::MatrixXd(0, 0);

  DcNetwork net;
  net.slack_index_ = slack;
  net.ptdf_ = Eigen::MatrixXd::Zero(nl, nb);
  for (int k = 0; k < nl; ++k) {
    const Branch& br = spec.branches[k];
    double b = 1.0 / br.reactance_pu;
    int i = spec.bus_index(br.from), j = spec.bus_index(br.to);
    for (int m = 0; m < nb; ++m) {
      if (m == slack) continue;  // slack column stays zero
      double theta_i = i == slack ? 0.0 : x_red(red(i), red(m));
      double theta_j = j == slack ? 0.0 : x_red(red(j), red(m));
      net.ptdf_(k, m) = b * (theta_i - theta_j);
    }
  }

  // LODF from PTDFs of the unit transfer across each branch.
  net.lodf_ = Eigen::MatrixXd::Zero(nl, nl);
  net.outage_eligible_.assign(nl, false);
  for (int k = 0; k < nl; ++k) {
    int i = spec.bus_index(spec.branches[k].from), j = spec.bus_index(spec.branches[k].to);
    double self = net.ptdf_(k, i) - net.ptdf_(k, j);
    if (!spec.branches[k].outage_candidate) continue;
    if (std::fabs(1.0 - self) < 1e-9) continue;  // bridge: outage would island the grid
    net.outage_eligible_[k] = true;
    for (int m = 0; m < nl; ++m) {
      if (m == k) continue;
      net.lodf_(m, k) = (net.ptdf_(m, i) - net.ptdf_(m, j)) / (1.0 - self);
    }
    net.lodf_(k, k) = -1.0;
  }
  return net;
}

Eigen::VectorXd DcNetwork::base_flows(const Eigen::VectorXd& injections) const {
  if (injections.size() != ptdf_.cols())
    fail(ErrorCode::InvalidArgument, "injection vector has wrong dimension");
  return ptdf_ * injections;
}

bool DcNetwork::n1_secure(const Eigen::VectorXd& flows, const Eigen::VectorXd& emergency_ratings,
                          std::vector<Violation>* report) const {
  const int nl = n_branches();
  if (flows.size() != nl || emergency_ratings.size() != nl)
    fail(ErrorCode::InvalidArgument, "flow/rating vector has wrong dimension");
  const double tol = 1e-7;
  bool secure = true;
  for (int k = 0; k < nl; ++k) {
    if (!outage_eligible_[k]) continue;
    for (int m = 0; m < nl; ++m) {
      if (m == k) continue;
      double post = flows(m) + lodf_(m, k) * flows(k);
      if (std::fabs(post) > emergency_ratings(m) + tol) {
        secure = false;
        if (report)
          report->push_back(Violation{k, m, post, 100.0 * std::fabs(post) / emergency_ratings(m)});
        else
          return false;
      }
    }
  }
  return secure;
}

EdProblem build_ed_lp(const GridSpec& spec, const DcNetwork& net, const Eigen::VectorXd& renewable_mw,
                      const Eigen::VectorXd& load_mw) {
  const auto disp = spec.dispatchable_gens();
  const auto ren = spec.renewable_gens();
  const auto lbus = spec.load_buses();
  if (renewable_mw.size() != static_cast<Eigen::Index>(ren.size()))
    fail(ErrorCode::InvalidArgument, "renewable vector has wrong dimension");
  if (load_mw.size() != static_cast<Eigen::Index>(lbus.size()))
    fail(ErrorCode::InvalidArgument, "load vector has wrong dimension");

  EdProblem ed;
  ed.n_dispatchable = static_cast<int>(disp.size());
  ed.n_renewable = static_cast<int>(ren.size());
  const int nb = net.n_buses();
  const int nv = ed.n_dispatchable + ed.n_renewable;

  ed.lp.name = spec.name + " economic dispatch";
  for (int gi : disp) {
    const Generator& g = spec.generators[gi];
    ed.lp.add_variable("g_" + g.name, g.p_min_mw, g.p_max_mw, g.cost_per_mwh);
  }
  for (std::size_t i = 0; i < ren.size(); ++i) {
    const Generator& g = spec.generators[ren[i]];
    double avail = renewable_mw(static_cast<Eigen::Index>(i));
    if (avail < 0.0) fail(ErrorCode::InvalidArgument, "negative renewable availability");
    ed.lp.add_variable("cur_" + g.name, 0.0, avail, 0.0);
  }

  // Affine map from LP variables to bus injections.
  ed.injection_map = Eigen::MatrixXd::Zero(nb, nv);
  ed.injection_base = Eigen::VectorXd::Zero(nb);
  for (std::size_t i = 0; i < disp.size(); ++i)
    ed.injection_map(spec.bus_index(spec.generators[disp[i]].bus), static_cast<int>(i)) += 1.0;
  for (std::size_t i = 0; i < ren.size(); ++i) {
    int b = spec.bus_index(spec.generators[ren[i]].bus);
    ed.injection_base(b) += renewable_mw(static_cast<Eigen::Index>(i));
    ed.injection_map(b, ed.n_dispatchable + static_cast<int>(i)) -= 1.0;
  }
  for (std::size_t i = 0; i < lbus.size(); ++i) {
    if (load_mw(static_cast<Eigen::Index>(i)) < 0.0) fail(ErrorCode::InvalidArgument, "negative load");
    ed.injection_base(lbus[i]) -= load_mw(static_cast<Eigen::Index>(i));
  }

  // Power balance: sum of injections is zero.
  {
    std::vector<std::pair<int, double>> terms;
    Eigen::VectorXd col_sum = ed.injection_map.colwise().sum();
    for (int v = 0; v < nv; ++v)
      if (col_sum(v) != 0.0) terms.emplace_back(v, col_sum(v));
    ed.lp.add_constraint("balance", std::move(terms), Relation::Equal, -ed.injection_base.sum());
  }

  // Base-case line limits: |PTDF (Ax + base)| <= rating.
  Eigen::MatrixXd flow_map = net.ptdf() * ed.injection_map;     // [branches x vars]
  Eigen::VectorXd flow_base = net.ptdf() * ed.injection_base;  // [branches]
  for (int k = 0; k < net.n_branches(); ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int v = 0; v < nv; ++v)
      if (flow_map(k, v) != 0.0) terms.emplace_back(v, flow_map(k, v));
    const std::string& bn = spec.branches[k].name;
    double r = spec.branches[k].rating_mw;
    ed.lp.add_constraint("flow_hi_" + bn, terms, Relation::LessEq, r - flow_base(k));
    ed.lp.add_constraint("flow_lo_" + bn, std::move(terms), Relation::GreaterEq, -r - flow_base(k));
  }
  return ed;
}

}  // namespace gridrules
