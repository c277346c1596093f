#include "gridrules/dispatch.hpp"

#include <chrono>
#include <cmath>

#include "gridrules/common.hpp"
#include "gridrules/features.hpp"

namespace gridrules {

const char* to_string(DispatchStatus s) {
  switch (s) {
    case DispatchStatus::Optimal: return "optimal";
    case DispatchStatus::AllRulesInfeasible: return "all_rules_infeasible";
    case DispatchStatus::BaseInfeasible: return "base_infeasible";
  }
  return "?";
}

FeatureMap build_feature_map(const GridSpec& spec, const DcNetwork& net, const EdProblem& ed,
                             const Scenario& scenario) {
  const FeatureSchema schema = FeatureSchema::from_grid(spec);
  const int nv = ed.n_dispatchable + ed.n_renewable;
  FeatureMap fm;
  fm.a = Eigen::MatrixXd::Zero(schema.dim(), nv);
  fm.b = Eigen::VectorXd::Zero(schema.dim());

  for (int i = 0; i < schema.n_dispatchable; ++i) fm.a(schema.g_begin() + i, i) = 1.0;
  for (int i = 0; i < schema.n_renewable; ++i) {
    fm.a(schema.r_begin() + i, ed.n_dispatchable + i) = -1.0;
    fm.b(schema.r_begin() + i) = scenario.renewable_mw(i);
  }
  fm.a.middleRows(schema.l_begin(), schema.n_branches) = net.ptdf() * ed.injection_map;
  fm.b.segment(schema.l_begin(), schema.n_branches) = net.ptdf() * ed.injection_base;
  fm.b.segment(schema.d_begin(), schema.n_loads) = scenario.load_mw;
  fm.b(schema.offset_index()) = 1.0;
  return fm;
}

void feature_box(const GridSpec& spec, const Scenario& scenario, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const FeatureSchema schema = FeatureSchema::from_grid(spec);
  lo.resize(schema.dim());
  hi.resize(schema.dim());
  auto disp = spec.dispatchable_gens();
  auto ren = spec.renewable_gens();
  for (std::size_t i = 0; i < disp.size(); ++i) {
    lo(schema.g_begin() + i) = spec.generators[disp[i]].p_min_mw;
    hi(schema.g_begin() + i) = spec.generators[disp[i]].p_max_mw;
  }
  for (std::size_t i = 0; i < ren.size(); ++i) {
    lo(schema.r_begin() + i) = 0.0;
    hi(schema.r_begin() + i) = spec.generators[ren[i]].p_max_mw;
  }
  for (int k = 0; k < schema.n_branches; ++k) {
    lo(schema.l_begin() + k) = -spec.branches[k].rating_mw;
    hi(schema.l_begin() + k) = spec.branches[k].rating_mw;
  }
  for (int i = 0; i < schema.n_loads; ++i) {
    lo(schema.d_begin() + i) = scenario.load_mw(i);
    hi(schema.d_begin() + i) = scenario.load_mw(i);
  }
  lo(schema.offset_index()) = 1.0;
  hi(schema.offset_index()) = 1.0;
}

namespace {

void check_rule_dims(const GridSpec& spec, const RuleSet& rules) {
  const FeatureSchema schema = FeatureSchema::from_grid(spec);
  if (rules.dim() != schema.dim())
    fail(ErrorCode::InvalidArgument, "rules feature dimension does not match the grid's feature schema");
  if (rules.feature_names != schema.names)
    fail(ErrorCode::InvalidArgument, "rules feature names do not match the grid's feature schema");
}

}  // namespace

DispatchResult base_dispatch(const GridSpec& spec, const DcNetwork& net, const Scenario& scenario) {
  auto t0 = std::chrono::steady_clock::now();
  EdProblem ed = build_ed_lp(spec, net, scenario.renewable_mw, scenario.load_mw);
  LpSolution sol = solve_lp(ed.lp);
  DispatchResult out;
  out.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (sol.status != LpStatus::Optimal) {
    out.status = DispatchStatus::BaseInfeasible;
    return out;
  }
  out.status = DispatchStatus::Optimal;
  out.cost = sol.objective;
  out.x = sol.x;
  out.features = build_feature_map(spec, net, ed, scenario).features(sol.x);
  return out;
}

DispatchResult secure_dispatch(const GridSpec& spec, const DcNetwork& net, const RuleSet& rules,
                               const Scenario& scenario) {
  if (rules.size() == 0) fail(ErrorCode::InvalidArgument, "secure_dispatch: empty rule set");
  check_rule_dims(spec, rules);

  auto t0 = std::chrono::steady_clock::now();
  EdProblem ed = build_ed_lp(spec, net, scenario.renewable_mw, scenario.load_mw);
  FeatureMap fm = build_feature_map(spec, net, ed, scenario);
  const int nv = static_cast<int>(ed.lp.vars.size());

  DispatchResult best;
  best.status = DispatchStatus::AllRulesInfeasible;
  for (const RuleMatrix& rule : rules.rules) {
    LinearProgram lp = ed.lp;  // copy of the base ED
    for (std::size_t j = 0; j < rule.rows.size(); ++j) {
      const Eigen::VectorXd& row = rule.rows[j];
      Eigen::VectorXd coef = fm.a.transpose() * row;
      std::vector<std::pair<int, double>> terms;
      for (int v = 0; v < nv; ++v)
        if (coef(v) != 0.0) terms.emplace_back(v, coef(v));
      lp.add_constraint("rule" + std::to_string(rule.leaf_id) + "_" + std::to_string(j), std::move(terms),
                        Relation::GreaterEq, -row.dot(fm.b));
    }
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) continue;
    if (best.status != DispatchStatus::Optimal || sol.objective < best.cost) {
      best.status = DispatchStatus::Optimal;
      best.cost = sol.objective;
      best.x = sol.x;
      best.active_leaf = rule.leaf_id;
    }
  }
  best.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (best.status == DispatchStatus::Optimal) best.features = fm.features(best.x);
  return best;
}

BigMMilp build_big_m_milp(const GridSpec& spec, const DcNetwork& net, const RuleSet& rules, const Scenario& scenario,
                          double margin) {
  if (rules.size() == 0) fail(ErrorCode::InvalidArgument, "big-M export: empty rule set");
  check_rule_dims(spec, rules);

  EdProblem ed = build_ed_lp(spec, net, scenario.renewable_mw, scenario.load_mw);
  FeatureMap fm = build_feature_map(spec, net, ed, scenario);
  Eigen::VectorXd lo, hi;
  feature_box(spec, scenario, lo, hi);
  BigMSystem sys = big_m_system(rules, lo, hi, margin);

  BigMMilp out;
  out.lp = ed.lp;
  out.lp.name = spec.name + " security-constrained economic dispatch (big-M)";
  out.n_ed_vars = static_cast<int>(out.lp.vars.size());
  const int nv = out.n_ed_vars;

  for (int i = 0; i < rules.size(); ++i)
    out.indicator_vars.push_back(out.lp.add_variable("I_" + std::to_string(rules.rules[i].leaf_id), 0.0, 1.0, 0.0));

  for (int i = 0; i < rules.size(); ++i) {
    const auto& rows = sys.rules[i];
    for (std::size_t j = 0; j < rows.size(); ++j) {
      // row' (a x + b) >= -M (1 - I)  <=>  row'a x - M I >= -row'b - M
      Eigen::VectorXd coef = fm.a.transpose() * rows[j].coeffs;
      std::vector<std::pair<int, double>> terms;
      for (int v = 0; v < nv; ++v)
        if (coef(v) != 0.0) terms.emplace_back(v, coef(v));
      terms.emplace_back(out.indicator_vars[i], -rows[j].big_m);
      out.lp.add_constraint(
          "rule" + std::to_string(rules.rules[i].leaf_id) + "_" + std::to_string(j), std::move(terms),
          Relation::GreaterEq, -rows[j].coeffs.dot(fm.b) - rows[j].big_m);
    }
  }

  // One active leaf. Redundant for feasibility but tightens branching.
  std::vector<std::pair<int, double>> ones;
  for (int iv : out.indicator_vars) ones.emplace_back(iv, 1.0);
  out.lp.add_constraint("pick_one_leaf", std::move(ones), Relation::Equal, 1.0);
  return out;
}

nlohmann::json SecurityReport::to_json() const {
  nlohmann::json leaves = nlohmann::json::object();
  for (const auto& [leaf, count] : leaf_activations) leaves[std::to_string(leaf)] = count;
  return nlohmann::json{
      {"n_scenarios", n_scenarios},
      {"unconstrained",
       {{"feasible", base_feasible},
        {"secure", base_secure},
        {"secure_pct", base_secure_pct()},
        {"avg_solve_seconds", avg_base_seconds},
        {"avg_cost", avg_base_cost}}},
      {"constrained",
       {{"feasible", constrained_feasible},
        {"secure", constrained_secure},
        {"secure_pct", constrained_secure_pct()},
        {"avg_solve_seconds", avg_constrained_seconds},
        {"avg_cost", avg_constrained_cost},
        {"all_rules_infeasible", all_rules_infeasible},
        {"leaf_activations", leaves}}}};
}

SecurityReport evaluate_security_rate(const GridSpec& spec, const DcNetwork& net, const RuleSet& rules,
                                      const SamplerConfig& sampler, int n_scenarios, std::uint64_t seed,
                                      int workers) {
  check_rule_dims(spec, rules);
  ScenarioSampler gen(spec, sampler);
  std::vector<Scenario> scenarios = gen.sample(n_scenarios, seed);
  const Eigen::VectorXd emergency = spec.emergency_ratings();
  const FeatureSchema schema = FeatureSchema::from_grid(spec);

  struct Slot {
    int base_feasible = 0, base_secure = 0;
    int cons_feasible = 0, cons_secure = 0, cons_all_infeasible = 0;
    double base_seconds = 0.0, cons_seconds = 0.0;
    double base_cost = 0.0, cons_cost = 0.0;
    int active_leaf = -1;
  };
  std::vector<Slot> slots(scenarios.size());

  parallel_for(scenarios.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      Slot& slot = slots[s];
      DispatchResult base = base_dispatch(spec, net, scenarios[s]);
      slot.base_seconds = base.solve_seconds;
      if (base.status == DispatchStatus::Optimal) {
        slot.base_feasible = 1;
        slot.base_cost = base.cost;
        Eigen::VectorXd flows = base.features.segment(schema.l_begin(), schema.n_branches);
        slot.base_secure = net.n1_secure(flows, emergency) ? 1 : 0;
      }
      DispatchResult cons = secure_dispatch(spec, net, rules, scenarios[s]);
      slot.cons_seconds = cons.solve_seconds;
      if (cons.status == DispatchStatus::Optimal) {
        slot.cons_feasible = 1;
        slot.cons_cost = cons.cost;
        slot.active_leaf = cons.active_leaf;
        Eigen::VectorXd flows = cons.features.segment(schema.l_begin(), schema.n_branches);
        slot.cons_secure = net.n1_secure(flows, emergency) ? 1 : 0;
      } else {
        slot.cons_all_infeasible = 1;
      }
    }
  });

  SecurityReport rep;
  rep.n_scenarios = static_cast<int>(scenarios.size());
  for (const Slot& s : slots) {
    rep.base_feasible += s.base_feasible;
    rep.base_secure += s.base_secure;
    rep.constrained_feasible += s.cons_feasible;
    rep.constrained_secure += s.cons_secure;
    rep.all_rules_infeasible += s.cons_all_infeasible;
    rep.avg_base_seconds += s.base_seconds;
    rep.avg_constrained_seconds += s.cons_seconds;
    if (s.base_feasible) rep.avg_base_cost += s.base_cost;
    if (s.cons_feasible) {
      rep.avg_constrained_cost += s.cons_cost;
      ++rep.leaf_activations[s.active_leaf];
    }
  }
  if (rep.n_scenarios > 0) {
    rep.avg_base_seconds /= rep.n_scenarios;
    rep.avg_constrained_seconds /= rep.n_scenarios;
  }
  if (rep.base_feasible > 0) rep.avg_base_cost /= rep.base_feasible;
  if (rep.constrained_feasible > 0) rep.avg_constrained_cost /= rep.constrained_feasible;
  return rep;
}

}  // namespace gridrules
