// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria run at full scale; expect a few minutes total.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gridrules.h"
#include "gridrules/common.hpp"
#include "gridrules/dataset.hpp"
#include "gridrules/dispatch.hpp"
#include "gridrules/evaluate.hpp"
#include "gridrules/features.hpp"
#include "gridrules/grid.hpp"
#include "gridrules/objective.hpp"
#include "gridrules/owlqn.hpp"
#include "gridrules/rules.hpp"
#include "gridrules/sampling.hpp"
#include "gridrules/tree.hpp"

using namespace gridrules;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::string data_path(const char* name) { return std::string(TEST_DATA_DIR) + "/" + name; }

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared fixtures

NodeObjective random_node(Rng& rng, int n, int dim, double l2) {
  NodeObjective obj;
  obj.x.resize(n, dim);
  obj.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < dim; ++j) obj.x(i, j) = rng.uniform(-2.0, 2.0);
    obj.x(i, dim - 1) = 1.0;
    obj.y(i) = static_cast<int>(rng.below(2));
  }
  obj.lambda1 = 0.0;
  obj.lambda2 = l2;
  obj.offset_index = dim - 1;
  return obj;
}

// Oblique ground-truth dataset: the boundary is a dense linear function of
// several features, so univariate splits need depth to track it.
LabeledDataset oblique_dataset(std::uint64_t seed, int n, double noise) {
  Rng rng(seed);
  const int nf = 8;
  Eigen::VectorXd w(nf);
  w << 0.9, -0.8, 0.7, 0.6, -0.5, 0.0, 0.0, 0.0;
  LabeledDataset ds;
  ds.x.resize(n, nf + 1);
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nf; ++j) ds.x(i, j) = rng.uniform(-1.0, 1.0);
    ds.x(i, nf) = 1.0;
    double s = w.dot(ds.x.row(i).head(nf).transpose());
    ds.labels[i] = s > 0.15 ? 1 : 0;
    if (noise > 0.0 && rng.uniform01() < noise) ds.labels[i] = 1 - ds.labels[i];
  }
  for (int j = 0; j < nf; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  ds.feature_names.push_back("offset");
  return ds;
}

const LabeledDataset& ieee30_dataset() {
  static LabeledDataset ds = [] {
    GridSpec g = GridSpec::load(data_path("ieee30.json"));
    DcNetwork net = DcNetwork::build(g);
    ScenarioSampler sampler(g, SamplerConfig{});
    return generate_dataset(g, net, sampler.sample(8000, 7), 0, nullptr);
  }();
  return ds;
}

// ---------------------------------------------------------------------------
// 1. Gradient fidelity

Outcome criterion_gradient_fidelity() {
  double t0 = now_seconds();
  Rng rng(1001);
  double worst_rel = 0.0;
  for (int t = 0; t < 100; ++t) {
    int n = 2 + static_cast<int>(rng.below(49));    // N <= 50
    int dim = 2 + static_cast<int>(rng.below(9));   // dim <= 10
    NodeObjective obj = random_node(rng, n, dim, rng.uniform(0.0, 0.3));
    Eigen::VectorXd theta(dim);
    for (int j = 0; j < dim; ++j) theta(j) = rng.uniform(-1.0, 1.0);
    SmoothFn f = obj.smooth_fn();
    Eigen::VectorXd grad(dim), dump(dim);
    f(theta, grad);
    const double h = 1e-6;
    double worst_abs = 0.0;
    for (int j = 0; j < dim; ++j) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp(j) += h;
      tm(j) -= h;
      worst_abs = std::max(worst_abs, std::fabs(grad(j) - (f(tp, dump) - f(tm, dump)) / (2.0 * h)));
    }
    worst_rel = std::max(worst_rel, worst_abs / std::max(1.0, grad.lpNorm<Eigen::Infinity>()));
  }
  double dt = now_seconds() - t0;
  return {worst_rel < 1e-5 && dt < 10.0,
          fmt("max rel err %.2e (tol 1e-5), %.2f s (limit 10 s)", worst_rel, dt)};
}

// ---------------------------------------------------------------------------
// 2. Optimizer oracle

std::vector<Eigen::VectorXd> reference_lbfgs(const SmoothFn& f, const Eigen::VectorXd& x0, const OwlqnConfig& cfg) {
  std::vector<Eigen::VectorXd> iterates{x0};
  Eigen::VectorXd x = x0, grad(x0.size()), grad_next(x0.size());
  double fx = f(x, grad);
  std::deque<Eigen::VectorXd> s, y;
  std::deque<double> rho;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() <= cfg.tol_grad) break;
    Eigen::VectorXd v = -grad, d = v;
    if (!s.empty()) {
      std::vector<double> a(s.size());
      for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
        a[i] = rho[i] * s[i].dot(d);
        d -= a[i] * y[i];
      }
      d *= s.back().dot(y.back()) / y.back().squaredNorm();
      for (std::size_t i = 0; i < s.size(); ++i) {
        double b = rho[i] * y[i].dot(d);
        d += (a[i] - b) * s[i];
      }
    }
    double alpha = 1.0;
    Eigen::VectorXd cand;
    double f_cand = 0.0;
    bool ok = false;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      cand = x + alpha * d;
      f_cand = f(cand, grad_next);
      if (f_cand <= fx - cfg.sufficient_decrease * v.dot(cand - x)) {
        ok = true;
        break;
      }
      alpha *= cfg.backtrack_ratio;
    }
    if (!ok) break;
    Eigen::VectorXd sk = cand - x, yk = grad_next - grad;
    double fprev = fx;
    x = cand;
    fx = f_cand;
    grad.swap(grad_next);
    iterates.push_back(x);
    if (fprev - fx <= cfg.tol_obj * std::max(1.0, std::fabs(fprev))) break;
    double sy = sk.dot(yk);
    if (sy > cfg.curvature_eps) {
      s.push_back(sk);
      y.push_back(yk);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(s.size()) > cfg.memory) {
        s.pop_front();
        y.pop_front();
        rho.pop_front();
      }
    }
  }
  return iterates;
}

Outcome criterion_optimizer_oracle() {
  Rng rng(2002);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    int dim = 2 + static_cast<int>(rng.below(7));
    Eigen::VectorXd c(dim);
    for (int j = 0; j < dim; ++j) c(j) = rng.uniform(-3.0, 3.0);
    double lam = rng.uniform(0.0, 1.5);
    Eigen::VectorXd l1 = Eigen::VectorXd::Constant(dim, lam);
    l1(dim - 1) = 0.0;  // intercept exempt
    SmoothFn f = [c](const Eigen::VectorXd& th, Eigen::VectorXd& g) {
      g = th - c;
      return 0.5 * (th - c).squaredNorm();
    };
    OwlqnConfig cfg;
    cfg.tol_grad = 1e-10;
    cfg.tol_obj = 1e-16;
    OwlqnResult res = minimize(f, l1, Eigen::VectorXd::Zero(dim), cfg);
    for (int j = 0; j < dim; ++j) {
      double m = std::fabs(c(j)) - l1(j);
      double expect = m > 0.0 ? (c(j) > 0.0 ? m : -m) : 0.0;
      worst = std::max(worst, std::fabs(res.theta(j) - expect));
    }
  }

  // Reduction: lambda1 = 0 iterates coincide with plain L-BFGS.
  double worst_iterate_gap = 0.0;
  int compared = 0;
  for (int t = 0; t < 30; ++t) {
    int dim = 2 + static_cast<int>(rng.below(5));
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd a = m.transpose() * m + 0.5 * Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd target(dim), x0(dim);
    for (int j = 0; j < dim; ++j) {
      target(j) = rng.uniform(1.0, 2.0);
      x0(j) = rng.uniform(1.0, 2.0);
    }
    Eigen::VectorXd b = a * target;
    SmoothFn f = [a, b](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      g = a * x - b;
      return 0.5 * x.dot(a * x) - b.dot(x);
    };
    OwlqnConfig cfg;
    cfg.tol_grad = 1e-9;
    cfg.tol_obj = 1e-16;
    std::vector<Eigen::VectorXd> ref = reference_lbfgs(f, x0, cfg);
    std::vector<Eigen::VectorXd> mine{x0};
    minimize(f, Eigen::VectorXd::Zero(dim), x0, cfg,
             [&](const OwlqnIterRecord& r) { mine.push_back(r.theta_next); });
    if (mine.size() != ref.size()) return {false, fmt("iterate count mismatch %zu vs %zu", mine.size(), ref.size())};
    for (std::size_t i = 0; i < ref.size(); ++i)
      worst_iterate_gap = std::max(worst_iterate_gap, (mine[i] - ref[i]).lpNorm<Eigen::Infinity>());
    ++compared;
  }
  bool pass = worst < 1e-6 && worst_iterate_gap < 1e-10 && compared == 30;
  return {pass, fmt("soft-threshold err %.2e (tol 1e-6); l-bfgs iterate gap %.2e (tol 1e-10) over %d runs", worst,
                    worst_iterate_gap, compared)};
}

// ---------------------------------------------------------------------------
// 3. Orthant discipline

Outcome criterion_orthant_discipline() {
  const LabeledDataset& full = ieee30_dataset();
  Scaling sc = Scaling::fit(full.x);
  Eigen::MatrixXd xs = sc.apply(full.x);
  Rng rng(3003);
  int runs = 0, violations = 0;
  long steps = 0;
  for (int t = 0; t < 20; ++t) {
    int n = 200 + static_cast<int>(rng.below(3800));
    Eigen::MatrixXd x(n, full.dim());
    Eigen::VectorXi y(n);
    int c0 = 0, c1 = 0;
    for (int i = 0; i < n; ++i) {
      int row = static_cast<int>(rng.below(full.size()));
      x.row(i) = xs.row(row);
      y(i) = full.labels[row];
      (y(i) == 0 ? c0 : c1)++;
    }
    if (c0 == 0 || c1 == 0) {
      --t;
      continue;
    }
    NodeObjective obj;
    obj.x = x;
    obj.y = y;
    obj.lambda1 = t % 2 == 0 ? 0.05 : 0.01;
    obj.lambda2 = t % 3 == 0 ? 0.0 : obj.lambda1;
    obj.offset_index = full.offset_index();
    auto theta0 = udt_best_split(x, y, obj.offset_index);
    if (!theta0) {
      --t;
      continue;
    }
    OwlqnConfig cfg;
    double prev_obj = std::numeric_limits<double>::infinity();
    minimize(obj.smooth_fn(), obj.l1_weights(), *theta0, cfg, [&](const OwlqnIterRecord& r) {
      ++steps;
      for (int i = 0; i < r.theta_next.size(); ++i)
        if (r.theta_next(i) * r.xi(i) < 0.0) ++violations;
      if (r.e_next > r.e_prev - cfg.sufficient_decrease * r.v.dot(r.theta_next - r.theta_prev) + 1e-12) ++violations;
      if (r.e_next > r.e_prev || r.e_prev > prev_obj + 1e-15) ++violations;
      prev_obj = r.e_next;
    });
    ++runs;
  }
  return {runs == 20 && violations == 0 && steps > 100,
          fmt("%d runs, %ld recorded steps, %d violations", runs, steps, violations)};
}

// ---------------------------------------------------------------------------
// 4. Rules equal traversal

Outcome criterion_rules_traversal() {
  Rng rng(4004);
  int trees = 0, checked = 0, mismatches = 0;
  const TreeVariant variants[5] = {TreeVariant::Swodt, TreeVariant::Swodtl, TreeVariant::Wodt, TreeVariant::Udt,
                                   TreeVariant::Swodt};
  for (int t = 0; t < 5; ++t) {
    LabeledDataset ds = oblique_dataset(9000 + t, 1500, 0.03);
    TrainConfig cfg;
    cfg.variant = variants[t];
    cfg.max_depth = 3 + t % 4;  // depths 3..6
    cfg.lambda1 = cfg.variant == TreeVariant::Udt || cfg.variant == TreeVariant::Wodt ? 0.0 : 0.01;
    cfg.lambda2 = cfg.variant == TreeVariant::Swodt ? cfg.lambda1 : 0.0;
    TreeModel model = train_tree(ds, cfg);
    RuleSet rs = extract_rules(model);
    ++trees;

    std::vector<Eigen::VectorXd> splits;
    std::function<void(const TreeNode&)> collect = [&](const TreeNode& n) {
      if (n.is_leaf()) return;
      splits.push_back(n.theta);
      collect(*n.left);
      collect(*n.right);
    };
    collect(*model.root);

    for (int i = 0; i < 10000; ++i) {
      Eigen::VectorXd p(ds.dim());
      for (int j = 0; j + 1 < ds.dim(); ++j) p(j) = rng.uniform(-1.2, 1.2);
      p(ds.dim() - 1) = 1.0;
      bool near = false;
      for (const Eigen::VectorXd& s : splits)
        if (std::fabs(s.dot(p)) < 1e-9) near = true;
      if (near) continue;
      ++checked;
      int sat = 0;
      for (const RuleMatrix& r : rs.rules) sat += r.satisfied_by(p) ? 1 : 0;
      bool secure = predict(model, p) == 1;
      if (sat != (secure ? 1 : 0)) ++mismatches;
    }
  }
  return {trees == 5 && mismatches == 0 && checked > 49000,
          fmt("%d trees, %d vectors checked, %d mismatches", trees, checked, mismatches)};
}

// ---------------------------------------------------------------------------
// 5. LODF oracle

Outcome criterion_lodf_oracle() {
  double worst = 0.0;
  int outages = 0;
  for (const char* name : {"toy6.json", "ieee30.json"}) {
    GridSpec g = GridSpec::load(data_path(name));
    DcNetwork net = DcNetwork::build(g);
    const int nb = net.n_buses(), nl = net.n_branches();
    Rng rng(5005);
    for (int k = 0; k < nl; ++k) {
      if (!net.outage_eligible()[k]) continue;
      ++outages;
      GridSpec without = g;
      without.branches.erase(without.branches.begin() + k);
      DcNetwork net2 = DcNetwork::build(without);
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd inj(nb);
        for (int b = 0; b < nb; ++b) inj(b) = rng.uniform(-50.0, 50.0);
        inj(net.slack_index()) -= inj.sum();
        Eigen::VectorXd f = net.base_flows(inj);
        Eigen::VectorXd f2 = net2.base_flows(inj);
        for (int m = 0, m2 = 0; m < nl; ++m) {
          if (m == k) continue;
          worst = std::max(worst, std::fabs(f(m) + net.lodf()(m, k) * f(k) - f2(m2)));
          ++m2;
        }
      }
    }
  }
  return {worst < 1e-8 && outages > 30, fmt("max abs err %.2e over %d outages x 100 injections (tol 1e-8)", worst,
                                            outages)};
}

// ---------------------------------------------------------------------------
// 6. Dispatch exactness

Outcome criterion_dispatch_exactness() {
  double worst = 0.0;
  int compared = 0, agreed_infeasible = 0;
  for (const char* name : {"toy6.json", "ieee30.json"}) {
    GridSpec g = GridSpec::load(data_path(name));
    DcNetwork net = DcNetwork::build(g);
    ScenarioSampler sampler(g, SamplerConfig{});
    LabeledDataset ds = generate_dataset(g, net, sampler.sample(1500, 66), 0, nullptr);
    TrainConfig cfg;
    cfg.variant = TreeVariant::Swodt;
    cfg.lambda1 = cfg.lambda2 = 0.01;
    cfg.max_depth = 4;
    TreeModel model = train_tree(ds, cfg);
    RuleSet rs = extract_rules(model);
    if (rs.size() < 1 || rs.size() > 16) return {false, fmt("%s: G=%d outside [1,16]", name, rs.size())};

    for (const Scenario& sc : sampler.sample(10, 6006)) {
      DispatchResult mine = secure_dispatch(g, net, rs, sc);
      BigMMilp milp = build_big_m_milp(g, net, rs, sc);
      bool any = false;
      double best = kInf;
      for (std::size_t i = 0; i < milp.indicator_vars.size(); ++i) {
        LinearProgram pinned = milp.lp;
        for (std::size_t j = 0; j < milp.indicator_vars.size(); ++j) {
          double v = i == j ? 1.0 : 0.0;
          pinned.vars[milp.indicator_vars[j]].lower = v;
          pinned.vars[milp.indicator_vars[j]].upper = v;
        }
        LpSolution s = solve_lp(pinned);
        if (s.status == LpStatus::Optimal) {
          any = true;
          best = std::min(best, s.objective);
        }
      }
      if (mine.status == DispatchStatus::Optimal) {
        if (!any) return {false, "decomposition feasible but enumeration infeasible"};
        worst = std::max(worst, std::fabs(mine.cost - best) / std::max(1.0, std::fabs(best)));
        ++compared;
      } else {
        if (any) return {false, "enumeration feasible but decomposition infeasible"};
        ++agreed_infeasible;
      }
    }
  }
  return {worst < 1e-7 && compared + agreed_infeasible == 20 && compared >= 15,
          fmt("max rel gap %.2e over %d scenarios (+%d agreed infeasible), tol 1e-7", worst, compared,
              agreed_infeasible)};
}

// ---------------------------------------------------------------------------
// 7. Sparsity trend

Outcome criterion_sparsity_trend() {
  const LabeledDataset& ds = ieee30_dataset();
  double swodt_sparsity = 0.0, wodt_sparsity = 0.0, swodt_leaves = 0.0, wodt_leaves = 0.0;
  int n_runs = 0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto folds = kfold_split(ds.size(), 5, seed);
    for (const auto& [train_idx, val_idx] : folds) {
      LabeledDataset train = ds.subset(train_idx);
      TrainConfig sw;
      sw.variant = TreeVariant::Swodt;
      sw.lambda1 = sw.lambda2 = 0.05;
      sw.max_depth = 6;
      TreeModel ms = train_tree(train, sw);
      swodt_sparsity += rule_sparsity(extract_rules(ms));
      swodt_leaves += ms.stats.n_leaves;
      TrainConfig wo;
      wo.variant = TreeVariant::Wodt;
      wo.lambda1 = wo.lambda2 = 0.0;
      wo.max_depth = 6;
      TreeModel mw = train_tree(train, wo);
      wodt_sparsity += rule_sparsity(extract_rules(mw));
      wodt_leaves += mw.stats.n_leaves;
      ++n_runs;
    }
  }
  swodt_sparsity /= n_runs;
  wodt_sparsity /= n_runs;
  swodt_leaves /= n_runs;
  wodt_leaves /= n_runs;
  bool pass = swodt_sparsity < 0.5 * wodt_sparsity && swodt_leaves < wodt_leaves && n_runs == 15;
  return {pass, fmt("sparsity %.3f vs %.3f (need < 50%%), leaves %.1f vs %.1f, %d fold-runs", swodt_sparsity,
                    wodt_sparsity, swodt_leaves, wodt_leaves, n_runs)};
}

// ---------------------------------------------------------------------------
// 8. Accuracy ordering

Outcome criterion_accuracy_ordering() {
  LabeledDataset ds = oblique_dataset(8008, 3000, 0.01);
  std::ostringstream detail;
  bool pass = true;
  for (int depth : {3, 4, 5, 6}) {
    double udt = 0.0, wodt = 0.0, swodt = 0.0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      TrainConfig u;
      u.variant = TreeVariant::Udt;
      u.lambda1 = u.lambda2 = 0.0;
      u.max_depth = depth;
      udt += cross_validate(ds, u, 5, seed, 0).mean_val_error;
      TrainConfig w;
      w.variant = TreeVariant::Wodt;
      w.lambda1 = w.lambda2 = 0.0;
      w.max_depth = depth;
      wodt += cross_validate(ds, w, 5, seed, 0).mean_val_error;
      TrainConfig s;
      s.variant = TreeVariant::Swodt;
      s.lambda1 = s.lambda2 = 0.01;
      s.max_depth = depth;
      swodt += cross_validate(ds, s, 5, seed, 0).mean_val_error;
    }
    udt /= 3.0;
    wodt /= 3.0;
    swodt /= 3.0;
    bool ok = swodt <= wodt + 0.005 && swodt < udt && wodt < udt;
    pass = pass && ok;
    detail << fmt("d%d: udt %.3f wodt %.3f swodt %.3f%s  ", depth, udt, wodt, swodt, ok ? "" : " (FAIL)");
  }
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 9. Secure-rate improvement

Outcome criterion_secure_rate() {
  GridSpec g = GridSpec::load(data_path("ieee30.json"));
  DcNetwork net = DcNetwork::build(g);
  const LabeledDataset& ds = ieee30_dataset();
  TrainConfig cfg;
  cfg.variant = TreeVariant::Swodt;
  cfg.lambda1 = cfg.lambda2 = 0.01;
  cfg.max_depth = 6;
  TreeModel model = train_tree(ds, cfg);
  RuleSet rs = extract_rules(model);
  if (rs.size() == 0) return {false, "no secure leaves"};
  SecurityReport rep = evaluate_security_rate(g, net, rs, SamplerConfig{}, 2000, 11, 0);
  double gain = rep.constrained_secure_pct() - rep.base_secure_pct();
  bool pass = gain >= 10.0 && rep.avg_constrained_seconds < 0.5;
  return {pass, fmt("secure %.1f%% -> %.1f%% (gain %.1f pts, need >= 10); avg solve %.4f s (limit 0.5)",
                    rep.base_secure_pct(), rep.constrained_secure_pct(), gain, rep.avg_constrained_seconds)};
}

// ---------------------------------------------------------------------------
// 10. Determinism

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return "<missing " + path + ">";
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Outcome criterion_determinism() {
  // Full pipeline twice through the C API with one seed; artifacts must be
  // byte-identical.
  for (int round = 0; round < 2; ++round) {
    grs_grid* grid = nullptr;
    grs_network* net = nullptr;
    grs_dataset* ds = nullptr;
    grs_model* model = nullptr;
    grs_ruleset* rules = nullptr;
    if (grs_grid_load(data_path("ieee30.json").c_str(), &grid) != GRS_OK) return {false, grs_last_error()};
    if (grs_network_build(grid, &net) != GRS_OK) return {false, grs_last_error()};
    if (grs_dataset_generate(grid, net, nullptr, 1000, 7, round + 1, &ds) != GRS_OK)
      return {false, grs_last_error()};
    const char* tc = R"({"variant":"swodt","max_depth":6,"lambda1":0.05,"lambda2":0.05,"seed":7})";
    if (grs_model_train(ds, tc, &model) != GRS_OK) return {false, grs_last_error()};
    if (grs_rules_extract(model, &rules) != GRS_OK) return {false, grs_last_error()};
    std::string sfx = round == 0 ? "a" : "b";
    if (grs_dataset_save(ds, ("/tmp/grs_acc_ds_" + sfx + ".csv").c_str()) != GRS_OK)
      return {false, grs_last_error()};
    if (grs_model_save(model, ("/tmp/grs_acc_model_" + sfx + ".json").c_str()) != GRS_OK)
      return {false, grs_last_error()};
    if (grs_rules_save(rules, ("/tmp/grs_acc_rules_" + sfx + ".json").c_str()) != GRS_OK)
      return {false, grs_last_error()};
    grs_ruleset_free(rules);
    grs_model_free(model);
    grs_dataset_free(ds);
    grs_network_free(net);
    grs_grid_free(grid);
  }
  bool ds_eq = slurp("/tmp/grs_acc_ds_a.csv") == slurp("/tmp/grs_acc_ds_b.csv");
  bool model_eq = slurp("/tmp/grs_acc_model_a.json") == slurp("/tmp/grs_acc_model_b.json");
  bool rules_eq = slurp("/tmp/grs_acc_rules_a.json") == slurp("/tmp/grs_acc_rules_b.json");
  for (const char* f :
       {"/tmp/grs_acc_ds_a.csv", "/tmp/grs_acc_ds_b.csv", "/tmp/grs_acc_ds_a.csv.meta.json",
        "/tmp/grs_acc_ds_b.csv.meta.json", "/tmp/grs_acc_model_a.json", "/tmp/grs_acc_model_b.json",
        "/tmp/grs_acc_rules_a.json", "/tmp/grs_acc_rules_b.json"})
    std::remove(f);
  return {ds_eq && model_eq && rules_eq,
          fmt("dataset %s, model %s, rules %s", ds_eq ? "identical" : "DIFFER", model_eq ? "identical" : "DIFFER",
              rules_eq ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient fidelity vs finite differences", criterion_gradient_fidelity},
      {2, "optimizer soft-threshold oracle and l-bfgs reduction", criterion_optimizer_oracle},
      {3, "orthant discipline and sufficient decrease", criterion_orthant_discipline},
      {4, "rules equal traversal", criterion_rules_traversal},
      {5, "lodf equals re-solved n-1 flows", criterion_lodf_oracle},
      {6, "per-leaf decomposition equals big-M enumeration", criterion_dispatch_exactness},
      {7, "sparsity and leaf-count trend vs wodt", criterion_sparsity_trend},
      {8, "accuracy ordering on an oblique boundary", criterion_accuracy_ordering},
      {9, "secure-rate improvement on ieee30", criterion_secure_rate},
      {10, "pipeline determinism", criterion_determinism},
  };

  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_pass = true;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    double t0 = now_seconds();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && out.pass;
    std::printf("[%s] %2d. %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                now_seconds() - t0);
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
