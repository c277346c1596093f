#include "gridrules/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gridrules/common.hpp"
#include "gridrules/rules.hpp"

namespace gridrules {

nlohmann::json CrossValRow::to_json() const {
  return nlohmann::json{{"variant", to_string(variant)},
                        {"depth", depth},
                        {"lambda1", lambda1},
                        {"lambda2", lambda2},
                        {"folds", folds},
                        {"mean_val_error", mean_val_error},
                        {"std_val_error", std_val_error},
                        {"mean_train_error", mean_train_error},
                        {"mean_sparsity", mean_sparsity},
                        {"mean_rule_sparsity", mean_rule_sparsity},
                        {"mean_leaves", mean_leaves},
                        {"mean_train_seconds", mean_train_seconds}};
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json jr = nlohmann::json::array();
  for (const CrossValRow& r : rows) jr.push_back(r.to_json());
  return nlohmann::json{{"seed", seed},
                        {"k", k},
                        {"n_samples", n_samples},
                        {"n_features", n_features},
                        {"rows", std::move(jr)}};
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "variant,depth,lambda1,lambda2,folds,mean_val_error,std_val_error,mean_train_error,"
        "mean_sparsity,mean_rule_sparsity,mean_leaves,mean_train_seconds\n";
  for (const CrossValRow& r : rows) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(r.variant), r.depth, r.lambda1, r.lambda2, r.folds, r.mean_val_error, r.std_val_error,
                  r.mean_train_error, r.mean_sparsity, r.mean_rule_sparsity, r.mean_leaves, r.mean_train_seconds);
    os << buf;
  }
  return os.str();
}

CrossValRow cross_validate(const LabeledDataset& ds, const TrainConfig& cfg, int k, std::uint64_t seed, int workers) {
  cfg.validate();
  bool has0 = false, has1 = false;
  for (int lab : ds.labels) (lab == 0 ? has0 : has1) = true;
  if (!has0 || !has1) fail(ErrorCode::InvalidArgument, "cross_validate: dataset has a single class");

  auto folds = kfold_split(ds.size(), k, seed);

  struct FoldOut {
    double val_error = 0.0, train_error = 0.0, sparsity = 0.0, rule_sparsity = 0.0;
    double leaves = 0.0, seconds = 0.0;
  };
  std::vector<FoldOut> out(folds.size());

  parallel_for(folds.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t f = begin; f < end; ++f) {
      LabeledDataset train = ds.subset(folds[f].first);
      LabeledDataset val = ds.subset(folds[f].second);
      auto t0 = std::chrono::steady_clock::now();
      TreeModel model = train_tree(train, cfg);
      out[f].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out[f].val_error = error_rate(model, val);
      out[f].train_error = model.stats.train_error;
      out[f].sparsity = model.stats.sparsity;
      out[f].rule_sparsity = rule_sparsity(extract_rules(model));
      out[f].leaves = model.stats.n_leaves;
    }
  });

  CrossValRow row;
  row.variant = cfg.variant;
  row.depth = cfg.max_depth;
  row.lambda1 = cfg.lambda1;
  row.lambda2 = cfg.lambda2;
  row.folds = k;
  for (const FoldOut& f : out) {
    row.mean_val_error += f.val_error;
    row.mean_train_error += f.train_error;
    row.mean_sparsity += f.sparsity;
    row.mean_rule_sparsity += f.rule_sparsity;
    row.mean_leaves += f.leaves;
    row.mean_train_seconds += f.seconds;
  }
  const double nk = static_cast<double>(k);
  row.mean_val_error /= nk;
  row.mean_train_error /= nk;
  row.mean_sparsity /= nk;
  row.mean_rule_sparsity /= nk;
  row.mean_leaves /= nk;
  row.mean_train_seconds /= nk;
  double var = 0.0;
  for (const FoldOut& f : out) var += (f.val_error - row.mean_val_error) * (f.val_error - row.mean_val_error);
  row.std_val_error = std::sqrt(var / nk);
  return row;
}

namespace {

TrainConfig with_lambdas(TrainConfig cfg, double l1, double l2) {
  cfg.lambda1 = l1;
  cfg.lambda2 = l2;
  return cfg;
}

}  // namespace

ExperimentReport lambda_sweep(const LabeledDataset& ds, const TrainConfig& cfg, const std::vector<double>& lambdas,
                              int k, std::uint64_t seed, int workers) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    fail(ErrorCode::InvalidArgument, "lambda_sweep: grid must be sorted ascending");
  ExperimentReport rep;
  rep.seed = seed;
  rep.k = k;
  rep.n_samples = ds.size();
  rep.n_features = ds.dim();
  for (double lam : lambdas) {
    double l2 = cfg.variant == TreeVariant::Swodt ? lam : 0.0;
    rep.rows.push_back(cross_validate(ds, with_lambdas(cfg, lam, l2), k, seed, workers));
  }
  return rep;
}

ExperimentReport sweep(const LabeledDataset& ds, const std::vector<TreeVariant>& variants,
                       const std::vector<int>& depths, const std::vector<double>& lambdas, const TrainConfig& base,
                       int k, std::uint64_t seed, int workers) {
  ExperimentReport rep;
  rep.seed = seed;
  rep.k = k;
  rep.n_samples = ds.size();
  rep.n_features = ds.dim();
  for (TreeVariant v : variants) {
    for (int d : depths) {
      TrainConfig cfg = base;
      cfg.variant = v;
      cfg.max_depth = d;
      if (v == TreeVariant::Udt || v == TreeVariant::Wodt) {
        rep.rows.push_back(cross_validate(ds, with_lambdas(cfg, 0.0, 0.0), k, seed, workers));
        continue;
      }
      for (double lam : lambdas) {
        double l2 = v == TreeVariant::Swodt ? lam : 0.0;
        rep.rows.push_back(cross_validate(ds, with_lambdas(cfg, lam, l2), k, seed, workers));
      }
    }
  }
  return rep;
}

}  // namespace gridrules
