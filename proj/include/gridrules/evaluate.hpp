#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridrules/dataset.hpp"
#include "gridrules/tree.hpp"
#include "json.hpp"

namespace gridrules {

/// One experiment record: a (variant, depth, lambda) configuration
/// cross-validated over k folds.
struct CrossValRow {
  TreeVariant variant = TreeVariant::Swodt;
  int depth = 0;
  double lambda1 = 0.0, lambda2 = 0.0;
  int folds = 0;
  double mean_val_error = 0.0, std_val_error = 0.0;
  double mean_train_error = 0.0;
  double mean_sparsity = 0.0;       // tree sparsity metric
  double mean_rule_sparsity = 0.0;  // restricted to secure-leaf ancestors
  double mean_leaves = 0.0;
  double mean_train_seconds = 0.0;

  nlohmann::json to_json() const;
};

struct ExperimentReport {
  std::vector<CrossValRow> rows;
  std::uint64_t seed = 0;
  int k = 0;
  int n_samples = 0, n_features = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// k-fold cross validation of one configuration. Fold training and the
/// reported metrics are deterministic given the seed; wall-clock fields are
/// the only nondeterministic outputs.
CrossValRow cross_validate(const LabeledDataset& ds, const TrainConfig& cfg, int k, std::uint64_t seed,
                           int workers = 0);

/// One cross-validation row per lambda: lambda1 = lambda2 = lambda for
/// SWODT, lambda2 = 0 for SWODTL. The grid must be sorted ascending.
ExperimentReport lambda_sweep(const LabeledDataset& ds, const TrainConfig& cfg, const std::vector<double>& lambdas,
                              int k, std::uint64_t seed, int workers = 0);

/// Cartesian sweep used by the CLI: every variant x depth x lambda combo.
/// UDT and WODT rows ignore the lambda grid (their lambdas are pinned to 0).
ExperimentReport sweep(const LabeledDataset& ds, const std::vector<TreeVariant>& variants,
                       const std::vector<int>& depths, const std::vector<double>& lambdas, const TrainConfig& base,
                       int k, std::uint64_t seed, int workers = 0);

}  // namespace gridrules
