#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridrules/dataset.hpp"
#include "gridrules/owlqn.hpp"
#include "json.hpp"

namespace gridrules {

enum class TreeVariant { Udt, Wodt, Swodtl, Swodt };

TreeVariant tree_variant_from_string(const std::string& s);
const char* to_string(TreeVariant v);

struct TrainConfig {
  TreeVariant variant = TreeVariant::Swodt;
  int max_depth = 6;           // D
  int min_samples_split = 10;  // J: nodes with at most this many samples become leaves
  double lambda1 = 0.05;
  double lambda2 = 0.05;
  OwlqnConfig owlqn;
  std::uint64_t seed = 0;
  bool standardize = true;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct TreeNode {
  // Internal node when theta is non-empty; leaf otherwise.
  Eigen::VectorXd theta;
  std::unique_ptr<TreeNode> left, right;
  int label = -1;
  std::vector<long> class_counts;

  bool is_leaf() const { return theta.size() == 0; }
};

struct TreeStats {
  int depth = 0;
  int n_leaves = 0;
  int n_internal = 0;
  double sparsity = 0.0;  // nonzero split parameters / (n_internal * dim)
  double train_error = 0.0;
};

struct TreeModel {
  std::unique_ptr<TreeNode> root;
  std::vector<std::string> feature_names;
  TrainConfig config;
  Scaling scaling;  // fitted at training; split parameters are stored un-scaled
  TreeStats stats;

  int dim() const { return static_cast<int>(feature_names.size()); }
  int offset_index() const { return dim() - 1; }

  nlohmann::json to_json() const;
  static TreeModel from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static TreeModel load(const std::string& path);
};

/// Best univariate split by hard weighted entropy over midpoint thresholds.
/// Returns theta0 with theta0[j] = 1 and theta0[offset] = -t (so theta0'p < 0
/// iff p_j < t), or nullopt when no split strictly reduces the impurity.
/// Entropy ties resolve to the lowest feature index, then lowest threshold.
std::optional<Eigen::VectorXd> udt_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, int offset_index);

/// Recursive induction over the (optionally standardized) dataset.
TreeModel train_tree(const LabeledDataset& ds, const TrainConfig& cfg);

/// Hard-split traversal: theta'p < 0 goes left, otherwise right.
int predict(const TreeModel& model, const Eigen::VectorXd& p);
int predict_node(const TreeNode& node, const Eigen::VectorXd& p);

/// Misclassification rate of the model on a dataset in raw units.
double error_rate(const TreeModel& model, const LabeledDataset& ds);

}  // namespace gridrules
