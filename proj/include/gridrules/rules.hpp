#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridrules/tree.hpp"
#include "json.hpp"

namespace gridrules {

/// Half-space system of one secure leaf: rows are k * theta' of the leaf's
/// ancestors (k = -1 for a left turn, +1 for a right turn), so the leaf's
/// region is {p : rows * p >= 0}.
struct RuleMatrix {
  int leaf_id = -1;  // depth-first leaf index in the source tree
  std::vector<Eigen::VectorXd> rows;

  int depth() const { return static_cast<int>(rows.size()); }
  bool satisfied_by(const Eigen::VectorXd& p, double tol = 0.0) const;
};

struct RuleSet {
  std::vector<RuleMatrix> rules;  // one per secure leaf
  std::vector<std::string> feature_names;

  int dim() const { return static_cast<int>(feature_names.size()); }
  int size() const { return static_cast<int>(rules.size()); }

  nlohmann::json to_json() const;
  static RuleSet from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static RuleSet load(const std::string& path);
};

/// Depth-first walk of the tree collecting one RuleMatrix per secure leaf.
/// A tree with no secure leaves yields an empty set (callers should warn).
RuleSet extract_rules(const TreeModel& model);

/// Nonzero fraction over all rule rows (the paper's sparsity metric
/// restricted to ancestors of secure leaves).
double rule_sparsity(const RuleSet& rs);

/// One Big-M row: coeffs' p >= -big_m (1 - I) for the rule's indicator I.
struct BigMRow {
  Eigen::VectorXd coeffs;
  double big_m = 0.0;
};

struct BigMSystem {
  std::vector<std::vector<BigMRow>> rules;  // indexed like RuleSet::rules
};

/// Per-row M by interval arithmetic over the feature box:
/// M = max(0, -min_{p in box} coeffs' p) + margin. Requires finite bounds.
BigMSystem big_m_system(const RuleSet& rs, const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                        double margin = 1.0);

}  // namespace gridrules
