#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridrules/grid.hpp"
#include "gridrules/sampling.hpp"
#include "json.hpp"

namespace gridrules {

/// Labeled operating states. Row i of `x` is the feature vector p_i
/// (g, r, l, d, 1); labels are 0 = insecure, 1 = secure.
struct LabeledDataset {
  Eigen::MatrixXd x;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  int size() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
  int offset_index() const { return dim() - 1; }

  LabeledDataset subset(const std::vector<int>& rows) const;
};

struct DatasetMeta {
  std::uint64_t grid_hash = 0;
  nlohmann::json sampler;
  std::uint64_t seed = 0;
  int n_requested = 0;
  int n_generated = 0;
  int skipped_infeasible = 0;
};

/// Per-feature affine standardization (z-score). Constant columns, including
/// the trailing 1, keep mean 0 / scale 1 so they pass through unchanged.
struct Scaling {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Scaling identity(int dim);
  static Scaling fit(const Eigen::MatrixXd& x);
  bool is_identity() const;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  /// Map split parameters learned on scaled features back to raw units.
  /// The offset coordinate absorbs the means.
  Eigen::VectorXd unscale_theta(const Eigen::VectorXd& theta, int offset_index) const;

  nlohmann::json to_json() const;
  static Scaling from_json(const nlohmann::json& j);
};

/// Run ED for each scenario, assemble features, and label by N-1 security.
/// Infeasible scenarios are skipped and counted in meta. Deterministic in
/// scenario order regardless of `workers`.
LabeledDataset generate_dataset(const GridSpec& spec, const DcNetwork& net, const std::vector<Scenario>& scenarios,
                                int workers, DatasetMeta* meta = nullptr);

/// CSV persistence: header is feature names plus "label"; values are written
/// with 17 significant digits so the round trip is bit-exact.
void save_dataset_csv(const LabeledDataset& ds, const std::string& path);
void save_dataset_meta(const DatasetMeta& meta, const std::vector<std::string>& feature_names,
                       const std::string& csv_path);
LabeledDataset load_dataset_csv(const std::string& path);

/// k folds as (train indices, validation indices); a seeded shuffle is split
/// into contiguous blocks whose sizes differ by at most one.
std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(int n, int k, std::uint64_t seed);

}  // namespace gridrules
