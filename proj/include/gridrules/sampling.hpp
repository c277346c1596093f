#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gridrules/grid.hpp"
#include "json.hpp"

namespace gridrules {

/// One renewable/load scenario: availabilities over renewable_gens(),
/// loads over load_buses().
struct Scenario {
  Eigen::VectorXd renewable_mw;
  Eigen::VectorXd load_mw;
};

/// Marginal for a renewable kind: capacity factor ~ Beta(alpha, beta),
/// or pinned to `fixed` when set (>= 0).
struct CapacityFactorConfig {
  double alpha = 2.0;
  double beta = 2.5;
  double fixed = -1.0;
};

struct SamplerConfig {
  // Loads: truncated Gaussian around the nominal bus load.
  double load_rel_std = 0.15;
  double load_min_factor = 0.0;
  double load_max_factor = 2.0;
  double load_corr = 0.0;

  CapacityFactorConfig wind;
  CapacityFactorConfig pv;
  double renewable_corr = 0.5;  // site-to-site correlation (Gaussian copula)

  static SamplerConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

/// Gaussian-copula sampler: correlated standard normals mapped through the
/// marginal inverse CDFs. Deterministic for a given seed, independent of
/// platform and worker count.
class ScenarioSampler {
 public:
  ScenarioSampler(const GridSpec& spec, const SamplerConfig& cfg);

  std::vector<Scenario> sample(int n, std::uint64_t seed) const;

 private:
  SamplerConfig cfg_;
  std::vector<GenKind> ren_kinds_;
  Eigen::VectorXd ren_capacity_;
  Eigen::VectorXd load_nominal_;
  Eigen::MatrixXd chol_ren_;
  Eigen::MatrixXd chol_load_;
};

}  // namespace gridrules
