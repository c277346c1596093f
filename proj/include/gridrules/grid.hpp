#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridrules/lp.hpp"
#include "json.hpp"

namespace gridrules {

struct Bus {
  int id = 0;
  double load_mw = 0.0;
};

enum class GenKind { Thermal, Hydro, Wind, Pv };

GenKind gen_kind_from_string(const std::string& s);
const char* to_string(GenKind k);

/// Wind and PV units are scenario-driven; thermal and hydro are dispatched.
inline bool is_renewable(GenKind k) { return k == GenKind::Wind || k == GenKind::Pv; }

struct Generator {
  std::string name;
  int bus = 0;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double cost_per_mwh = 0.0;
  GenKind kind = GenKind::Thermal;
};

struct Branch {
  std::string name;
  int from = 0;
  int to = 0;
  double reactance_pu = 0.0;
  double rating_mw = 0.0;
  double emergency_rating_mw = 0.0;  // defaults to 1.1 x rating when absent
  bool outage_candidate = true;      // declared eligibility; bridges are screened out later
};

struct GridSpec {
  std::string name;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  int slack_bus_id = 0;

  static GridSpec from_json(const nlohmann::json& j);
  static GridSpec load(const std::string& path);
  nlohmann::json to_json() const;

  /// Checks the structural invariants (ids, reactances, bounds, slack, connectivity).
  void validate() const;

  int bus_index(int bus_id) const;  // -1 if unknown
  std::vector<int> dispatchable_gens() const;
  std::vector<int> renewable_gens() const;
  std::vector<int> load_buses() const;  // buses with nominal load > 0, in bus order

  Eigen::VectorXd nominal_loads() const;       // over load_buses()
  Eigen::VectorXd renewable_capacities() const;  // over renewable_gens()
  Eigen::VectorXd emergency_ratings() const;   // per branch

  /// FNV-1a over the canonical JSON encoding; identifies the grid in sidecars.
  std::uint64_t content_hash() const;
};

struct Violation {
  int outage_branch = -1;
  int overloaded_branch = -1;
  double post_flow_mw = 0.0;
  double loading_pct = 0.0;
};

/// Immutable DC sensitivities for one grid. Safe for concurrent reads.
class DcNetwork {
 public:
  static DcNetwork build(const GridSpec& spec);

  const Eigen::MatrixXd& ptdf() const { return ptdf_; }
  const Eigen::MatrixXd& lodf() const { return lodf_; }
  /// Branches whose outage is screened: declared eligible and not a bridge.
  const std::vector<bool>& outage_eligible() const { return outage_eligible_; }
  int n_buses() const { return static_cast<int>(ptdf_.cols()); }
  int n_branches() const { return static_cast<int>(ptdf_.rows()); }
  int slack_index() const { return slack_index_; }

  /// flows = PTDF * injections (injections indexed like buses; slack absorbs residual).
  Eigen::VectorXd base_flows(const Eigen::VectorXd& injections) const;

  /// N-1 check: every outage-eligible branch out, every survivor within its
  /// emergency rating. Violations appended to `report` when non-null.
  bool n1_secure(const Eigen::VectorXd& flows, const Eigen::VectorXd& emergency_ratings,
                 std::vector<Violation>* report = nullptr) const;

 private:
  Eigen::MatrixXd ptdf_;
  Eigen::MatrixXd lodf_;
  std::vector<bool> outage_eligible_;
  int slack_index_ = 0;
};

/// Economic dispatch LP plus the affine injection map needed to recover flows
/// and features from a solution. Variable order: g over dispatchable
/// generators, then curtailment over renewable generators.
struct EdProblem {
  LinearProgram lp;
  Eigen::MatrixXd injection_map;   // [buses x vars]
  Eigen::VectorXd injection_base;  // [buses]
  int n_dispatchable = 0;
  int n_renewable = 0;
};

/// Base-case ED: min generation cost s.t. balance, unit limits, curtailment
/// limits, and base line ratings. `renewable_mw` is indexed over
/// renewable_gens(), `load_mw` over load_buses().
EdProblem build_ed_lp(const GridSpec& spec, const DcNetwork& net, const Eigen::VectorXd& renewable_mw,
                      const Eigen::VectorXd& load_mw);

}  // namespace gridrules
