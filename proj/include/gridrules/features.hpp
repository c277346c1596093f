#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridrules/common.hpp"
#include "gridrules/grid.hpp"

namespace gridrules {

/// Fixed layout of the operating-state feature vector:
/// (thermal generation, renewable generation, line flows, loads, constant 1).
/// Training and dispatch embedding must share this order exactly.
struct FeatureSchema {
  std::vector<std::string> names;
  int n_dispatchable = 0;
  int n_renewable = 0;
  int n_branches = 0;
  int n_loads = 0;

  static FeatureSchema from_grid(const GridSpec& spec) {
    FeatureSchema s;
    auto disp = spec.dispatchable_gens();
    auto ren = spec.renewable_gens();
    auto lbus = spec.load_buses();
    s.n_dispatchable = static_cast<int>(disp.size());
    s.n_renewable = static_cast<int>(ren.size());
    s.n_branches = static_cast<int>(spec.branches.size());
    s.n_loads = static_cast<int>(lbus.size());
    for (int gi : disp) s.names.push_back("g:" + spec.generators[gi].name);
    for (int gi : ren) s.names.push_back("r:" + spec.generators[gi].name);
    for (const Branch& b : spec.branches) s.names.push_back("l:" + b.name);
    for (int bi : lbus) s.names.push_back("d:" + std::to_string(spec.buses[bi].id));
    s.names.push_back("offset");
    return s;
  }

  int dim() const { return n_dispatchable + n_renewable + n_branches + n_loads + 1; }
  int g_begin() const { return 0; }
  int r_begin() const { return n_dispatchable; }
  int l_begin() const { return n_dispatchable + n_renewable; }
  int d_begin() const { return n_dispatchable + n_renewable + n_branches; }
  int offset_index() const { return dim() - 1; }

  Eigen::VectorXd assemble(const Eigen::VectorXd& g, const Eigen::VectorXd& r, const Eigen::VectorXd& flows,
                           const Eigen::VectorXd& loads) const {
    if (g.size() != n_dispatchable || r.size() != n_renewable || flows.size() != n_branches || loads.size() != n_loads)
      fail(ErrorCode::InvalidArgument, "feature block dimension mismatch");
    Eigen::VectorXd p(dim());
    p.segment(g_begin(), n_dispatchable) = g;
    p.segment(r_begin(), n_renewable) = r;
    p.segment(l_begin(), n_branches) = flows;
    p.segment(d_begin(), n_loads) = loads;
    p(offset_index()) = 1.0;
    return p;
  }
};

}  // namespace gridrules
