#include "gridrules/rules.hpp"

#include <cmath>
#include <fstream>

#include "gridrules/common.hpp"

namespace gridrules {

bool RuleMatrix::satisfied_by(const Eigen::VectorXd& p, double tol) const {
  for (const Eigen::VectorXd& row : rows)
    if (row.dot(p) < -tol) return false;
  return true;
}

namespace {

void walk(const TreeNode& node, std::vector<Eigen::VectorXd>& stack, int& leaf_counter, RuleSet& out) {
  if (node.is_leaf()) {
    if (node.label == 1) {
      RuleMatrix r;
      r.leaf_id = leaf_counter;
      r.rows = stack;
      out.rules.push_back(std::move(r));
    }
    ++leaf_counter;
    return;
  }
  stack.push_back(-node.theta);  // left branch: theta'p < 0  <=>  -theta'p >= 0
  walk(*node.left, stack, leaf_counter, out);
  stack.back() = node.theta;  // right branch: theta'p >= 0
  walk(*node.right, stack, leaf_counter, out);
  stack.pop_back();
}

}  // namespace

RuleSet extract_rules(const TreeModel& model) {
  if (!model.root) fail(ErrorCode::InvalidArgument, "extract_rules: model has no root");
  RuleSet rs;
  rs.feature_names = model.feature_names;
  std::vector<Eigen::VectorXd> stack;
  int leaf_counter = 0;
  walk(*model.root, stack, leaf_counter, rs);
  return rs;
}

double rule_sparsity(const RuleSet& rs) {
  long nnz = 0, total = 0;
  for (const RuleMatrix& r : rs.rules) {
    for (const Eigen::VectorXd& row : r.rows) {
      total += row.size();
      for (int j = 0; j < row.size(); ++j)
        if (row(j) != 0.0) ++nnz;
    }
  }
  return total > 0 ? static_cast<double>(nnz) / static_cast<double>(total) : 0.0;
}

BigMSystem big_m_system(const RuleSet& rs, const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                        double margin) {
  const int dim = rs.dim();
  if (box_lo.size() != dim || box_hi.size() != dim)
    fail(ErrorCode::InvalidArgument, "big_m_system: box dimension mismatch");
  for (int j = 0; j < dim; ++j) {
    if (!std::isfinite(box_lo(j)) || !std::isfinite(box_hi(j)))
      fail(ErrorCode::InvalidArgument, "big_m_system: box must be finite (feature " + std::to_string(j) + ")");
    if (box_lo(j) > box_hi(j)) fail(ErrorCode::InvalidArgument, "big_m_system: empty box");
  }

  BigMSystem sys;
  sys.rules.reserve(rs.rules.size());
  for (const RuleMatrix& r : rs.rules) {
    std::vector<BigMRow> rows;
    rows.reserve(r.rows.size());
    for (const Eigen::VectorXd& row : r.rows) {
      double worst = 0.0;  // min over the box of row' p
      for (int j = 0; j < dim; ++j) worst += row(j) > 0.0 ? row(j) * box_lo(j) : row(j) * box_hi(j);
      rows.push_back(BigMRow{row, std::max(0.0, -worst) + margin});
    }
    sys.rules.push_back(std::move(rows));
  }
  return sys;
}

nlohmann::json RuleSet::to_json() const {
  nlohmann::json jr = nlohmann::json::array();
  for (const RuleMatrix& r : rules) {
    nlohmann::json rows = nlohmann::json::array();
    for (const Eigen::VectorXd& row : r.rows) {
      nlohmann::json sparse = nlohmann::json::array();
      for (int j = 0; j < row.size(); ++j)
        if (row(j) != 0.0) sparse.push_back({j, row(j)});
      rows.push_back(std::move(sparse));
    }
    jr.push_back({{"leaf_id", r.leaf_id}, {"rows", std::move(rows)}});
  }
  return nlohmann::json{{"format", "gridrules-rules-v1"},
                        {"feature_names", feature_names},
                        {"n_features", dim()},
                        {"rules", std::move(jr)}};
}

RuleSet RuleSet::from_json(const nlohmann::json& j) {
  RuleSet rs;
  try {
    if (j.value("format", "") != "gridrules-rules-v1") fail(ErrorCode::Parse, "rules: unknown format tag");
    rs.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    const int dim = j.at("n_features").get<int>();
    if (dim != rs.dim()) fail(ErrorCode::Parse, "rules: n_features does not match feature_names");
    for (const auto& jr : j.at("rules")) {
      RuleMatrix r;
      r.leaf_id = jr.at("leaf_id").get<int>();
      for (const auto& jrow : jr.at("rows")) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
        for (const auto& pair : jrow) {
          int idx = pair.at(0).get<int>();
          if (idx < 0 || idx >= dim) fail(ErrorCode::Parse, "rules: coefficient index out of range");
          row(idx) = pair.at(1).get<double>();
        }
        r.rows.push_back(std::move(row));
      }
      rs.rules.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("rules: ") + e.what());
  }
  return rs;
}

void RuleSet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write rules '" + path + "'");
  out << to_json().dump(2) << "\n";
}

RuleSet RuleSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open rules '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "rules '" + path + "': " + e.what());
  }
  return from_json(j);
}

}  // namespace gridrules
