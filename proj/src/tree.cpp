#include "gridrules/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gridrules/common.hpp"
#include "gridrules/objective.hpp"

namespace gridrules {

TreeVariant tree_variant_from_string(const std::string& s) {
  if (s == "udt") return TreeVariant::Udt;
  if (s == "wodt") return TreeVariant::Wodt;
  if (s == "swodtl") return TreeVariant::Swodtl;
  if (s == "swodt") return TreeVariant::Swodt;
  fail(ErrorCode::Parse, "unknown tree variant '" + s + "'");
}

const char* to_string(TreeVariant v) {
  switch (v) {
    case TreeVariant::Udt: return "udt";
    case TreeVariant::Wodt: return "wodt";
    case TreeVariant::Swodtl: return "swodtl";
    case TreeVariant::Swodt: return "swodt";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (max_depth < 1) fail(ErrorCode::InvalidArgument, "train: max_depth must be >= 1");
  if (min_samples_split < 2) fail(ErrorCode::InvalidArgument, "train: min_samples_split must be >= 2");
  if (lambda1 < 0.0 || lambda2 < 0.0) fail(ErrorCode::InvalidArgument, "train: negative regularization");
  if (variant == TreeVariant::Wodt && (lambda1 != 0.0 || lambda2 != 0.0))
    fail(ErrorCode::InvalidArgument, "train: wodt requires lambda1 = lambda2 = 0");
  if (variant == TreeVariant::Swodtl && lambda2 != 0.0)
    fail(ErrorCode::InvalidArgument, "train: swodtl requires lambda2 = 0");
  owlqn.validate();
}

nlohmann::json TrainConfig::to_json() const {
  return nlohmann::json{{"variant", to_string(variant)},
                        {"max_depth", max_depth},
                        {"min_samples_split", min_samples_split},
                        {"lambda1", lambda1},
                        {"lambda2", lambda2},
                        {"owlqn", owlqn.to_json()},
                        {"seed", seed},
                        {"standardize", standardize}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (j.contains("variant")) c.variant = tree_variant_from_string(j.at("variant").get<std::string>());
  c.max_depth = j.value("max_depth", c.max_depth);
  c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
  c.lambda1 = j.value("lambda1", c.lambda1);
  c.lambda2 = j.value("lambda2", c.lambda2);
  if (j.contains("owlqn")) c.owlqn = OwlqnConfig::from_json(j.at("owlqn"));
  c.seed = j.value("seed", c.seed);
  c.standardize = j.value("standardize", c.standardize);
  c.validate();
  return c;
}

namespace {

double hard_entropy(const long counts[2], long total) {
  if (total <= 0) return 0.0;
  double h = 0.0;
  for (int k = 0; k < 2; ++k) {
    if (counts[k] > 0) {
      double f = static_cast<double>(counts[k]) / static_cast<double>(total);
      h -= f * std::log2(f);
    }
  }
  return h;
}

}  // namespace

std::optional<Eigen::VectorXd> udt_best_split(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, int offset_index) {
  const int n = static_cast<int>(x.rows());
  const int dim = static_cast<int>(x.cols());
  if (n < 2) return std::nullopt;

  long parent[2] = {0, 0};
  for (int i = 0; i < n; ++i) ++parent[y(i)];
  if (parent[0] == 0 || parent[1] == 0) return std::nullopt;
  const double parent_cost = static_cast<double>(n) * hard_entropy(parent, n);

  double best_cost = parent_cost - 1e-12;
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<std::pair<double, int>> col(n);
  for (int j = 0; j < dim; ++j) {
    if (j == offset_index) continue;
    for (int i = 0; i < n; ++i) col[i] = {x(i, j), y(i)};
    std::sort(col.begin(), col.end());
    long left[2] = {0, 0};
    for (int i = 0; i + 1 < n; ++i) {
      ++left[col[i].second];
      if (col[i].first == col[i + 1].first) continue;
      long right[2] = {parent[0] - left[0], parent[1] - left[1]};
      long nl = i + 1, nr = n - nl;
      double cost = static_cast<double>(nl) * hard_entropy(left, nl) +
                    static_cast<double>(nr) * hard_entropy(right, nr);
      if (cost < best_cost) {
        best_cost = cost;
        best_feature = j;
        best_threshold = 0.5 * (col[i].first + col[i + 1].first);
      }
    }
  }
  if (best_feature < 0) return std::nullopt;

  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(dim);
  theta0(best_feature) = 1.0;
  if (offset_index >= 0) theta0(offset_index) = -best_threshold;
  return theta0;
}

namespace {

constexpr double kZeroThetaTol = 1e-8;

struct Builder {
  const TrainConfig& cfg;
  int offset_index;

  std::unique_ptr<TreeNode> make_leaf(const Eigen::VectorXi& y) const {
    auto node = std::make_unique<TreeNode>();
    long counts[2] = {0, 0};
    for (int i = 0; i < y.size(); ++i) ++counts[y(i)];
    node->class_counts = {counts[0], counts[1]};
    // Majority class; ties go to 0 (insecure).
    node->label = counts[1] > counts[0] ? 1 : 0;
    return node;
  }

  std::unique_ptr<TreeNode> build(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, int depth) const {
    const int n = static_cast<int>(x.rows());
    if (n <= cfg.min_samples_split || depth > cfg.max_depth) return make_leaf(y);

    long counts[2] = {0, 0};
    for (int i = 0; i < n; ++i) ++counts[y(i)];
    if (counts[0] == 0 || counts[1] == 0) return make_leaf(y);

    std::optional<Eigen::VectorXd> theta0 = udt_best_split(x, y, offset_index);
    if (!theta0) return make_leaf(y);

    Eigen::VectorXd theta;
    if (cfg.variant == TreeVariant::Udt) {
      theta = *theta0;
    } else {
      NodeObjective obj;
      obj.x = x;
      obj.y = y;
      obj.lambda1 = cfg.variant == TreeVariant::Wodt ? 0.0 : cfg.lambda1;
      obj.lambda2 = cfg.variant == TreeVariant::Swodt ? cfg.lambda2 : 0.0;
      obj.offset_index = offset_index;
      OwlqnResult res = minimize(obj.smooth_fn(), obj.l1_weights(), *theta0, cfg.owlqn);
      theta = res.theta;
      // Degenerate stationary point: fall back to the univariate split. The
      // offset coordinate is ignored here -- an intercept-only split routes
      // every sample the same way, so it carries no information.
      double informative = 0.0;
      for (int j = 0; j < theta.size(); ++j)
        if (j != offset_index) informative = std::max(informative, std::fabs(theta(j)));
      if (informative < kZeroThetaTol) theta = *theta0;
    }

    Eigen::VectorXd z = x * theta;
    int nl = 0;
    for (int i = 0; i < n; ++i)
      if (z(i) < 0.0) ++nl;
    if (nl == 0 || nl == n) return make_leaf(y);

    Eigen::MatrixXd xl(nl, x.cols()), xr(n - nl, x.cols());
    Eigen::VectorXi yl(nl), yr(n - nl);
    int il = 0, ir = 0;
    for (int i = 0; i < n; ++i) {
      if (z(i) < 0.0) {
        xl.row(il) = x.row(i);
        yl(il++) = y(i);
      } else {
        xr.row(ir) = x.row(i);
        yr(ir++) = y(i);
      }
    }

    auto node = std::make_unique<TreeNode>();
    node->theta = theta;
    node->left = build(xl, yl, depth + 1);
    node->right = build(xr, yr, depth + 1);
    return node;
  }
};

void unscale_tree(TreeNode& node, const Scaling& scaling, int offset_index) {
  if (node.is_leaf()) return;
  node.theta = scaling.unscale_theta(node.theta, offset_index);
  unscale_tree(*node.left, scaling, offset_index);
  unscale_tree(*node.right, scaling, offset_index);
}

void collect_stats(const TreeNode& node, int depth, TreeStats& st, long& nnz, long& total, int dim) {
  if (node.is_leaf()) {
    st.depth = std::max(st.depth, depth);
    ++st.n_leaves;
    return;
  }
  ++st.n_internal;
  for (int j = 0; j < node.theta.size(); ++j)
    if (node.theta(j) != 0.0) ++nnz;
  total += dim;
  collect_stats(*node.left, depth + 1, st, nnz, total, dim);
  collect_stats(*node.right, depth + 1, st, nnz, total, dim);
}

}  // namespace

TreeModel train_tree(const LabeledDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  if (ds.size() < 1) fail(ErrorCode::InvalidArgument, "train: empty dataset");
  for (int lab : ds.labels)
    if (lab != 0 && lab != 1) fail(ErrorCode::InvalidArgument, "train: labels must be 0 or 1");

  TreeModel model;
  model.feature_names = ds.feature_names;
  model.config = cfg;
  model.scaling = cfg.standardize ? Scaling::fit(ds.x) : Scaling::identity(ds.dim());

  Eigen::MatrixXd x = cfg.standardize ? model.scaling.apply(ds.x) : ds.x;
  Eigen::VectorXi y(ds.size());
  for (int i = 0; i < ds.size(); ++i) y(i) = ds.labels[i];

  Builder builder{cfg, ds.offset_index()};
  model.root = builder.build(x, y, 1);
  unscale_tree(*model.root, model.scaling, ds.offset_index());

  long nnz = 0, total = 0;
  collect_stats(*model.root, 0, model.stats, nnz, total, ds.dim());
  model.stats.sparsity = total > 0 ? static_cast<double>(nnz) / static_cast<double>(total) : 0.0;
  model.stats.train_error = error_rate(model, ds);
  return model;
}

int predict_node(const TreeNode& node, const Eigen::VectorXd& p) {
  const TreeNode* at = &node;
  while (!at->is_leaf()) at = at->theta.dot(p) < 0.0 ? at->left.get() : at->right.get();
  return at->label;
}

int predict(const TreeModel& model, const Eigen::VectorXd& p) {
  if (p.size() != model.dim()) fail(ErrorCode::InvalidArgument, "predict: feature dimension mismatch");
  return predict_node(*model.root, p);
}

double error_rate(const TreeModel& model, const LabeledDataset& ds) {
  if (ds.size() == 0) return 0.0;
  int wrong = 0;
  for (int i = 0; i < ds.size(); ++i)
    if (predict(model, ds.x.row(i).transpose()) != ds.labels[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

namespace {

nlohmann::json node_to_json(const TreeNode& node) {
  if (node.is_leaf())
    return nlohmann::json{{"class", node.label}, {"counts", node.class_counts}};
  nlohmann::json coeffs = nlohmann::json::array();
  for (int j = 0; j < node.theta.size(); ++j)
    if (node.theta(j) != 0.0) coeffs.push_back({j, node.theta(j)});
  return nlohmann::json{{"theta", coeffs}, {"left", node_to_json(*node.left)}, {"right", node_to_json(*node.right)}};
}

std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j, int dim) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("class")) {
    node->label = j.at("class").get<int>();
    node->class_counts = j.value("counts", std::vector<long>{});
    return node;
  }
  node->theta = Eigen::VectorXd::Zero(dim);
  for (const auto& pair : j.at("theta")) {
    int idx = pair.at(0).get<int>();
    if (idx < 0 || idx >= dim) fail(ErrorCode::Parse, "model: split index out of range");
    node->theta(idx) = pair.at(1).get<double>();
  }
  if (node->theta.isZero(0.0)) fail(ErrorCode::Parse, "model: internal node with all-zero split");
  node->left = node_from_json(j.at("left"), dim);
  node->right = node_from_json(j.at("right"), dim);
  return node;
}

}  // namespace

nlohmann::json TreeModel::to_json() const {
  return nlohmann::json{{"format", "gridrules-model-v1"},
                        {"config", config.to_json()},
                        {"feature_names", feature_names},
                        {"scaling", scaling.to_json()},
                        {"stats",
                         {{"depth", stats.depth},
                          {"n_leaves", stats.n_leaves},
                          {"n_internal", stats.n_internal},
                          {"sparsity", stats.sparsity},
                          {"train_error", stats.train_error}}},
                        {"root", node_to_json(*root)}};
}

TreeModel TreeModel::from_json(const nlohmann::json& j) {
  TreeModel m;
  try {
    if (j.value("format", "") != "gridrules-model-v1") fail(ErrorCode::Parse, "model: unknown format tag");
    m.config = TrainConfig::from_json(j.at("config"));
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.scaling = Scaling::from_json(j.at("scaling"));
    const auto& st = j.at("stats");
    m.stats.depth = st.at("depth").get<int>();
    m.stats.n_leaves = st.at("n_leaves").get<int>();
    m.stats.n_internal = st.at("n_internal").get<int>();
    m.stats.sparsity = st.at("sparsity").get<double>();
    m.stats.train_error = st.at("train_error").get<double>();
    m.root = node_from_json(j.at("root"), m.dim());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("model: ") + e.what());
  }
  return m;
}

void TreeModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write model '" + path + "'");
  out << to_json().dump(2) << "\n";
}

TreeModel TreeModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, "model '" + path + "': " + e.what());
  }
  return from_json(j);
}

}  // namespace gridrules
