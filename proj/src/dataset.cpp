#include "gridrules/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gridrules/common.hpp"
#include "gridrules/features.hpp"

namespace gridrules {

LabeledDataset LabeledDataset::subset(const std::vector<int>& rows) const {
  LabeledDataset out;
  out.feature_names = feature_names;
  out.x.resize(rows.size(), x.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(i) = x.row(rows[i]);
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

Scaling Scaling::identity(int dim) {
  Scaling s;
  s.mean = Eigen::VectorXd::Zero(dim);
  s.scale = Eigen::VectorXd::Ones(dim);
  return s;
}

Scaling Scaling::fit(const Eigen::MatrixXd& x) {
  const int dim = static_cast<int>(x.cols());
  Scaling s = identity(dim);
  if (x.rows() < 2) return s;
  for (int j = 0; j < dim; ++j) {
    double mu = x.col(j).mean();
    double var = (x.col(j).array() - mu).square().sum() / static_cast<double>(x.rows());
    double sd = std::sqrt(var);
    if (sd > 1e-12) {
      s.mean(j) = mu;
      s.scale(j) = sd;
    }
  }
  return s;
}

bool Scaling::is_identity() const {
  return mean.isZero(0.0) && (scale.array() == 1.0).all();
}

Eigen::MatrixXd Scaling::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) fail(ErrorCode::InvalidArgument, "scaling dimension mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd Scaling::unscale_theta(const Eigen::VectorXd& theta, int offset_index) const {
  if (theta.size() != mean.size()) fail(ErrorCode::InvalidArgument, "scaling dimension mismatch");
  Eigen::VectorXd raw = theta.array() / scale.array();
  double shift = 0.0;
  for (int j = 0; j < theta.size(); ++j)
    if (j != offset_index) shift += theta(j) * mean(j) / scale(j);
  raw(offset_index) = theta(offset_index) - shift;
  return raw;
}

nlohmann::json Scaling::to_json() const {
  return nlohmann::json{{"mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
                        {"scale", std::vector<double>(scale.data(), scale.data() + scale.size())}};
}

Scaling Scaling::from_json(const nlohmann::json& j) {
  Scaling s;
  auto m = j.at("mean").get<std::vector<double>>();
  auto sc = j.at("scale").get<std::vector<double>>();
  if (m.size() != sc.size()) fail(ErrorCode::Parse, "scaling: mean/scale length mismatch");
  s.mean = Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
  s.scale = Eigen::Map<Eigen::VectorXd>(sc.data(), sc.size());
  return s;
}

LabeledDataset generate_dataset(const GridSpec& spec, const DcNetwork& net, const std::vector<Scenario>& scenarios,
                                int workers, DatasetMeta* meta) {
  const FeatureSchema schema = FeatureSchema::from_grid(spec);
  const Eigen::VectorXd emergency = spec.emergency_ratings();
  const int n = static_cast<int>(scenarios.size());

  struct Slot {
    bool feasible = false;
    Eigen::VectorXd p;
    int label = 0;
  };
  std::vector<Slot> slots(n);

  parallel_for(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Scenario& sc = scenarios[s];
      EdProblem ed = build_ed_lp(spec, net, sc.renewable_mw, sc.load_mw);
      LpSolution sol = solve_lp(ed.lp);
      if (sol.status != LpStatus::Optimal) continue;
      Eigen::VectorXd g = sol.x.head(ed.n_dispatchable);
      Eigen::VectorXd r = sc.renewable_mw - sol.x.tail(ed.n_renewable);
      Eigen::VectorXd flows = net.ptdf() * (ed.injection_map * sol.x + ed.injection_base);
      slots[s].p = schema.assemble(g, r, flows, sc.load_mw);
      slots[s].label = net.n1_secure(flows, emergency) ? 1 : 0;
      slots[s].feasible = true;
    }
  });

  int kept = 0;
  for (const Slot& s : slots) kept += s.feasible ? 1 : 0;
  if (kept == 0) fail(ErrorCode::Infeasible, "economic dispatch infeasible for every scenario");

  LabeledDataset ds;
  ds.feature_names = schema.names;
  ds.x.resize(kept, schema.dim());
  ds.labels.reserve(kept);
  int row = 0;
  for (const Slot& s : slots) {
    if (!s.feasible) continue;
    ds.x.row(row++) = s.p;
    ds.labels.push_back(s.label);
  }
  if (meta) {
    meta->n_requested = n;
    meta->n_generated = kept;
    meta->skipped_infeasible = n - kept;
  }
  return ds;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
  if (static_cast<int>(ds.feature_names.size()) != ds.dim())
    fail(ErrorCode::InvalidArgument, "dataset: feature name count mismatch");
  for (const std::string& n : ds.feature_names)
    if (n.find(',') != std::string::npos) fail(ErrorCode::InvalidArgument, "feature name contains a comma: " + n);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write dataset '" + path + "'");
  for (const std::string& n : ds.feature_names) out << n << ",";
  out << "label\n";
  for (int i = 0; i < ds.size(); ++i) {
    for (int j = 0; j < ds.dim(); ++j) out << fmt17(ds.x(i, j)) << ",";
    out << ds.labels[i] << "\n";
  }
  if (!out) fail(ErrorCode::Io, "short write to '" + path + "'");
}

void save_dataset_meta(const DatasetMeta& meta, const std::vector<std::string>& feature_names,
                       const std::string& csv_path) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(meta.grid_hash));
  nlohmann::json j{{"grid_hash", hash},
                   {"sampler", meta.sampler},
                   {"seed", meta.seed},
                   {"n_requested", meta.n_requested},
                   {"n_generated", meta.n_generated},
                   {"skipped_infeasible", meta.skipped_infeasible},
                   {"scaling", nullptr},
                   {"feature_names", feature_names}};
  std::string path = csv_path + ".meta.json";
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write dataset sidecar '" + path + "'");
  out << j.dump(2) << "\n";
}

LabeledDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Parse, path + ":1: empty dataset file");

  LabeledDataset ds;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) ds.feature_names.push_back(col);
    if (ds.feature_names.empty() || ds.feature_names.back() != "label")
      fail(ErrorCode::Parse, path + ":1: header must end with 'label'");
    ds.feature_names.pop_back();
  }
  const int dim = static_cast<int>(ds.feature_names.size());
  if (dim < 1) fail(ErrorCode::Parse, path + ":1: no feature columns");

  std::vector<double> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (int j = 0; j <= dim; ++j) {
      char* endp = nullptr;
      double v = std::strtod(p, &endp);
      if (endp == p)
        fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected number in column " +
                                   std::to_string(j + 1));
      values.push_back(v);
      p = endp;
      if (j < dim) {
        if (*p != ',')
          fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": expected ',' after column " +
                                     std::to_string(j + 1));
        ++p;
      }
    }
    while (*p == ' ' || *p == '\r') ++p;
    if (*p != '\0')
      fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": trailing characters");
    double lab = values.back();
    values.pop_back();
    if (lab != 0.0 && lab != 1.0)
      fail(ErrorCode::Parse, path + ":" + std::to_string(lineno) + ": label must be 0 or 1");
    ds.labels.push_back(static_cast<int>(lab));
  }
  const int n = static_cast<int>(ds.labels.size());
  if (n == 0) fail(ErrorCode::Parse, path + ": dataset has no rows");
  ds.x.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) ds.x(i, j) = values[static_cast<std::size_t>(i) * dim + j];
  return ds;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> kfold_split(int n, int k, std::uint64_t seed) {
  if (k < 2) fail(ErrorCode::InvalidArgument, "kfold: k must be >= 2");
  if (k > n) fail(ErrorCode::InvalidArgument, "kfold: k exceeds dataset size");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  deterministic_shuffle(order, rng);

  std::vector<std::pair<std::vector<int>, std::vector<int>>> folds;
  int base = n / k, extra = n % k;
  int at = 0;
  for (int f = 0; f < k; ++f) {
    int sz = base + (f < extra ? 1 : 0);
    std::vector<int> val(order.begin() + at, order.begin() + at + sz);
    std::vector<int> train;
    train.reserve(n - sz);
    train.insert(train.end(), order.begin(), order.begin() + at);
    train.insert(train.end(), order.begin() + at + sz, order.end());
    folds.emplace_back(std::move(train), std::move(val));
    at += sz;
  }
  return folds;
}

}  // namespace gridrules
