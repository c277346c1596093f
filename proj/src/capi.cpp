#include "gridrules.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "gridrules/common.hpp"
#include "gridrules/dataset.hpp"
#include "gridrules/dispatch.hpp"
#include "gridrules/evaluate.hpp"
#include "gridrules/features.hpp"
#include "gridrules/grid.hpp"
#include "gridrules/rules.hpp"
#include "gridrules/sampling.hpp"
#include "gridrules/tree.hpp"

using namespace gridrules;

struct grs_grid {
  GridSpec spec;
};
struct grs_network {
  DcNetwork net;
};
struct grs_dataset {
  LabeledDataset ds;
  DatasetMeta meta;
  bool has_meta = false;
};
struct grs_model {
  TreeModel model;
};
struct grs_ruleset {
  RuleSet rules;
};

namespace {

thread_local std::string g_last_error;

grs_status code_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Io: return GRS_ERR_IO;
    case ErrorCode::Parse: return GRS_ERR_PARSE;
    case ErrorCode::InvalidArgument: return GRS_ERR_INVALID;
    case ErrorCode::Numeric: return GRS_ERR_NUMERIC;
    case ErrorCode::Infeasible: return GRS_ERR_INFEASIBLE;
    case ErrorCode::Internal: return GRS_ERR_INTERNAL;
  }
  return GRS_ERR_INTERNAL;
}

template <typename Fn>
grs_status guarded(Fn&& fn) {
  try {
    fn();
    return GRS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return GRS_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GRS_ERR_INTERNAL;
  }
}

grs_status invalid(const char* msg) {
  g_last_error = msg;
  return GRS_ERR_INVALID;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_json_opt(const char* text) {
  if (!text || !*text) return nlohmann::json::object();
  return nlohmann::json::parse(text);
}

// Write-then-rename so a crash never leaves a half-written artifact.
template <typename WriteFn>
void atomic_write(const std::string& path, WriteFn&& write) {
  std::string tmp = path + ".tmp";
  write(tmp);
  std::filesystem::rename(tmp, path);
}

Scenario scenario_from_json(const GridSpec& spec, const nlohmann::json& j) {
  Scenario sc;
  auto ren = j.at("renewable_MW").get<std::vector<double>>();
  auto load = j.at("load_MW").get<std::vector<double>>();
  if (ren.size() != spec.renewable_gens().size())
    fail(ErrorCode::InvalidArgument, "scenario: renewable_MW length must match renewable generators");
  if (load.size() != spec.load_buses().size())
    fail(ErrorCode::InvalidArgument, "scenario: load_MW length must match load buses");
  sc.renewable_mw = Eigen::Map<Eigen::VectorXd>(ren.data(), ren.size());
  sc.load_mw = Eigen::Map<Eigen::VectorXd>(load.data(), load.size());
  return sc;
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  return nlohmann::json{
      {"renewable_MW", std::vector<double>(sc.renewable_mw.data(), sc.renewable_mw.data() + sc.renewable_mw.size())},
      {"load_MW", std::vector<double>(sc.load_mw.data(), sc.load_mw.data() + sc.load_mw.size())}};
}

}  // namespace

extern "C" {

const char* grs_version(void) { return "gridrules 0.1.0"; }

const char* grs_last_error(void) { return g_last_error.c_str(); }

void grs_string_free(char* s) { std::free(s); }

grs_status grs_grid_load(const char* path, grs_grid** out) {
  if (!path || !out) return invalid("grs_grid_load: null argument");
  return guarded([&] { *out = new grs_grid{GridSpec::load(path)}; });
}

grs_status grs_grid_parse(const char* json_text, grs_grid** out) {
  if (!json_text || !out) return invalid("grs_grid_parse: null argument");
  return guarded([&] { *out = new grs_grid{GridSpec::from_json(nlohmann::json::parse(json_text))}; });
}

void grs_grid_free(grs_grid* grid) { delete grid; }

grs_status grs_network_build(const grs_grid* grid, grs_network** out) {
  if (!grid || !out) return invalid("grs_network_build: null argument");
  return guarded([&] { *out = new grs_network{DcNetwork::build(grid->spec)}; });
}

void grs_network_free(grs_network* net) { delete net; }

grs_status grs_scenario_sample(const grs_grid* grid, const char* sampler_json, unsigned long long seed,
                               char** scenario_json_out) {
  if (!grid || !scenario_json_out) return invalid("grs_scenario_sample: null argument");
  return guarded([&] {
    SamplerConfig cfg = SamplerConfig::from_json(parse_json_opt(sampler_json));
    ScenarioSampler sampler(grid->spec, cfg);
    Scenario sc = sampler.sample(1, seed).front();
    *scenario_json_out = dup_string(scenario_to_json(sc).dump(2));
  });
}

grs_status grs_dataset_generate(const grs_grid* grid, const grs_network* net, const char* sampler_json, long n,
                                unsigned long long seed, int workers, grs_dataset** out) {
  if (!grid || !net || !out) return invalid("grs_dataset_generate: null argument");
  if (n < 1) return invalid("grs_dataset_generate: n must be >= 1");
  return guarded([&] {
    SamplerConfig cfg = SamplerConfig::from_json(parse_json_opt(sampler_json));
    ScenarioSampler sampler(grid->spec, cfg);
    std::vector<Scenario> scenarios = sampler.sample(static_cast<int>(n), seed);
    auto* h = new grs_dataset;
    h->ds = generate_dataset(grid->spec, net->net, scenarios, workers, &h->meta);
    h->meta.grid_hash = grid->spec.content_hash();
    h->meta.sampler = cfg.to_json();
    h->meta.seed = seed;
    h->has_meta = true;
    *out = h;
  });
}

grs_status grs_dataset_load(const char* csv_path, grs_dataset** out) {
  if (!csv_path || !out) return invalid("grs_dataset_load: null argument");
  return guarded([&] { *out = new grs_dataset{load_dataset_csv(csv_path), DatasetMeta{}, false}; });
}

grs_status grs_dataset_save(const grs_dataset* ds, const char* csv_path) {
  if (!ds || !csv_path) return invalid("grs_dataset_save: null argument");
  return guarded([&] {
    atomic_write(csv_path, [&](const std::string& tmp) { save_dataset_csv(ds->ds, tmp); });
    if (ds->has_meta) save_dataset_meta(ds->meta, ds->ds.feature_names, csv_path);
  });
}

long grs_dataset_size(const grs_dataset* ds) { return ds ? ds->ds.size() : 0; }

long grs_dataset_skipped(const grs_dataset* ds) { return ds && ds->has_meta ? ds->meta.skipped_infeasible : 0; }

long grs_dataset_secure_count(const grs_dataset* ds) {
  if (!ds) return 0;
  long n = 0;
  for (int lab : ds->ds.labels) n += lab == 1 ? 1 : 0;
  return n;
}

void grs_dataset_free(grs_dataset* ds) { delete ds; }

grs_status grs_model_train(const grs_dataset* ds, const char* train_json, grs_model** out) {
  if (!ds || !out) return invalid("grs_model_train: null argument");
  return guarded([&] {
    TrainConfig cfg = TrainConfig::from_json(parse_json_opt(train_json));
    *out = new grs_model{train_tree(ds->ds, cfg)};
  });
}

grs_status grs_model_load(const char* path, grs_model** out) {
  if (!path || !out) return invalid("grs_model_load: null argument");
  return guarded([&] { *out = new grs_model{TreeModel::load(path)}; });
}

grs_status grs_model_save(const grs_model* model, const char* path) {
  if (!model || !path) return invalid("grs_model_save: null argument");
  return guarded([&] { atomic_write(path, [&](const std::string& tmp) { model->model.save(tmp); }); });
}

grs_status grs_model_predict(const grs_model* model, const double* features, long dim, int* label_out) {
  if (!model || !features || !label_out) return invalid("grs_model_predict: null argument");
  return guarded([&] {
    Eigen::Map<const Eigen::VectorXd> p(features, dim);
    *label_out = predict(model->model, p);
  });
}

grs_status grs_model_stats(const grs_model* model, char** stats_json_out) {
  if (!model || !stats_json_out) return invalid("grs_model_stats: null argument");
  return guarded([&] {
    const TreeStats& st = model->model.stats;
    nlohmann::json j{{"depth", st.depth},
                     {"n_leaves", st.n_leaves},
                     {"n_internal", st.n_internal},
                     {"sparsity", st.sparsity},
                     {"train_error", st.train_error},
                     {"n_features", model->model.dim()}};
    *stats_json_out = dup_string(j.dump(2));
  });
}

void grs_model_free(grs_model* model) { delete model; }

grs_status grs_rules_extract(const grs_model* model, grs_ruleset** out) {
  if (!model || !out) return invalid("grs_rules_extract: null argument");
  return guarded([&] { *out = new grs_ruleset{extract_rules(model->model)}; });
}

grs_status grs_rules_load(const char* path, grs_ruleset** out) {
  if (!path || !out) return invalid("grs_rules_load: null argument");
  return guarded([&] { *out = new grs_ruleset{RuleSet::load(path)}; });
}

grs_status grs_rules_save(const grs_ruleset* rules, const char* path) {
  if (!rules || !path) return invalid("grs_rules_save: null argument");
  return guarded([&] { atomic_write(path, [&](const std::string& tmp) { rules->rules.save(tmp); }); });
}

long grs_rules_count(const grs_ruleset* rules) { return rules ? rules->rules.size() : 0; }

void grs_ruleset_free(grs_ruleset* rules) { delete rules; }

grs_status grs_export_lp(const grs_grid* grid, const grs_network* net, const grs_ruleset* rules,
                         const char* scenario_json, const char* out_path) {
  if (!grid || !net || !rules || !scenario_json || !out_path) return invalid("grs_export_lp: null argument");
  return guarded([&] {
    Scenario sc = scenario_from_json(grid->spec, nlohmann::json::parse(scenario_json));
    BigMMilp milp = build_big_m_milp(grid->spec, net->net, rules->rules, sc);
    atomic_write(out_path, [&](const std::string& tmp) {
      std::ofstream os(tmp);
      if (!os) fail(ErrorCode::Io, "cannot write LP file '" + tmp + "'");
      write_lp_file(milp.lp, milp.indicator_vars, os);
      if (!os) fail(ErrorCode::Io, "short write to '" + tmp + "'");
    });
  });
}

grs_status grs_dispatch(const grs_grid* grid, const grs_network* net, const grs_ruleset* rules,
                        const char* scenario_json, char** report_json_out) {
  if (!grid || !net || !rules || !scenario_json || !report_json_out) return invalid("grs_dispatch: null argument");
  return guarded([&] {
    Scenario sc = scenario_from_json(grid->spec, nlohmann::json::parse(scenario_json));
    DispatchResult res = secure_dispatch(grid->spec, net->net, rules->rules, sc);

    nlohmann::json j{{"status", to_string(res.status)}, {"solve_seconds", res.solve_seconds}};
    if (res.status == DispatchStatus::Optimal) {
      j["cost"] = res.cost;
      j["active_leaf"] = res.active_leaf;
      nlohmann::json dispatch = nlohmann::json::object();
      auto disp = grid->spec.dispatchable_gens();
      for (std::size_t i = 0; i < disp.size(); ++i)
        dispatch[grid->spec.generators[disp[i]].name] = res.x(static_cast<Eigen::Index>(i));
      nlohmann::json curtail = nlohmann::json::object();
      auto ren = grid->spec.renewable_gens();
      for (std::size_t i = 0; i < ren.size(); ++i)
        curtail[grid->spec.generators[ren[i]].name] = res.x(static_cast<Eigen::Index>(disp.size() + i));
      j["dispatch_MW"] = dispatch;
      j["curtailment_MW"] = curtail;

      const FeatureSchema schema = FeatureSchema::from_grid(grid->spec);
      Eigen::VectorXd flows = res.features.segment(schema.l_begin(), schema.n_branches);
      std::vector<Violation> viol;
      bool secure = net->net.n1_secure(flows, grid->spec.emergency_ratings(), &viol);
      j["n1_secure"] = secure;
      nlohmann::json jv = nlohmann::json::array();
      for (const Violation& v : viol)
        jv.push_back({{"outage", grid->spec.branches[v.outage_branch].name},
                      {"overloaded", grid->spec.branches[v.overloaded_branch].name},
                      {"post_flow_MW", v.post_flow_mw},
                      {"loading_pct", v.loading_pct}});
      j["violations"] = jv;
    }
    *report_json_out = dup_string(j.dump(2));
  });
}

grs_status grs_evaluate_security(const grs_grid* grid, const grs_network* net, const grs_ruleset* rules,
                                 const char* sampler_json, long n_scenarios, unsigned long long seed, int workers,
                                 char** report_json_out) {
  if (!grid || !net || !rules || !report_json_out) return invalid("grs_evaluate_security: null argument");
  if (n_scenarios < 1) return invalid("grs_evaluate_security: n_scenarios must be >= 1");
  return guarded([&] {
    SamplerConfig cfg = SamplerConfig::from_json(parse_json_opt(sampler_json));
    SecurityReport rep = evaluate_security_rate(grid->spec, net->net, rules->rules, cfg,
                                                static_cast<int>(n_scenarios), seed, workers);
    *report_json_out = dup_string(rep.to_json().dump(2));
  });
}

grs_status grs_cross_validate(const grs_dataset* ds, const char* train_json, int k, unsigned long long seed,
                              int workers, char** report_json_out) {
  if (!ds || !report_json_out) return invalid("grs_cross_validate: null argument");
  return guarded([&] {
    TrainConfig cfg = TrainConfig::from_json(parse_json_opt(train_json));
    CrossValRow row = cross_validate(ds->ds, cfg, k, seed, workers);
    *report_json_out = dup_string(row.to_json().dump(2));
  });
}

grs_status grs_sweep(const grs_dataset* ds, const char* sweep_json, unsigned long long seed, int workers, int as_csv,
                     char** report_out) {
  if (!ds || !sweep_json || !report_out) return invalid("grs_sweep: null argument");
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(sweep_json);
    std::vector<TreeVariant> variants;
    for (const auto& v : j.value("variants", std::vector<std::string>{"udt", "wodt", "swodt"}))
      variants.push_back(tree_variant_from_string(v));
    std::vector<int> depths = j.value("depths", std::vector<int>{6});
    std::vector<double> lambdas = j.value("lambdas", std::vector<double>{0.05});
    int k = j.value("k", 5);
    TrainConfig base;
    if (j.contains("base")) base = TrainConfig::from_json(j.at("base"));
    ExperimentReport rep = sweep(ds->ds, variants, depths, lambdas, base, k, seed, workers);
    *report_out = dup_string(as_csv ? rep.to_csv() : rep.to_json().dump(2));
  });
}

}  // extern "C"
