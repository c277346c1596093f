// Command-line front end. Links only the C API in gridrules.h.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridrules.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainError = 1;
constexpr int kExitUsageError = 2;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void die(const std::string& msg, int code = kExitDomainError) { throw CliError{code, msg}; }

void check(grs_status st, const std::string& what) {
  if (st != GRS_OK) die(what + ": " + grs_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) die("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) die("cannot write '" + tmp + "'");
    out << content;
    if (!out) die("short write to '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

// RAII wrappers over the C handles.
template <typename T, void (*Free)(T*)>
using handle = std::unique_ptr<T, std::integral_constant<decltype(Free), Free>>;
using GridHandle = handle<grs_grid, grs_grid_free>;
using NetHandle = handle<grs_network, grs_network_free>;
using DatasetHandle = handle<grs_dataset, grs_dataset_free>;
using ModelHandle = handle<grs_model, grs_model_free>;
using RulesHandle = handle<grs_ruleset, grs_ruleset_free>;

struct CString {
  char* s = nullptr;
  ~CString() { grs_string_free(s); }
};

GridHandle load_grid(const std::string& path) {
  grs_grid* g = nullptr;
  check(grs_grid_load(path.c_str(), &g), "grid");
  return GridHandle(g);
}

NetHandle build_net(const grs_grid* g) {
  grs_network* n = nullptr;
  check(grs_network_build(g, &n), "network");
  return NetHandle(n);
}

std::string sampler_json_from(const std::string& path) { return path.empty() ? std::string() : read_file(path); }

// "1..6" or "1,3,5"
std::vector<int> parse_depths(const std::string& s) {
  std::vector<int> out;
  auto dots = s.find("..");
  if (dots != std::string::npos) {
    int lo = std::stoi(s.substr(0, dots));
    int hi = std::stoi(s.substr(dots + 2));
    for (int d = lo; d <= hi; ++d) out.push_back(d);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  if (out.empty()) die("--depths: empty list", kExitUsageError);
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) die("--lambdas: empty list", kExitUsageError);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Sparse oblique security rules for DC economic dispatch"};
  app.set_version_flag("--version", std::string(grs_version()));
  app.require_subcommand(1);

  // gen-data ---------------------------------------------------------------
  std::string gd_grid, gd_out, gd_sampler;
  long gd_n = 8000;
  unsigned long long gd_seed = 7;
  int gd_workers = 0;
  auto* gen = app.add_subcommand("gen-data", "Sample scenarios, run ED, label by N-1 security");
  gen->add_option("--grid", gd_grid, "grid spec JSON")->required();
  gen->add_option("--n", gd_n, "number of scenarios");
  gen->add_option("--seed", gd_seed, "sampler seed")->required();
  gen->add_option("--out", gd_out, "output dataset CSV")->required();
  gen->add_option("--sampler", gd_sampler, "sampler config JSON file");
  gen->add_option("--workers", gd_workers, "worker threads (0 = all cores)");
  gen->callback([&] {
    GridHandle grid = load_grid(gd_grid);
    NetHandle net = build_net(grid.get());
    std::string sampler = sampler_json_from(gd_sampler);
    grs_dataset* ds = nullptr;
    check(grs_dataset_generate(grid.get(), net.get(), sampler.empty() ? nullptr : sampler.c_str(), gd_n, gd_seed,
                               gd_workers, &ds),
          "gen-data");
    DatasetHandle dsh(ds);
    check(grs_dataset_save(ds, gd_out.c_str()), "gen-data");
    long n = grs_dataset_size(ds), secure = grs_dataset_secure_count(ds), skipped = grs_dataset_skipped(ds);
    std::printf("wrote %s: %ld states (%.1f%% secure), %ld infeasible scenarios skipped\n", gd_out.c_str(), n,
                n ? 100.0 * secure / n : 0.0, skipped);
  });

  // train --------------------------------------------------------------------
  std::string tr_data, tr_out, tr_variant = "swodt";
  double tr_l1 = -1.0, tr_l2 = -1.0;
  int tr_depth = 6, tr_minsplit = 10, tr_maxiters = 200;
  unsigned long long tr_seed = 0;
  bool tr_no_std = false;
  auto* train = app.add_subcommand("train", "Train a decision tree on a labeled dataset");
  train->add_option("--data", tr_data, "dataset CSV")->required();
  train->add_option("--variant", tr_variant, "udt | wodt | swodtl | swodt");
  train->add_option("--depth", tr_depth, "maximum depth D");
  train->add_option("--min-split", tr_minsplit, "minimum samples to split J");
  train->add_option("--lambda1", tr_l1, "Lasso weight (default per variant)");
  train->add_option("--lambda2", tr_l2, "Ridge weight (default per variant)");
  train->add_option("--max-iters", tr_maxiters, "optimizer iteration cap");
  train->add_option("--seed", tr_seed, "seed recorded in the model");
  train->add_flag("--no-standardize", tr_no_std, "train on raw feature units");
  train->add_option("--out", tr_out, "output model JSON")->required();
  train->callback([&] {
    grs_dataset* ds = nullptr;
    check(grs_dataset_load(tr_data.c_str(), &ds), "train");
    DatasetHandle dsh(ds);
    double l1 = tr_l1, l2 = tr_l2;
    if (l1 < 0.0) l1 = (tr_variant == "swodt" || tr_variant == "swodtl") ? 0.05 : 0.0;
    if (l2 < 0.0) l2 = tr_variant == "swodt" ? 0.05 : 0.0;
    nlohmann::json cfg{{"variant", tr_variant}, {"max_depth", tr_depth},   {"min_samples_split", tr_minsplit},
                       {"lambda1", l1},         {"lambda2", l2},           {"seed", tr_seed},
                       {"standardize", !tr_no_std}, {"owlqn", {{"max_iters", tr_maxiters}}}};
    grs_model* model = nullptr;
    check(grs_model_train(ds, cfg.dump().c_str(), &model), "train");
    ModelHandle mh(model);
    check(grs_model_save(model, tr_out.c_str()), "train");
    CString stats;
    check(grs_model_stats(model, &stats.s), "train");
    std::printf("wrote %s\n%s\n", tr_out.c_str(), stats.s);
  });

  // extract --------------------------------------------------------------------
  std::string ex_model, ex_out;
  auto* extract = app.add_subcommand("extract", "Extract secure-leaf rule matrices from a model");
  extract->add_option("--model", ex_model, "model JSON")->required();
  extract->add_option("--out", ex_out, "output rules JSON")->required();
  extract->callback([&] {
    grs_model* model = nullptr;
    check(grs_model_load(ex_model.c_str(), &model), "extract");
    ModelHandle mh(model);
    grs_ruleset* rules = nullptr;
    check(grs_rules_extract(model, &rules), "extract");
    RulesHandle rh(rules);
    check(grs_rules_save(rules, ex_out.c_str()), "extract");
    long g = grs_rules_count(rules);
    if (g == 0) std::fprintf(stderr, "warning: model has no secure leaves; rule set is empty\n");
    std::printf("wrote %s: %ld rule matrices\n", ex_out.c_str(), g);
  });

  // export-lp --------------------------------------------------------------------
  std::string el_grid, el_rules, el_scenario, el_out;
  auto* exportlp = app.add_subcommand("export-lp", "Write the big-M MILP for one scenario in LP format");
  exportlp->add_option("--grid", el_grid, "grid spec JSON")->required();
  exportlp->add_option("--rules", el_rules, "rules JSON")->required();
  exportlp->add_option("--scenario", el_scenario, "scenario JSON")->required();
  exportlp->add_option("--out", el_out, "output .lp path")->required();
  exportlp->callback([&] {
    GridHandle grid = load_grid(el_grid);
    NetHandle net = build_net(grid.get());
    grs_ruleset* rules = nullptr;
    check(grs_rules_load(el_rules.c_str(), &rules), "export-lp");
    RulesHandle rh(rules);
    std::string scenario = read_file(el_scenario);
    check(grs_export_lp(grid.get(), net.get(), rules, scenario.c_str(), el_out.c_str()), "export-lp");
    std::printf("wrote %s\n", el_out.c_str());
  });

  // dispatch --------------------------------------------------------------------
  std::string dp_grid, dp_rules, dp_scenario, dp_out, dp_sampler;
  unsigned long long dp_sample_seed = 0;
  bool dp_has_sample_seed = false;
  auto* dispatch = app.add_subcommand("dispatch", "Rule-constrained economic dispatch for one scenario");
  dispatch->add_option("--grid", dp_grid, "grid spec JSON")->required();
  dispatch->add_option("--rules", dp_rules, "rules JSON")->required();
  dispatch->add_option("--scenario", dp_scenario, "scenario JSON");
  dispatch->add_option("--sample-seed", dp_sample_seed, "sample the scenario instead of reading a file")
      ->each([&](const std::string&) { dp_has_sample_seed = true; });
  dispatch->add_option("--sampler", dp_sampler, "sampler config JSON (with --sample-seed)");
  dispatch->add_option("--out", dp_out, "write the JSON report here");
  dispatch->callback([&] {
    if (dp_scenario.empty() == !dp_has_sample_seed)
      die("dispatch: give exactly one of --scenario or --sample-seed", kExitUsageError);
    GridHandle grid = load_grid(dp_grid);
    NetHandle net = build_net(grid.get());
    grs_ruleset* rules = nullptr;
    check(grs_rules_load(dp_rules.c_str(), &rules), "dispatch");
    RulesHandle rh(rules);
    std::string scenario;
    if (dp_has_sample_seed) {
      std::string sampler = sampler_json_from(dp_sampler);
      CString sc;
      check(grs_scenario_sample(grid.get(), sampler.empty() ? nullptr : sampler.c_str(), dp_sample_seed, &sc.s),
            "dispatch");
      scenario = sc.s;
    } else {
      scenario = read_file(dp_scenario);
    }
    CString report;
    check(grs_dispatch(grid.get(), net.get(), rules, scenario.c_str(), &report.s), "dispatch");
    nlohmann::json j = nlohmann::json::parse(report.s);
    if (!dp_out.empty()) write_file_atomic(dp_out, j.dump(2) + "\n");
    std::string status = j.at("status");
    if (status != "optimal") die("dispatch: " + status);
    std::printf("status        %s\ncost          %.2f $/h\nactive leaf   %d\nN-1 secure    %s\n", status.c_str(),
                j.at("cost").get<double>(), j.at("active_leaf").get<int>(),
                j.at("n1_secure").get<bool>() ? "yes" : "no");
    for (auto& [name, mw] : j.at("dispatch_MW").items()) std::printf("  g %-12s %8.2f MW\n", name.c_str(), mw.get<double>());
    for (auto& [name, mw] : j.at("curtailment_MW").items())
      if (mw.get<double>() > 1e-6) std::printf("  curtail %-6s %8.2f MW\n", name.c_str(), mw.get<double>());
  });

  // eval --------------------------------------------------------------------
  std::string ev_grid, ev_model, ev_rules, ev_out, ev_sampler;
  long ev_n = 2000;
  unsigned long long ev_seed = 11;
  int ev_workers = 0;
  auto* eval = app.add_subcommand("eval", "Secure-state percentage with and without rules");
  eval->add_option("--grid", ev_grid, "grid spec JSON");
  eval->add_option("--model", ev_model, "model JSON (rules are extracted)");
  eval->add_option("--rules", ev_rules, "rules JSON");
  eval->add_option("--n", ev_n, "number of fresh scenarios");
  eval->add_option("--seed", ev_seed, "scenario seed");
  eval->add_option("--sampler", ev_sampler, "sampler config JSON");
  eval->add_option("--workers", ev_workers, "worker threads (0 = all cores)");
  eval->add_option("--out", ev_out, "write the JSON report here");

  // eval sweep ------------------------------------------------------------
  std::string sw_data, sw_depths = "6", sw_lambdas = "0,0.001,0.01,0.05,0.1", sw_variants = "udt,wodt,swodt";
  std::string sw_out, sw_csv;
  int sw_k = 5, sw_workers = 0;
  unsigned long long sw_seed = 1;
  auto* sweep = eval->add_subcommand("sweep", "Cross-validated depth/lambda sweep on a dataset");
  sweep->add_option("--data", sw_data, "dataset CSV")->required();
  sweep->add_option("--depths", sw_depths, "e.g. 1..6 or 3,6");
  sweep->add_option("--lambdas", sw_lambdas, "comma-separated grid");
  sweep->add_option("--variants", sw_variants, "comma-separated: udt,wodt,swodtl,swodt");
  sweep->add_option("--k", sw_k, "folds");
  sweep->add_option("--seed", sw_seed, "fold shuffle seed");
  sweep->add_option("--workers", sw_workers, "worker threads (0 = all cores)");
  sweep->add_option("--out", sw_out, "write the JSON report here");
  sweep->add_option("--csv", sw_csv, "also write a flat CSV here");

  eval->callback([&] {
    if (sweep->parsed()) {
      grs_dataset* ds = nullptr;
      check(grs_dataset_load(sw_data.c_str(), &ds), "eval sweep");
      DatasetHandle dsh(ds);
      std::vector<std::string> variants;
      {
        std::stringstream ss(sw_variants);
        std::string tok;
        while (std::getline(ss, tok, ',')) variants.push_back(tok);
      }
      nlohmann::json cfg{{"variants", variants},
                         {"depths", parse_depths(sw_depths)},
                         {"lambdas", parse_doubles(sw_lambdas)},
                         {"k", sw_k}};
      CString report;
      check(grs_sweep(ds, cfg.dump().c_str(), sw_seed, sw_workers, 0, &report.s), "eval sweep");
      if (!sw_out.empty())
        write_file_atomic(sw_out, std::string(report.s) + "\n");
      else
        std::printf("%s\n", report.s);
      if (!sw_csv.empty()) {
        CString csv;
        check(grs_sweep(ds, cfg.dump().c_str(), sw_seed, sw_workers, 1, &csv.s), "eval sweep");
        write_file_atomic(sw_csv, csv.s);
      }
      if (!sw_out.empty()) std::printf("wrote %s\n", sw_out.c_str());
      return;
    }

    if (ev_grid.empty()) die("eval: --grid is required (or use 'eval sweep')", kExitUsageError);
    if (ev_model.empty() == ev_rules.empty())
      die("eval: give exactly one of --model or --rules", kExitUsageError);
    GridHandle grid = load_grid(ev_grid);
    NetHandle net = build_net(grid.get());
    RulesHandle rh;
    if (!ev_rules.empty()) {
      grs_ruleset* rules = nullptr;
      check(grs_rules_load(ev_rules.c_str(), &rules), "eval");
      rh.reset(rules);
    } else {
      grs_model* model = nullptr;
      check(grs_model_load(ev_model.c_str(), &model), "eval");
      ModelHandle mh(model);
      grs_ruleset* rules = nullptr;
      check(grs_rules_extract(model, &rules), "eval");
      rh.reset(rules);
    }
    if (grs_rules_count(rh.get()) == 0) die("eval: rule set is empty (no secure leaves)");
    std::string sampler = sampler_json_from(ev_sampler);
    CString report;
    check(grs_evaluate_security(grid.get(), net.get(), rh.get(), sampler.empty() ? nullptr : sampler.c_str(), ev_n,
                                ev_seed, ev_workers, &report.s),
          "eval");
    nlohmann::json j = nlohmann::json::parse(report.s);
    if (!ev_out.empty()) write_file_atomic(ev_out, j.dump(2) + "\n");
    const auto& u = j.at("unconstrained");
    const auto& c = j.at("constrained");
    std::printf("scenarios            %d\n", j.at("n_scenarios").get<int>());
    std::printf("unconstrained secure %6.1f%%  (avg %.4f s, %d feasible)\n", u.at("secure_pct").get<double>(),
                u.at("avg_solve_seconds").get<double>(), u.at("feasible").get<int>());
    std::printf("constrained secure   %6.1f%%  (avg %.4f s, %d feasible, %d all-rules-infeasible)\n",
                c.at("secure_pct").get<double>(), c.at("avg_solve_seconds").get<double>(),
                c.at("feasible").get<int>(), c.at("all_rules_infeasible").get<int>());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsageError;
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
