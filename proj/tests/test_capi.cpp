#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridrules.h"
#include "json.hpp"

namespace {

std::string data_path(const char* name) { return std::string(TEST_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct Pipeline {
  grs_grid* grid = nullptr;
  grs_network* net = nullptr;
  grs_dataset* ds = nullptr;
  grs_model* model = nullptr;
  grs_ruleset* rules = nullptr;
  ~Pipeline() {
    grs_ruleset_free(rules);
    grs_model_free(model);
    grs_dataset_free(ds);
    grs_network_free(net);
    grs_grid_free(grid);
  }
};

}  // namespace

TEST_CASE("version and error surface") {
  CHECK(std::string(grs_version()).rfind("gridrules ", 0) == 0);
  grs_grid* g = nullptr;
  CHECK(grs_grid_load("/nonexistent/file.json", &g) == GRS_ERR_IO);
  CHECK(std::string(grs_last_error()).find("nonexistent") != std::string::npos);
  CHECK(grs_grid_parse("{not json", &g) == GRS_ERR_PARSE);
  CHECK(grs_grid_load(nullptr, &g) == GRS_ERR_INVALID);
  CHECK(grs_grid_parse("{}", &g) == GRS_ERR_PARSE);  // missing required fields
}

TEST_CASE("full pipeline through the c api") {
  Pipeline p;
  REQUIRE(grs_grid_load(data_path("toy6.json").c_str(), &p.grid) == GRS_OK);
  REQUIRE(grs_network_build(p.grid, &p.net) == GRS_OK);
  REQUIRE(grs_dataset_generate(p.grid, p.net, nullptr, 400, 5, 2, &p.ds) == GRS_OK);
  CHECK(grs_dataset_size(p.ds) + grs_dataset_skipped(p.ds) == 400);
  long secure = grs_dataset_secure_count(p.ds);
  CHECK(secure > 0);
  CHECK(secure < grs_dataset_size(p.ds));

  const char* train_cfg = R"({"variant":"swodt","max_depth":4,"lambda1":0.01,"lambda2":0.01})";
  REQUIRE(grs_model_train(p.ds, train_cfg, &p.model) == GRS_OK);
  char* stats = nullptr;
  REQUIRE(grs_model_stats(p.model, &stats) == GRS_OK);
  nlohmann::json jstats = nlohmann::json::parse(stats);
  grs_string_free(stats);
  CHECK(jstats.at("depth").get<int>() <= 4);
  CHECK(jstats.at("train_error").get<double>() < 0.2);

  REQUIRE(grs_rules_extract(p.model, &p.rules) == GRS_OK);
  REQUIRE(grs_rules_count(p.rules) >= 1);

  // predict on a dataset row: reload the csv we save
  REQUIRE(grs_dataset_save(p.ds, "/tmp/grs_capi_ds.csv") == GRS_OK);
  grs_dataset* loaded = nullptr;
  REQUIRE(grs_dataset_load("/tmp/grs_capi_ds.csv", &loaded) == GRS_OK);
  CHECK(grs_dataset_size(loaded) == grs_dataset_size(p.ds));
  grs_dataset_free(loaded);
  // sidecar written next to the csv
  nlohmann::json meta = nlohmann::json::parse(slurp("/tmp/grs_capi_ds.csv.meta.json"));
  CHECK(meta.at("seed").get<int>() == 5);
  CHECK(meta.at("n_requested").get<int>() == 400);

  char* scenario = nullptr;
  REQUIRE(grs_scenario_sample(p.grid, nullptr, 17, &scenario) == GRS_OK);
  char* report = nullptr;
  REQUIRE(grs_dispatch(p.grid, p.net, p.rules, scenario, &report) == GRS_OK);
  nlohmann::json jrep = nlohmann::json::parse(report);
  grs_string_free(report);
  CHECK(jrep.contains("status"));

  REQUIRE(grs_export_lp(p.grid, p.net, p.rules, scenario, "/tmp/grs_capi.lp") == GRS_OK);
  std::string lp = slurp("/tmp/grs_capi.lp");
  CHECK(lp.find("Minimize") != std::string::npos);
  CHECK(lp.find("Binary") != std::string::npos);
  grs_string_free(scenario);

  char* sec = nullptr;
  REQUIRE(grs_evaluate_security(p.grid, p.net, p.rules, nullptr, 60, 23, 2, &sec) == GRS_OK);
  nlohmann::json jsec = nlohmann::json::parse(sec);
  grs_string_free(sec);
  CHECK(jsec.at("n_scenarios").get<int>() == 60);

  char* cv = nullptr;
  REQUIRE(grs_cross_validate(p.ds, train_cfg, 4, 1, 2, &cv) == GRS_OK);
  nlohmann::json jcv = nlohmann::json::parse(cv);
  grs_string_free(cv);
  CHECK(jcv.at("folds").get<int>() == 4);

  char* sw = nullptr;
  const char* sweep_cfg = R"({"variants":["udt","swodt"],"depths":[2],"lambdas":[0.01],"k":3})";
  REQUIRE(grs_sweep(p.ds, sweep_cfg, 1, 2, 1, &sw) == GRS_OK);
  CHECK(std::string(sw).rfind("variant,", 0) == 0);
  grs_string_free(sw);

  std::remove("/tmp/grs_capi_ds.csv");
  std::remove("/tmp/grs_capi_ds.csv.meta.json");
  std::remove("/tmp/grs_capi.lp");
}

TEST_CASE("model save/load round trip and prediction") {
  Pipeline p;
  REQUIRE(grs_grid_load(data_path("toy6.json").c_str(), &p.grid) == GRS_OK);
  REQUIRE(grs_network_build(p.grid, &p.net) == GRS_OK);
  REQUIRE(grs_dataset_generate(p.grid, p.net, nullptr, 200, 5, 2, &p.ds) == GRS_OK);
  REQUIRE(grs_model_train(p.ds, R"({"variant":"udt","lambda1":0,"lambda2":0,"max_depth":3})", &p.model) == GRS_OK);
  REQUIRE(grs_model_save(p.model, "/tmp/grs_capi_model.json") == GRS_OK);
  grs_model* loaded = nullptr;
  REQUIRE(grs_model_load("/tmp/grs_capi_model.json", &loaded) == GRS_OK);

  std::vector<double> row{40.0, 30.0, 20.0, 10.0, 5.0, -5.0, 10.0, 2.0, 1.0, 3.0, 4.0, -1.0, 2.0, 1.0, 0.5,
                          70.0, 70.0, 70.0, 1.0};
  int a = -1, b = -1;
  REQUIRE(grs_model_predict(p.model, row.data(), static_cast<long>(row.size()), &a) == GRS_OK);
  REQUIRE(grs_model_predict(loaded, row.data(), static_cast<long>(row.size()), &b) == GRS_OK);
  CHECK(a == b);
  CHECK(grs_model_predict(p.model, row.data(), 3, &a) == GRS_ERR_INVALID);
  grs_model_free(loaded);
  std::remove("/tmp/grs_capi_model.json");
}

TEST_CASE("identical seeds give byte-identical artifacts") {
  for (int round = 0; round < 2; ++round) {
    Pipeline p;
    REQUIRE(grs_grid_load(data_path("toy6.json").c_str(), &p.grid) == GRS_OK);
    REQUIRE(grs_network_build(p.grid, &p.net) == GRS_OK);
    REQUIRE(grs_dataset_generate(p.grid, p.net, nullptr, 300, 9, round + 1, &p.ds) == GRS_OK);
    REQUIRE(grs_model_train(p.ds, R"({"variant":"swodt","max_depth":3,"lambda1":0.02,"lambda2":0.02})",
                            &p.model) == GRS_OK);
    REQUIRE(grs_rules_extract(p.model, &p.rules) == GRS_OK);
    std::string suffix = round == 0 ? "a" : "b";
    REQUIRE(grs_dataset_save(p.ds, ("/tmp/grs_det_ds_" + suffix + ".csv").c_str()) == GRS_OK);
    REQUIRE(grs_model_save(p.model, ("/tmp/grs_det_model_" + suffix + ".json").c_str()) == GRS_OK);
    REQUIRE(grs_rules_save(p.rules, ("/tmp/grs_det_rules_" + suffix + ".json").c_str()) == GRS_OK);
  }
  CHECK(slurp("/tmp/grs_det_ds_a.csv") == slurp("/tmp/grs_det_ds_b.csv"));
  CHECK(slurp("/tmp/grs_det_model_a.json") == slurp("/tmp/grs_det_model_b.json"));
  CHECK(slurp("/tmp/grs_det_rules_a.json") == slurp("/tmp/grs_det_rules_b.json"));
  for (const char* f : {"/tmp/grs_det_ds_a.csv", "/tmp/grs_det_ds_b.csv", "/tmp/grs_det_ds_a.csv.meta.json",
                        "/tmp/grs_det_ds_b.csv.meta.json", "/tmp/grs_det_model_a.json", "/tmp/grs_det_model_b.json",
                        "/tmp/grs_det_rules_a.json", "/tmp/grs_det_rules_b.json"})
    std::remove(f);
}

TEST_CASE("domain errors map to status codes") {
  Pipeline p;
  REQUIRE(grs_grid_load(data_path("toy6.json").c_str(), &p.grid) == GRS_OK);
  REQUIRE(grs_network_build(p.grid, &p.net) == GRS_OK);
  grs_dataset* ds = nullptr;
  CHECK(grs_dataset_generate(p.grid, p.net, "{\"load\": {\"rel_std\": -1}}", 10, 1, 1, &ds) == GRS_ERR_INVALID);
  CHECK(grs_dataset_generate(p.grid, p.net, nullptr, 0, 1, 1, &ds) == GRS_ERR_INVALID);
  REQUIRE(grs_dataset_generate(p.grid, p.net, nullptr, 50, 1, 1, &p.ds) == GRS_OK);
  grs_model* m = nullptr;
  CHECK(grs_model_train(p.ds, R"({"variant":"wodt","lambda1":0.5})", &m) == GRS_ERR_INVALID);
  CHECK(grs_model_train(p.ds, "{bad json", &m) == GRS_ERR_PARSE);
}
