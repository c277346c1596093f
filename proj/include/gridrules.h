/* C interface to the gridrules library.
 *
 * All functions return grs_status; on failure grs_last_error() gives a
 * thread-local message. Handles are opaque and must be released with the
 * matching _free function. Strings returned through char** are owned by the
 * caller and released with grs_string_free.
 *
 * Structured options (sampler, training, sweep, scenario) are passed as JSON
 * text; the schemas are documented in the project README.
 */
#ifndef GRIDRULES_H
#define GRIDRULES_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct grs_grid grs_grid;
typedef struct grs_network grs_network;
typedef struct grs_dataset grs_dataset;
typedef struct grs_model grs_model;
typedef struct grs_ruleset grs_ruleset;

typedef enum grs_status {
  GRS_OK = 0,
  GRS_ERR_IO = 1,
  GRS_ERR_PARSE = 2,
  GRS_ERR_INVALID = 3,
  GRS_ERR_NUMERIC = 4,
  GRS_ERR_INFEASIBLE = 5,
  GRS_ERR_INTERNAL = 6
} grs_status;

const char* grs_version(void);
const char* grs_last_error(void);
void grs_string_free(char* s);

/* Grid and DC network ---------------------------------------------------- */
grs_status grs_grid_load(const char* path, grs_grid** out);
grs_status grs_grid_parse(const char* json_text, grs_grid** out);
void grs_grid_free(grs_grid* grid);

grs_status grs_network_build(const grs_grid* grid, grs_network** out);
void grs_network_free(grs_network* net);

/* Scenario sampling and dataset generation -------------------------------- */
/* sampler_json may be NULL for defaults. */
grs_status grs_scenario_sample(const grs_grid* grid, const char* sampler_json, unsigned long long seed,
                               char** scenario_json_out);

grs_status grs_dataset_generate(const grs_grid* grid, const grs_network* net, const char* sampler_json, long n,
                                unsigned long long seed, int workers, grs_dataset** out);
grs_status grs_dataset_load(const char* csv_path, grs_dataset** out);
/* Writes the CSV and a <path>.meta.json sidecar, atomically. */
grs_status grs_dataset_save(const grs_dataset* ds, const char* csv_path);
long grs_dataset_size(const grs_dataset* ds);
long grs_dataset_skipped(const grs_dataset* ds);
long grs_dataset_secure_count(const grs_dataset* ds);
void grs_dataset_free(grs_dataset* ds);

/* Training and prediction ------------------------------------------------- */
grs_status grs_model_train(const grs_dataset* ds, const char* train_json, grs_model** out);
grs_status grs_model_load(const char* path, grs_model** out);
grs_status grs_model_save(const grs_model* model, const char* path);
grs_status grs_model_predict(const grs_model* model, const double* features, long dim, int* label_out);
grs_status grs_model_stats(const grs_model* model, char** stats_json_out);
void grs_model_free(grs_model* model);

/* Rule extraction and embedding ------------------------------------------- */
grs_status grs_rules_extract(const grs_model* model, grs_ruleset** out);
grs_status grs_rules_load(const char* path, grs_ruleset** out);
grs_status grs_rules_save(const grs_ruleset* rules, const char* path);
long grs_rules_count(const grs_ruleset* rules);
void grs_ruleset_free(grs_ruleset* rules);

/* scenario_json: {"renewable_MW": [...], "load_MW": [...]} */
grs_status grs_export_lp(const grs_grid* grid, const grs_network* net, const grs_ruleset* rules,
                         const char* scenario_json, const char* out_path);
grs_status grs_dispatch(const grs_grid* grid, const grs_network* net, const grs_ruleset* rules,
                        const char* scenario_json, char** report_json_out);
grs_status grs_evaluate_security(const grs_grid* grid, const grs_network* net, const grs_ruleset* rules,
                                 const char* sampler_json, long n_scenarios, unsigned long long seed, int workers,
                                 char** report_json_out);

/* Experiments -------------------------------------------------------------- */
grs_status grs_cross_validate(const grs_dataset* ds, const char* train_json, int k, unsigned long long seed,
                              int workers, char** report_json_out);
/* sweep_json: {"variants": [...], "depths": [...], "lambdas": [...],
 *              "k": 5, "base": <train config>} ; as_csv selects CSV output. */
grs_status grs_sweep(const grs_dataset* ds, const char* sweep_json, unsigned long long seed, int workers, int as_csv,
                     char** report_out);

#ifdef __cplusplus
}
#endif

#endif /* GRIDRULES_H */
