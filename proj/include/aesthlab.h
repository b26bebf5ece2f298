/* C API for the aesthlab shared library.
 *
 * All functions return 0 on success or a nonzero error code; the message
 * for the most recent failure on the calling thread is available via
 * aesthlab_last_error(). Handles are opaque and must be released with the
 * matching *_free call.
 */
#ifndef AESTHLAB_H
#define AESTHLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct aesthlab_dataset aesthlab_dataset;
typedef struct aesthlab_model aesthlab_model;

/* Error codes mirror the library's error taxonomy; 0 is success. */
const char* aesthlab_last_error(void);
const char* aesthlab_error_name(int code);

/* ---- datasets ---- */

/* schema: "generic", "aadb", "eva", or "para"; adapters run automatically. */
int aesthlab_dataset_load_csv(const char* path, const char* schema,
                              aesthlab_dataset** out);
int aesthlab_dataset_write_csv(const aesthlab_dataset* d, const char* path);
int aesthlab_dataset_shape(const aesthlab_dataset* d, size_t* n, size_t* dim);
int aesthlab_dataset_feature_name(const aesthlab_dataset* d, size_t index,
                                  const char** out);
void aesthlab_dataset_free(aesthlab_dataset* d);

/* ---- models ---- */

/* config_json: {"model": "rf|gbt|svr|svr-linear|mlp|ols",
 *               "seed": <uint>, "model_params": {...}} */
int aesthlab_model_train(const aesthlab_dataset* train,
                         const char* config_json, aesthlab_model** out);
int aesthlab_model_predict(const aesthlab_model* m, const double* x,
                           size_t dim, double* out);
int aesthlab_model_kind(const aesthlab_model* m, const char** out);
int aesthlab_model_save(const aesthlab_model* m, const char* path);
int aesthlab_model_load(const char* path, aesthlab_model** out);
void aesthlab_model_free(aesthlab_model* m);

/* ---- evaluation ---- */

/* Writes a flat JSON metrics object (r2, mae, mse, rmse, spearman_rho,
 * spearman_p) into buf; returns the required length via len. */
int aesthlab_evaluate(const aesthlab_model* m, const aesthlab_dataset* test,
                      char* buf, size_t buf_len, size_t* len);

/* ---- explanation ---- */

/* method: "auto", "exact", "kernel", or "tree";
 * background: "kmeans:K", "mean", or "full" (resolved on `background_data`).
 * Writes the per-instance attribution CSV to out_path. */
int aesthlab_explain(const aesthlab_model* m, const aesthlab_dataset* rows,
                     const aesthlab_dataset* background_data,
                     const char* method, const char* background,
                     uint64_t seed, const char* out_path);

/* ---- pipeline ---- */

/* Runs the full train/evaluate/explain/report pipeline from a config JSON
 * (same schema as the CLI config file). On success writes the artifact
 * paths as a JSON object into buf. */
int aesthlab_run_experiment(const char* config_json, char* buf,
                            size_t buf_len, size_t* len);

/* kind: "summary", "dependence:i:j", "interactions", "correlations",
 * "scatter:i", "distribution"; format: "csv", "json", or "svg". */
int aesthlab_report(const char* kind, const char* inputs_json,
                    const char* format, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* AESTHLAB_H */
