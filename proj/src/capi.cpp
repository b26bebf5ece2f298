#include "aesthlab.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "aesth/pipeline.hpp"

using nlohmann::json;

struct aesthlab_dataset {
  aesth::tabular::LabeledDataset data;
};

struct aesthlab_model {
  aesth::io::AnyModel model;
};

namespace {

thread_local std::string g_last_error;

int fail(const aesth::Error& e) {
  g_last_error = e.what();
  return int(e.code());
}

int fail_generic(const std::exception& e) {
  g_last_error = e.what();
  return int(aesth::ErrorCode::bad_config);
}

template <typename F>
int guarded(F&& fn) {
  try {
    fn();
    return 0;
  } catch (const aesth::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail_generic(e);
  }
}

int copy_out(const std::string& s, char* buf, size_t buf_len, size_t* len) {
  if (len) *len = s.size() + 1;
  if (!buf || buf_len < s.size() + 1)
    throw aesth::Error(aesth::ErrorCode::bad_config,
                       "output buffer too small (need " +
                           std::to_string(s.size() + 1) + " bytes)");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return 0;
}

}  // namespace

extern "C" {

const char* aesthlab_last_error(void) { return g_last_error.c_str(); }

const char* aesthlab_error_name(int code) {
  return aesth::error_code_name(aesth::ErrorCode(code));
}

int aesthlab_dataset_load_csv(const char* path, const char* schema,
                              aesthlab_dataset** out) {
  return guarded([&] {
    aesth::pipeline::ExperimentConfig c;
    c.data_path = path;
    c.schema = schema ? schema : "generic";
    *out = new aesthlab_dataset{aesth::pipeline::load_input(c)};
  });
}

int aesthlab_dataset_write_csv(const aesthlab_dataset* d, const char* path) {
  return guarded([&] { aesth::tabular::write_table(d->data, path); });
}

int aesthlab_dataset_shape(const aesthlab_dataset* d, size_t* n,
                           size_t* dim) {
  return guarded([&] {
    if (n) *n = d->data.n();
    if (dim) *dim = d->data.d();
  });
}

int aesthlab_dataset_feature_name(const aesthlab_dataset* d, size_t index,
                                  const char** out) {
  return guarded([&] {
    if (index >= d->data.d())
      throw aesth::Error(aesth::ErrorCode::index_out_of_range,
                         "feature index out of range");
    *out = d->data.feature_names[index].c_str();
  });
}

void aesthlab_dataset_free(aesthlab_dataset* d) { delete d; }

int aesthlab_model_train(const aesthlab_dataset* train,
                         const char* config_json, aesthlab_model** out) {
  return guarded([&] {
    json j = json::parse(config_json);
    std::string kind = j.value("model", "rf");
    std::uint64_t seed = j.value("seed", std::uint64_t(0));
    std::map<std::string, double> params;
    if (j.contains("model_params"))
      for (auto& [k, v] : j["model_params"].items())
        params[k] = v.get<double>();
    *out = new aesthlab_model{
        aesth::pipeline::train_model(kind, params, train->data, seed)};
  });
}

int aesthlab_model_predict(const aesthlab_model* m, const double* x,
                           size_t dim, double* out) {
  return guarded([&] {
    *out = aesth::io::model_predict(m->model, aesth::VecView(x, dim));
  });
}

int aesthlab_model_kind(const aesthlab_model* m, const char** out) {
  return guarded([&] { *out = aesth::io::model_kind_name(m->model); });
}

int aesthlab_model_save(const aesthlab_model* m, const char* path) {
  return guarded([&] { aesth::io::save_model(m->model, path); });
}

int aesthlab_model_load(const char* path, aesthlab_model** out) {
  return guarded([&] {
    *out = new aesthlab_model{aesth::io::load_model(path)};
  });
}

void aesthlab_model_free(aesthlab_model* m) { delete m; }

int aesthlab_evaluate(const aesthlab_model* m, const aesthlab_dataset* test,
                      char* buf, size_t buf_len, size_t* len) {
  return guarded([&] {
    const auto& d = test->data;
    std::vector<double> pred(d.n());
    for (std::size_t i = 0; i < d.n(); ++i)
      pred[i] = aesth::io::model_predict(m->model, d.row(i));
    auto rep = aesth::eval::compute_metrics(d.targets, pred);
    json j;
    j["r2"] = rep.r2;
    j["mae"] = rep.mae;
    j["mse"] = rep.mse;
    j["rmse"] = rep.rmse;
    j["spearman_rho"] = rep.spearman_rho;
    if (rep.spearman_p) j["spearman_p"] = *rep.spearman_p;
    copy_out(j.dump(2), buf, buf_len, len);
  });
}

int aesthlab_explain(const aesthlab_model* m, const aesthlab_dataset* rows,
                     const aesthlab_dataset* background_data,
                     const char* method, const char* background,
                     uint64_t seed, const char* out_path) {
  return guarded([&] {
    auto bg = aesth::pipeline::resolve_background(
        background ? background : "kmeans:3",
        background_data ? background_data->data : rows->data, seed);
    auto attrs = aesth::pipeline::explain_instances(
        m->model, method ? method : "auto", rows->data, bg, seed);
    aesth::pipeline::write_attributions_csv(
        out_path, rows->data.feature_names, attrs);
  });
}

int aesthlab_run_experiment(const char* config_json, char* buf,
                            size_t buf_len, size_t* len) {
  return guarded([&] {
    auto config = aesth::pipeline::config_from_json(config_json);
    auto art = aesth::pipeline::run_experiment(config);
    json j;
    j["run_dir"] = art.run_dir;
    j["model_file"] = art.model_file;
    j["metrics_file"] = art.metrics_file;
    j["attribution_file"] = art.attribution_file;
    j["ranking_file"] = art.ranking_file;
    j["manifest_file"] = art.manifest_file;
    copy_out(j.dump(2), buf, buf_len, len);
  });
}

int aesthlab_report(const char* kind, const char* inputs_json,
                    const char* format, const char* out_path) {
  return guarded([&] {
    json j = json::parse(inputs_json);
    aesth::pipeline::ReportInputs in;
    in.attributions_path = j.value("attributions_path", "");
    in.data_path = j.value("data_path", "");
    in.model_path = j.value("model_path", "");
    in.schema = j.value("schema", "generic");
    in.instance = j.value("instance", std::size_t(0));
    in.background = j.value("background", "kmeans:3");
    in.seed = j.value("seed", std::uint64_t(0));
    std::string f = format ? format : "csv";
    aesth::pipeline::ReportFormat fmt =
        f == "json"  ? aesth::pipeline::ReportFormat::json
        : f == "svg" ? aesth::pipeline::ReportFormat::svg
                     : aesth::pipeline::ReportFormat::csv;
    aesth::pipeline::emit_report(kind, in, fmt, out_path);
  });
}

}  // extern "C"
