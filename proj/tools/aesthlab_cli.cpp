// aesthlab command-line pipeline. Talks to the core exclusively through the
// C API in aesthlab.h.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aesthlab.h"

using nlohmann::json;

namespace {

int die(int code) {
  json err;
  err["error"] = aesthlab_error_name(code);
  err["message"] = aesthlab_last_error();
  std::cerr << err.dump() << "\n";
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    std::exit(1);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string data, schema = "generic", model = "rf", explain = "auto";
  std::string background = "kmeans:3", split = "fraction:0.8";
  std::string out, config_file, run_name;
  std::uint64_t seed = 0;
  bool print_config = false;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "input CSV (must contain 'overall')");
    app->add_option("--schema", schema, "generic|aadb|eva|para");
    app->add_option("--model", model, "rf|gbt|svr|svr-linear|mlp|ols");
    app->add_option("--explain", explain, "auto|exact|kernel|tree");
    app->add_option("--background", background, "kmeans:K|mean|full");
    app->add_option("--split", split, "fraction:F|counts:T:V:E|official");
    app->add_option("--seed", seed, "root seed");
    app->add_option("--out", out, "output directory");
    app->add_option("--run-name", run_name, "fixed run directory name");
    app->add_option("--config", config_file, "config JSON file");
    app->add_flag("--print-config", print_config,
                  "dump the resolved config and exit");
  }

  // Precedence: flags > config file > defaults.
  json resolve(const CLI::App* app) const {
    json c;
    if (!config_file.empty()) c = json::parse(read_file(config_file));
    auto set = [&](const char* flag, const char* key, const auto& value) {
      if (app->count(flag) || !c.contains(key)) c[key] = value;
    };
    set("--data", "data_path", data);
    set("--schema", "schema", schema);
    set("--model", "model", model);
    set("--explain", "explain", explain);
    set("--background", "background", background);
    set("--split", "split", split);
    set("--seed", "seed", seed);
    set("--run-name", "run_name", run_name);
    std::string out_dir = out;
    if (out_dir.empty() && !c.contains("out_dir")) {
      const char* env = std::getenv("AESTHLAB_OUT");
      out_dir = env ? env : "runs";
    }
    if (!out_dir.empty() || !c.contains("out_dir")) c["out_dir"] = out_dir;
    return c;
  }
};

int run_one(const json& config, json* artifacts_out) {
  std::vector<char> buf(1 << 16);
  size_t len = 0;
  int rc = aesthlab_run_experiment(config.dump().c_str(), buf.data(),
                                   buf.size(), &len);
  if (rc != 0) return rc;
  if (artifacts_out) *artifacts_out = json::parse(std::string(buf.data()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aesthlab: attribute-score regression and Shapley reports"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, explain_opts, compare_opts;
  auto* cmd_train = app.add_subcommand(
      "train", "train a model and write the full run artifacts");
  train_opts.attach(cmd_train);

  auto* cmd_eval = app.add_subcommand(
      "eval", "evaluate a saved model on a dataset");
  std::string eval_model_path;
  eval_opts.attach(cmd_eval);
  cmd_eval->add_option("--model-file", eval_model_path, "saved model JSON")
      ->required();

  auto* cmd_explain = app.add_subcommand(
      "explain", "write per-instance attributions for a saved model");
  std::string explain_model_path, explain_out = "attributions.csv";
  explain_opts.attach(cmd_explain);
  cmd_explain->add_option("--model-file", explain_model_path)->required();
  cmd_explain->add_option("--out-file", explain_out, "attribution CSV path");

  auto* cmd_report = app.add_subcommand(
      "report", "render a report series from run artifacts");
  std::string rep_kind, rep_format = "csv", rep_out = "report.csv";
  std::string rep_attr, rep_data, rep_model, rep_schema = "generic";
  std::string rep_background = "kmeans:3";
  std::size_t rep_instance = 0;
  std::uint64_t rep_seed = 0;
  cmd_report->add_option("--kind", rep_kind,
                         "summary|dependence:i:j|interactions|correlations|"
                         "scatter:i|distribution")
      ->required();
  cmd_report->add_option("--format", rep_format, "csv|json|svg");
  cmd_report->add_option("--attributions", rep_attr);
  cmd_report->add_option("--data", rep_data);
  cmd_report->add_option("--model-file", rep_model);
  cmd_report->add_option("--schema", rep_schema);
  cmd_report->add_option("--instance", rep_instance);
  cmd_report->add_option("--background", rep_background);
  cmd_report->add_option("--seed", rep_seed);
  cmd_report->add_option("--out-file", rep_out)->required();

  auto* cmd_compare = app.add_subcommand(
      "compare", "train rf, gbt, svr, mlp, and ols; emit a metrics matrix");
  compare_opts.attach(cmd_compare);

  CLI11_PARSE(app, argc, argv);

  if (cmd_train->parsed()) {
    json config = train_opts.resolve(cmd_train);
    if (train_opts.print_config) {
      std::cout << config.dump(2) << "\n";
      return 0;
    }
    json artifacts;
    if (int rc = run_one(config, &artifacts)) return die(rc);
    std::cout << artifacts.dump(2) << "\n";
    return 0;
  }

  if (cmd_eval->parsed()) {
    json config = eval_opts.resolve(cmd_eval);
    aesthlab_model* model = nullptr;
    aesthlab_dataset* data = nullptr;
    if (int rc = aesthlab_model_load(eval_model_path.c_str(), &model))
      return die(rc);
    if (int rc = aesthlab_dataset_load_csv(
            config["data_path"].get<std::string>().c_str(),
            config["schema"].get<std::string>().c_str(), &data))
      return die(rc);
    std::vector<char> buf(1 << 14);
    size_t len = 0;
    int rc = aesthlab_evaluate(model, data, buf.data(), buf.size(), &len);
    aesthlab_dataset_free(data);
    aesthlab_model_free(model);
    if (rc != 0) return die(rc);
    std::cout << buf.data() << "\n";
    return 0;
  }

  if (cmd_explain->parsed()) {
    json config = explain_opts.resolve(cmd_explain);
    aesthlab_model* model = nullptr;
    aesthlab_dataset* data = nullptr;
    if (int rc = aesthlab_model_load(explain_model_path.c_str(), &model))
      return die(rc);
    if (int rc = aesthlab_dataset_load_csv(
            config["data_path"].get<std::string>().c_str(),
            config["schema"].get<std::string>().c_str(), &data))
      return die(rc);
    int rc = aesthlab_explain(model, data, data,
                              config["explain"].get<std::string>().c_str(),
                              config["background"].get<std::string>().c_str(),
                              config["seed"].get<std::uint64_t>(),
                              explain_out.c_str());
    aesthlab_dataset_free(data);
    aesthlab_model_free(model);
    if (rc != 0) return die(rc);
    std::cout << explain_out << "\n";
    return 0;
  }

  if (cmd_report->parsed()) {
    json inputs;
    inputs["attributions_path"] = rep_attr;
    inputs["data_path"] = rep_data;
    inputs["model_path"] = rep_model;
    inputs["schema"] = rep_schema;
    inputs["instance"] = rep_instance;
    inputs["background"] = rep_background;
    inputs["seed"] = rep_seed;
    if (int rc = aesthlab_report(rep_kind.c_str(), inputs.dump().c_str(),
                                 rep_format.c_str(), rep_out.c_str()))
      return die(rc);
    std::cout << rep_out << "\n";
    return 0;
  }

  if (cmd_compare->parsed()) {
    json base = compare_opts.resolve(cmd_compare);
    const std::vector<std::string> kinds = {"rf", "gbt", "svr", "mlp", "ols"};
    json matrix = json::array();
    for (const auto& kind : kinds) {
      json config = base;
      config["model"] = kind;
      std::string rn = config.value("run_name", std::string());
      config["run_name"] = (rn.empty() ? std::string("compare") : rn) +
                           "-" + kind;
      json artifacts;
      if (int rc = run_one(config, &artifacts)) return die(rc);
      json metrics = json::parse(
          read_file(artifacts["metrics_file"].get<std::string>()));
      metrics["model"] = kind;
      matrix.push_back(metrics);
    }
    std::cout << "model,r2,mae,mse,rmse,spearman_rho\n";
    for (const auto& m : matrix)
      std::printf("%s,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                  m["model"].get<std::string>().c_str(),
                  m["r2"].get<double>(), m["mae"].get<double>(),
                  m["mse"].get<double>(), m["rmse"].get<double>(),
                  m["spearman_rho"].get<double>());
    return 0;
  }
  return 0;
}
