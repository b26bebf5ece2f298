#include "aesth/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aesth/eval.hpp"
#include "aesth/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace aesth::pipeline {

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["data_path"] = c.data_path;
  j["schema"] = c.schema;
  j["split"] = c.split;
  j["model"] = c.model;
  j["explain"] = c.explain;
  j["background"] = c.background;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  j["run_name"] = c.run_name;
  j["model_params"] = c.model_params;
  j["max_explained"] = c.max_explained;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(ErrorCode::bad_config, "config is not valid JSON");
  ExperimentConfig c;
  try {
  if (j.contains("data_path")) c.data_path = j["data_path"].get<std::string>();
  if (j.contains("schema")) c.schema = j["schema"].get<std::string>();
  if (j.contains("split")) c.split = j["split"].get<std::string>();
  if (j.contains("model")) c.model = j["model"].get<std::string>();
  if (j.contains("explain")) c.explain = j["explain"].get<std::string>();
  if (j.contains("background"))
    c.background = j["background"].get<std::string>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("run_name")) c.run_name = j["run_name"].get<std::string>();
  if (j.contains("max_explained"))
    c.max_explained = j["max_explained"].get<std::size_t>();
  if (j.contains("model_params"))
    for (auto& [k, v] : j["model_params"].items())
      c.model_params[k] = v.get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::bad_config, std::string("bad config field: ") +
                                           e.what());
  }
  return c;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot hash " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

tabular::LabeledDataset load_input(const ExperimentConfig& config) {
  auto tag = tabular::schema_tag_from_name(config.schema);
  tabular::LabeledDataset raw = tabular::load_table(config.data_path, tag);
  switch (tag) {
    case tabular::SchemaTag::aadb: return tabular::adapt_aadb(raw);
    case tabular::SchemaTag::para: return tabular::adapt_para(raw);
    default: return raw;  // eva tables arrive pre-averaged in canonical CSV
  }
}

namespace {

tabular::SplitSpec parse_split(const std::string& spec,
                               tabular::SchemaTag tag, std::size_t n,
                               std::uint64_t seed) {
  tabular::SplitSpec s;
  s.seed = seed;
  if (spec == "official") {
    s.kind = tabular::SplitSpec::Kind::official_counts;
    if (tag == tabular::SchemaTag::aadb) {
      if (n < 1500)
        throw Error(ErrorCode::counts_exceed_n,
                    "aadb official split needs n >= 1500");
      s.train_count = n - 1500;
      s.val_count = 500;
      s.test_count = 1000;
    } else if (tag == tabular::SchemaTag::eva) {
      if (n < 4070)
        throw Error(ErrorCode::counts_exceed_n,
                    "eva split needs n >= 4070");
      s.train_count = 3500;
      s.val_count = 0;
      s.test_count = 570;
    } else {
      throw Error(ErrorCode::bad_config,
                  "no official split for this schema; pass counts:T:V:E");
    }
    return s;
  }
  if (spec.rfind("fraction:", 0) == 0) {
    s.kind = tabular::SplitSpec::Kind::fraction;
    s.train_frac = std::stod(spec.substr(9));
    return s;
  }
  if (spec.rfind("counts:", 0) == 0) {
    s.kind = tabular::SplitSpec::Kind::official_counts;
    std::stringstream ss(spec.substr(7));
    char sep;
    if (!(ss >> s.train_count >> sep >> s.val_count >> sep >> s.test_count))
      throw Error(ErrorCode::bad_config, "expected counts:T:V:E");
    return s;
  }
  throw Error(ErrorCode::bad_config, "unknown split spec: " + spec);
}

double param_or(const std::map<std::string, double>& p, const std::string& k,
                double fallback) {
  auto it = p.find(k);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

io::AnyModel train_model(const std::string& model_kind,
                         const std::map<std::string, double>& params,
                         const tabular::LabeledDataset& train,
                         std::uint64_t seed) {
  if (model_kind == "rf") {
    trees::ForestParams p;
    p.n_trees = std::size_t(param_or(params, "n_trees", 150));
    p.tree.max_depth = int(param_or(params, "max_depth", -1));
    p.tree.min_samples_split =
        std::size_t(param_or(params, "min_samples_split", 2));
    p.tree.min_samples_leaf =
        std::size_t(param_or(params, "min_samples_leaf", 1));
    p.tree.max_features = int(param_or(params, "max_features", -1));
    return trees::fit_random_forest(train, p, seed);
  }
  if (model_kind == "gbt") {
    trees::BoostParams p;
    p.rounds = std::size_t(param_or(params, "rounds", 150));
    p.max_depth = int(param_or(params, "max_depth", 3));
    p.learning_rate = param_or(params, "learning_rate", 0.1);
    p.lambda_l2 = param_or(params, "lambda_l2", 1.0);
    p.alpha_l1 = param_or(params, "alpha_l1", 0.0);
    p.subsample = param_or(params, "subsample", 1.0);
    return trees::fit_gbt(train, p, seed);
  }
  if (model_kind == "svr" || model_kind == "svr-linear") {
    svr::KernelSpec k;
    k.kind = model_kind == "svr" ? svr::KernelSpec::Kind::rbf
                                 : svr::KernelSpec::Kind::linear;
    k.gamma = param_or(params, "gamma", -1.0);
    svr::SvrParams p;
    p.C = param_or(params, "C", 1.0);
    p.epsilon = param_or(params, "epsilon", 0.01);
    p.tol = param_or(params, "tol", 1e-3);
    p.max_iter = long(param_or(params, "max_iter", -1));
    return svr::fit_svr(train, k, p, seed);
  }
  if (model_kind == "mlp") {
    mlp::TrainConfig c;
    c.hidden = std::size_t(param_or(params, "hidden", 32));
    c.epochs = std::size_t(param_or(params, "epochs", 10));
    c.batch = std::size_t(param_or(params, "batch", 64));
    c.adam.lr = param_or(params, "lr", 0.001);
    c.l2 = param_or(params, "l2", 1e-2);
    c.seed = seed;
    return mlp::fit_mlp(train, c);
  }
  if (model_kind == "ols") return eval::fit_ols(train);
  throw Error(ErrorCode::bad_config, "unknown model kind: " + model_kind);
}

shapley::BackgroundSet resolve_background(const std::string& spec,
                                          const tabular::LabeledDataset& train,
                                          std::uint64_t seed) {
  if (spec == "full") return shapley::full_background(train);
  if (spec == "mean") {
    std::vector<double> mean(train.d(), 0.0);
    for (std::size_t i = 0; i < train.n(); ++i)
      for (std::size_t j = 0; j < train.d(); ++j)
        mean[j] += train.at(i, j) / double(train.n());
    return shapley::single_point_background(mean);
  }
  if (spec.rfind("kmeans:", 0) == 0) {
    std::size_t k = 0;
    try {
      k = std::size_t(std::stoul(spec.substr(7)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::bad_config, "bad kmeans count in: " + spec);
    }
    if (k == 0)
      throw Error(ErrorCode::bad_config, "kmeans background needs k >= 1");
    k = std::min(k, train.n());
    return shapley::kmeans_summarize(train, k, derive_seed(seed, 0x6b6dULL))
        .background;
  }
  throw Error(ErrorCode::bad_config, "unknown background spec: " + spec);
}

std::vector<shapley::Attribution> explain_instances(
    const io::AnyModel& model, const std::string& method,
    const tabular::LabeledDataset& rows,
    const shapley::BackgroundSet& background, std::uint64_t seed,
    std::size_t limit) {
  std::string m = method;
  if (m == "none") return {};
  const bool tree_model = std::holds_alternative<trees::ForestModel>(model) ||
                          std::holds_alternative<trees::BoostedModel>(model);
  if (m == "auto") m = tree_model ? "tree" : "kernel";
  if (m == "tree" && !tree_model)
    throw Error(ErrorCode::incompatible_explain_method,
                "tree explainer requires an rf or gbt model");

  shapley::PredictOracle oracle{
      [&model](VecView x) { return io::model_predict(model, x); },
      io::model_n_features(model)};

  const std::size_t count =
      limit > 0 ? std::min(limit, rows.n()) : rows.n();
  std::vector<shapley::Attribution> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto x = rows.row(i);
    if (m == "tree") {
      if (const auto* f = std::get_if<trees::ForestModel>(&model))
        out.push_back(shapley::tree_shap(*f, x));
      else
        out.push_back(
            shapley::tree_shap(std::get<trees::BoostedModel>(model), x));
    } else if (m == "exact") {
      out.push_back(shapley::exact_shapley(oracle, x, background));
    } else if (m == "kernel") {
      shapley::KernelSampling s;
      if (oracle.d > 13) {
        s.enumerate_all = false;
        s.n_samples = 4096;
        s.seed = derive_seed(seed, i);
      }
      out.push_back(shapley::kernel_shap(oracle, x, background, s));
    } else {
      throw Error(ErrorCode::bad_config, "unknown explain method: " + m);
    }
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

}  // namespace

void write_attributions_csv(const std::string& path,
                            const std::vector<std::string>& feature_names,
                            const std::vector<shapley::Attribution>& attrs) {
  std::ostringstream out;
  out << "instance_id,base_value";
  for (const auto& n : feature_names) out << ",phi_" << n;
  out << '\n';
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    out << i << ',' << format_double(attrs[i].base_value);
    for (double p : attrs[i].phis) out << ',' << format_double(p);
    out << '\n';
  }
  atomic_write(path, out.str());
}

std::pair<std::vector<std::string>, std::vector<shapley::Attribution>>
read_attributions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::missing_input, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::empty_input, "empty attribution file");
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= 2) {
        if (cell.rfind("phi_", 0) != 0)
          throw Error(ErrorCode::bad_config, "malformed attribution header");
        names.push_back(cell.substr(4));
      }
      ++col;
    }
  }
  std::vector<shapley::Attribution> attrs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    shapley::Attribution a;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col == 1)
        a.base_value = std::stod(cell);
      else if (col >= 2)
        a.phis.push_back(std::stod(cell));
      ++col;
    }
    if (a.phis.size() != names.size())
      throw Error(ErrorCode::bad_config, "ragged attribution row");
    attrs.push_back(std::move(a));
  }
  return {names, attrs};
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  tabular::LabeledDataset data = load_input(config);
  auto tag = data.schema_tag;
  tabular::SplitSpec split_spec =
      parse_split(config.split, tag, data.n(), derive_seed(config.seed, 1));
  tabular::SplitResult split = tabular::split_dataset(data, split_spec);
  if (split.test.n() == 0)
    throw Error(ErrorCode::bad_config, "split leaves no test rows");

  io::AnyModel model = train_model(config.model, config.model_params,
                                   split.train, derive_seed(config.seed, 2));

  std::vector<double> y_pred(split.test.n());
  for (std::size_t i = 0; i < split.test.n(); ++i)
    y_pred[i] = io::model_predict(model, split.test.row(i));
  eval::MetricsReport metrics =
      eval::compute_metrics(split.test.targets, y_pred);

  shapley::BackgroundSet background = resolve_background(
      config.background, split.train, derive_seed(config.seed, 3));
  std::vector<shapley::Attribution> attrs =
      explain_instances(model, config.explain, split.test, background,
                        derive_seed(config.seed, 4), config.max_explained);
  auto ranking = shapley::summary_ranking(attrs);

  RunArtifacts art;
  std::string name = config.run_name;
  if (name.empty()) {
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S",
                  std::localtime(&now));
    name = std::string("run-") + stamp + "-seed" +
           std::to_string(config.seed);
  }
  art.run_dir = (fs::path(config.out_dir) / name).string();
  fs::create_directories(art.run_dir);

  art.model_file = (fs::path(art.run_dir) / "model.json").string();
  io::AnyModel const& cmodel = model;
  atomic_write(art.model_file, io::model_to_json(cmodel) + "\n");

  art.metrics_file = (fs::path(art.run_dir) / "metrics.json").string();
  {
    json j;
    j["model"] = config.model;
    j["n_train"] = split.train.n();
    j["n_test"] = split.test.n();
    j["r2"] = metrics.r2;
    j["mae"] = metrics.mae;
    j["mse"] = metrics.mse;
    j["rmse"] = metrics.rmse;
    j["spearman_rho"] = metrics.spearman_rho;
    if (metrics.spearman_p) j["spearman_p"] = *metrics.spearman_p;
    atomic_write(art.metrics_file, j.dump(2) + "\n");
  }

  art.attribution_file = (fs::path(art.run_dir) / "attributions.csv").string();
  write_attributions_csv(art.attribution_file, data.feature_names, attrs);

  art.ranking_file = (fs::path(art.run_dir) / "ranking.csv").string();
  {
    std::ostringstream out;
    out << "rank,feature,mean_abs_phi\n";
    for (std::size_t r = 0; r < ranking.size(); ++r)
      out << r + 1 << ',' << data.feature_names[ranking[r].feature] << ','
          << format_double(ranking[r].mean_abs_phi) << '\n';
    atomic_write(art.ranking_file, out.str());
  }

  art.manifest_file = (fs::path(art.run_dir) / "manifest.json").string();
  {
    json files;
    for (const std::string* f :
         {&art.model_file, &art.metrics_file, &art.attribution_file,
          &art.ranking_file}) {
      char hex[20];
      std::snprintf(hex, sizeof(hex), "%016llx",
                    (unsigned long long)fnv1a_file(*f));
      files[fs::path(*f).filename().string()] = hex;
    }
    json j;
    j["config"] = json::parse(config_to_json(config));
    j["hashes"] = files;
    atomic_write(art.manifest_file, j.dump(2) + "\n");
  }
  return art;
}

namespace {

// Minimal static SVG scatter; normative outputs are csv/json.
std::string svg_scatter(const std::vector<std::array<double, 2>>& pts,
                        const std::string& x_label,
                        const std::string& y_label) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& p : pts) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double W = 640, H = 480, pad = 48;
  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
    << "' height='" << H << "'>\n"
    << "<rect width='100%' height='100%' fill='white'/>\n"
    << "<line x1='" << pad << "' y1='" << H - pad << "' x2='" << W - pad
    << "' y2='" << H - pad << "' stroke='black'/>\n"
    << "<line x1='" << pad << "' y1='" << pad << "' x2='" << pad << "' y2='"
    << H - pad << "' stroke='black'/>\n"
    << "<text x='" << W / 2 << "' y='" << H - 8 << "' font-size='13'>"
    << x_label << "</text>\n"
    << "<text x='12' y='" << H / 2
    << "' font-size='13' transform='rotate(-90 12 " << H / 2 << ")'>"
    << y_label << "</text>\n";
  for (auto& p : pts) {
    double px = pad + (p[0] - xmin) / (xmax - xmin) * (W - 2 * pad);
    double py = H - pad - (p[1] - ymin) / (ymax - ymin) * (H - 2 * pad);
    s << "<circle cx='" << px << "' cy='" << py
      << "' r='2.5' fill='steelblue' fill-opacity='0.6'/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

void emit_report(const std::string& kind, const ReportInputs& inputs,
                 ReportFormat format, const std::string& out_path) {
  auto load_data = [&]() {
    if (inputs.data_path.empty())
      throw Error(ErrorCode::missing_input, "report kind needs --data");
    ExperimentConfig c;
    c.data_path = inputs.data_path;
    c.schema = inputs.schema;
    return load_input(c);
  };
  auto load_attrs = [&]() {
    if (inputs.attributions_path.empty())
      throw Error(ErrorCode::missing_input,
                  "report kind needs an attribution file");
    return read_attributions_csv(inputs.attributions_path);
  };

  std::ostringstream out;
  if (kind == "summary") {
    auto [names, attrs] = load_attrs();
    auto ranking = shapley::summary_ranking(attrs);
    if (format == ReportFormat::csv) {
      out << "rank,feature,mean_abs_phi\n";
      for (std::size_t r = 0; r < ranking.size(); ++r)
        out << r + 1 << ',' << names[ranking[r].feature] << ','
            << format_double(ranking[r].mean_abs_phi) << '\n';
    } else if (format == ReportFormat::json) {
      json j = json::array();
      for (const auto& r : ranking)
        j.push_back({{"feature", names[r.feature]},
                     {"mean_abs_phi", r.mean_abs_phi}});
      out << j.dump(2) << '\n';
    } else {
      // Beeswarm-style: one horizontal band per feature in ranked order,
      // a dot per instance at its shap value.
      std::vector<std::array<double, 2>> pts;
      for (std::size_t r = 0; r < ranking.size(); ++r)
        for (const auto& a : attrs)
          pts.push_back({a.phis[ranking[r].feature], double(ranking.size() - r)});
      out << svg_scatter(pts, "shap value", "feature rank");
    }
  } else if (kind.rfind("dependence:", 0) == 0) {
    std::size_t i = 0, j = 0;
    if (std::sscanf(kind.c_str(), "dependence:%zu:%zu", &i, &j) != 2)
      throw Error(ErrorCode::unknown_kind, "expected dependence:i:j");
    auto [names, attrs] = load_attrs();
    auto data = load_data();
    // attributions may cover only the first rows (max_explained)
    if (attrs.size() < data.n()) {
      data.values.resize(attrs.size() * data.d());
      data.targets.resize(attrs.size());
    }
    auto series = shapley::dependence_series(attrs, data, i, j);
    if (format == ReportFormat::csv) {
      out << "feature_value,shap_value,color_value\n";
      for (const auto& p : series)
        out << format_double(p.feature_value) << ','
            << format_double(p.shap_value) << ','
            << format_double(p.color_value) << '\n';
    } else if (format == ReportFormat::json) {
      json arr = json::array();
      for (const auto& p : series)
        arr.push_back({{"x", p.feature_value},
                       {"phi", p.shap_value},
                       {"color", p.color_value}});
      out << arr.dump(2) << '\n';
    } else {
      std::vector<std::array<double, 2>> pts;
      for (const auto& p : series)
        pts.push_back({p.feature_value, p.shap_value});
      out << svg_scatter(pts, names[i], "shap value");
    }
  } else if (kind == "interactions") {
    if (inputs.model_path.empty())
      throw Error(ErrorCode::missing_input, "interactions needs --model");
    io::AnyModel model = io::load_model(inputs.model_path);
    auto data = load_data();
    if (inputs.instance >= data.n())
      throw Error(ErrorCode::index_out_of_range, "instance out of range");
    auto background =
        resolve_background(inputs.background, data, inputs.seed);
    shapley::PredictOracle oracle{
        [&model](VecView x) { return io::model_predict(model, x); },
        io::model_n_features(model)};
    auto mat = shapley::full_interaction_matrix(
        oracle, data.row(inputs.instance), background);
    if (format == ReportFormat::json) {
      json j;
      j["features"] = data.feature_names;
      j["matrix"] = json::array();
      for (std::size_t r = 0; r < mat.d; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < mat.d; ++c) row.push_back(mat.at(r, c));
        j["matrix"].push_back(row);
      }
      out << j.dump(2) << '\n';
    } else {
      // Square CSV matrix; svg falls back to the same table wrapped in text.
      out << "feature";
      for (const auto& n : data.feature_names) out << ',' << n;
      out << '\n';
      for (std::size_t r = 0; r < mat.d; ++r) {
        out << data.feature_names[r];
        for (std::size_t c = 0; c < mat.d; ++c)
          out << ',' << format_double(mat.at(r, c));
        out << '\n';
      }
    }
  } else if (kind == "correlations") {
    auto data = load_data();
    auto rep = eval::attribute_correlations(data);
    std::vector<std::size_t> order(rep.rho.size());
    for (std::size_t idx = 0; idx < order.size(); ++idx) order[idx] = idx;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                     std::size_t b) {
      return rep.rho[a] > rep.rho[b];
    });
    if (format == ReportFormat::json) {
      json arr = json::array();
      for (std::size_t idx : order)
        arr.push_back({{"feature", rep.feature_names[idx]},
                       {"rho", rep.rho[idx]},
                       {"defined", bool(rep.defined[idx])}});
      out << arr.dump(2) << '\n';
    } else {
      out << "feature,spearman_rho,defined\n";
      for (std::size_t idx : order)
        out << rep.feature_names[idx] << ',' << format_double(rep.rho[idx])
            << ',' << (rep.defined[idx] ? 1 : 0) << '\n';
    }
  } else if (kind.rfind("scatter:", 0) == 0) {
    std::size_t i = std::size_t(std::stoul(kind.substr(8)));
    auto data = load_data();
    auto series = eval::scatter_series(data, i);
    if (format == ReportFormat::svg) {
      std::vector<std::array<double, 2>> pts;
      for (auto [x, y] : series) pts.push_back({x, y});
      out << svg_scatter(pts, data.feature_names[i], "overall");
    } else if (format == ReportFormat::json) {
      json arr = json::array();
      for (auto [x, y] : series) arr.push_back({{"x", x}, {"y", y}});
      out << arr.dump(2) << '\n';
    } else {
      out << data.feature_names[i] << ",overall\n";
      for (auto [x, y] : series)
        out << format_double(x) << ',' << format_double(y) << '\n';
    }
  } else if (kind == "distribution") {
    auto data = load_data();
    auto dist = tabular::attribute_distribution(data);
    if (format == ReportFormat::json) {
      json arr = json::array();
      for (std::size_t j = 0; j < dist.feature_names.size(); ++j)
        arr.push_back({{"feature", dist.feature_names[j]},
                       {"negative", dist.negative[j]},
                       {"null", dist.null[j]},
                       {"positive", dist.positive[j]}});
      out << arr.dump(2) << '\n';
    } else {
      out << "feature,negative,null,positive\n";
      for (std::size_t j = 0; j < dist.feature_names.size(); ++j)
        out << dist.feature_names[j] << ',' << dist.negative[j] << ','
            << dist.null[j] << ',' << dist.positive[j] << '\n';
    }
  } else {
    throw Error(ErrorCode::unknown_kind, "unknown report kind: " + kind);
  }
  atomic_write(out_path, out.str());
}

}  // namespace aesth::pipeline
