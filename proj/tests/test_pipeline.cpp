#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aesth/eval.hpp"
#include "aesth/pipeline.hpp"

using namespace aesth;
using namespace aesth::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("tmp_pl") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string write_synth_csv(const fs::path& dir, std::size_t n,
                            std::uint64_t seed,
                            bool product = false) {
  tabular::GeneratorSpec gen;
  if (product) {
    gen.kind = tabular::GeneratorSpec::Kind::product_pairs;
    gen.pairs = {{0, 1}, {2, 3}};
    gen.noise_sd = 0.05;
  } else {
    gen.weights = {1.0, -2.0, 0.5, 0.0};
    gen.intercept = 0.3;
    gen.noise_sd = 0.1;
  }
  auto d = tabular::synth_dataset(n, 4, gen, seed);
  auto path = (dir / "data.csv").string();
  tabular::write_table(d, path);
  return path;
}

}  // namespace

TEST_CASE("config json round trip") {
  ExperimentConfig c;
  c.data_path = "some.csv";
  c.schema = "para";
  c.split = "counts:100:0:20";
  c.model = "gbt";
  c.explain = "tree";
  c.background = "full";
  c.seed = 99;
  c.out_dir = "elsewhere";
  c.run_name = "exp1";
  c.model_params["rounds"] = 10;
  c.max_explained = 5;
  auto back = config_from_json(config_to_json(c));
  CHECK(back.data_path == c.data_path);
  CHECK(back.schema == c.schema);
  CHECK(back.split == c.split);
  CHECK(back.model == c.model);
  CHECK(back.explain == c.explain);
  CHECK(back.background == c.background);
  CHECK(back.seed == 99);
  CHECK(back.run_name == "exp1");
  CHECK(back.model_params.at("rounds") == 10);
  CHECK(back.max_explained == 5);

  CHECK_THROWS_AS(config_from_json("{nonsense"), Error);
}

TEST_CASE("fnv1a hash is stable and content-sensitive") {
  TempDir dir("hash");
  auto a = (dir.path / "a.txt").string();
  atomic_write(a, "hello");
  CHECK(fnv1a_file(a) == fnv1a_file(a));
  auto b = (dir.path / "b.txt").string();
  atomic_write(b, "hello");
  CHECK(fnv1a_file(a) == fnv1a_file(b));
  atomic_write(b, "hello!");
  CHECK(fnv1a_file(a) != fnv1a_file(b));
  CHECK_THROWS_AS(fnv1a_file((dir.path / "missing").string()), Error);
}

TEST_CASE("atomic_write leaves no temp files behind") {
  TempDir dir("atomic");
  auto p = (dir.path / "out.json").string();
  atomic_write(p, "{}");
  CHECK(slurp(p) == "{}");
  atomic_write(p, "{\"a\":1}");  // overwrite path
  CHECK(slurp(p) == "{\"a\":1}");
  std::size_t count = 0;
  for (auto& e : fs::directory_iterator(dir.path)) { (void)e; ++count; }
  CHECK(count == 1);
}

TEST_CASE("attribution csv round trip") {
  TempDir dir("attr");
  auto p = (dir.path / "attr.csv").string();
  std::vector<std::string> names = {"alpha", "beta"};
  std::vector<shapley::Attribution> atts = {{0.25, {1.0 / 3.0, -0.125}},
                                            {0.5, {0.0, 2.5}}};
  write_attributions_csv(p, names, atts);
  auto [names2, atts2] = read_attributions_csv(p);
  CHECK(names2 == names);
  REQUIRE(atts2.size() == 2);
  CHECK(atts2[0].base_value == atts[0].base_value);
  CHECK(atts2[0].phis == atts[0].phis);
  CHECK(atts2[1].phis == atts[1].phis);
}

TEST_CASE("train_model dispatch covers every family") {
  TempDir dir("train");
  tabular::GeneratorSpec gen;
  gen.weights = {1.0, 0.5};
  gen.noise_sd = 0.05;
  auto d = tabular::synth_dataset(80, 2, gen, 3);
  std::map<std::string, double> small = {{"n_trees", 5},   {"rounds", 5},
                                         {"epochs", 3},    {"hidden", 8}};
  for (std::string kind : {"rf", "gbt", "svr", "svr-linear", "mlp", "ols"}) {
    auto m = train_model(kind, small, d, 1);
    CHECK(io::model_kind_name(m) == kind);
    CHECK(io::model_n_features(m) == 2);
    double p = io::model_predict(m, d.row(0));
    CHECK(std::isfinite(p));
    // persistence round trip preserves predictions bit-exactly
    auto path = (dir.path / (kind + std::string(".json"))).string();
    io::save_model(m, path);
    auto back = io::load_model(path);
    CHECK(io::model_kind_name(back) == kind);
    for (std::size_t i = 0; i < 10; ++i)
      CHECK(io::model_predict(back, d.row(i)) == io::model_predict(m, d.row(i)));
  }
  CHECK_THROWS_AS(train_model("nope", {}, d, 1), Error);
}

TEST_CASE("model params override defaults") {
  tabular::GeneratorSpec gen;
  gen.weights = {1.0};
  gen.noise_sd = 0.1;
  auto d = tabular::synth_dataset(50, 1, gen, 4);
  auto m = train_model("gbt", {{"rounds", 3}, {"learning_rate", 0.5}}, d, 1);
  auto& gbt = std::get<trees::BoostedModel>(m);
  CHECK(gbt.trees.size() == 3);
  CHECK(gbt.params.learning_rate == 0.5);

  auto f = train_model("rf", {{"n_trees", 4}}, d, 1);
  CHECK(std::get<trees::ForestModel>(f).trees.size() == 4);
}

TEST_CASE("resolve_background variants") {
  tabular::GeneratorSpec gen;
  gen.weights = {1.0, 1.0};
  auto d = tabular::synth_dataset(30, 2, gen, 5);
  auto full = resolve_background("full", d, 1);
  CHECK(full.k() == 30);
  auto mean = resolve_background("mean", d, 1);
  REQUIRE(mean.k() == 1);
  double m0 = 0.0;
  for (std::size_t i = 0; i < d.n(); ++i) m0 += d.at(i, 0);
  CHECK(mean.point(0)[0] == doctest::Approx(m0 / 30.0));
  auto km = resolve_background("kmeans:4", d, 1);
  CHECK(km.k() == 4);
  CHECK_THROWS_AS(resolve_background("kmeans:zero", d, 1), Error);
  CHECK_THROWS_AS(resolve_background("whatever", d, 1), Error);
}

TEST_CASE("explain_instances routes methods and rejects mismatches") {
  tabular::GeneratorSpec gen;
  gen.weights = {1.0, -1.0};
  gen.noise_sd = 0.1;
  auto d = tabular::synth_dataset(60, 2, gen, 6);
  auto bg = resolve_background("mean", d, 1);

  auto rf = train_model("rf", {{"n_trees", 5}}, d, 1);
  auto via_tree = explain_instances(rf, "tree", d, bg, 1, 3);
  auto via_auto = explain_instances(rf, "auto", d, bg, 1, 3);
  REQUIRE(via_tree.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(via_auto[i].phis[j] == via_tree[i].phis[j]);

  auto ols = train_model("ols", {}, d, 1);
  CHECK_THROWS_AS(explain_instances(ols, "tree", d, bg, 1, 1), Error);
  auto via_kernel = explain_instances(ols, "auto", d, bg, 1, 2);
  REQUIRE(via_kernel.size() == 2);
  // kernel on the linear model reproduces the closed form phi = w * (x - bg)
  auto& lm = std::get<eval::LinearModel>(ols);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(via_kernel[i].phis[j] ==
            doctest::Approx(lm.coefficients[j] * (d.at(i, j) - bg.point(0)[j]))
                .epsilon(1e-7));

  auto none = explain_instances(ols, "none", d, bg, 1, 0);
  CHECK(none.empty());

  // local accuracy for every supported pairing
  for (std::string kind : {"rf", "gbt", "svr", "mlp", "ols"}) {
    auto m = train_model(kind, {{"n_trees", 4}, {"rounds", 4}, {"epochs", 2}},
                         d, 1);
    auto atts = explain_instances(m, "auto", d, bg, 1, 2);
    for (std::size_t i = 0; i < atts.size(); ++i) {
      double sum = atts[i].base_value;
      for (double p : atts[i].phis) sum += p;
      CHECK(sum == doctest::Approx(io::model_predict(m, d.row(i))).epsilon(1e-6));
    }
  }
}

TEST_CASE("run_experiment produces the full artifact set") {
  TempDir dir("run");
  ExperimentConfig c;
  c.data_path = write_synth_csv(dir.path, 120, 11);
  c.model = "gbt";
  c.model_params["rounds"] = 10;
  c.out_dir = dir.str();
  c.run_name = "demo";
  c.seed = 7;
  c.max_explained = 5;
  auto art = run_experiment(c);
  CHECK(fs::exists(art.model_file));
  CHECK(fs::exists(art.metrics_file));
  CHECK(fs::exists(art.attribution_file));
  CHECK(fs::exists(art.ranking_file));
  CHECK(fs::exists(art.manifest_file));

  auto metrics = nlohmann::json::parse(slurp(art.metrics_file));
  CHECK(metrics.contains("r2"));
  CHECK(metrics.contains("mae"));
  CHECK(metrics.contains("mse"));
  CHECK(metrics.contains("rmse"));
  CHECK(metrics.contains("spearman_rho"));
  CHECK(metrics["n_train"].get<int>() == 96);
  CHECK(metrics["n_test"].get<int>() == 24);
  CHECK(metrics["r2"].get<double>() > 0.5);

  auto manifest = nlohmann::json::parse(slurp(art.manifest_file));
  CHECK(manifest.contains("config"));
  CHECK(manifest.contains("hashes"));
  CHECK(manifest["hashes"].contains("model.json"));

  auto [names, atts] = read_attributions_csv(art.attribution_file);
  CHECK(names.size() == 4);
  CHECK(atts.size() == 5);

  auto ranking = slurp(art.ranking_file);
  CHECK(ranking.rfind("rank,feature,mean_abs_phi", 0) == 0);
}

TEST_CASE("repeat runs with one seed are byte identical") {
  TempDir dir("repeat");
  ExperimentConfig c;
  c.data_path = write_synth_csv(dir.path, 80, 21);
  c.model = "rf";
  c.model_params["n_trees"] = 8;
  c.out_dir = dir.str();
  c.seed = 13;
  c.max_explained = 4;
  c.run_name = "a";
  auto a = run_experiment(c);
  c.run_name = "b";
  auto b = run_experiment(c);
  CHECK(slurp(a.model_file) == slurp(b.model_file));
  CHECK(slurp(a.metrics_file) == slurp(b.metrics_file));
  CHECK(slurp(a.attribution_file) == slurp(b.attribution_file));
  CHECK(slurp(a.ranking_file) == slurp(b.ranking_file));

  c.run_name = "c";
  c.seed = 14;
  auto cart = run_experiment(c);
  CHECK(slurp(a.metrics_file) != slurp(cart.metrics_file));
}

TEST_CASE("bad configs fail with typed errors") {
  TempDir dir("bad");
  ExperimentConfig c;
  c.data_path = write_synth_csv(dir.path, 40, 2);
  c.out_dir = dir.str();
  c.split = "fraction:1.5";
  CHECK_THROWS_AS(run_experiment(c), Error);
  c.split = "official";  // generic schema has no official split
  CHECK_THROWS_AS(run_experiment(c), Error);
  c.split = "fraction:0.8";
  c.model = "unknown";
  CHECK_THROWS_AS(run_experiment(c), Error);
  c.model = "rf";
  c.data_path = (dir.path / "missing.csv").string();
  CHECK_THROWS_AS(run_experiment(c), Error);
}

TEST_CASE("reports emit every kind in every format") {
  TempDir dir("report");
  ExperimentConfig c;
  c.data_path = write_synth_csv(dir.path, 100, 31, true);
  c.model = "gbt";
  c.model_params["rounds"] = 8;
  c.out_dir = dir.str();
  c.run_name = "rep";
  c.seed = 5;
  c.max_explained = 6;
  auto art = run_experiment(c);

  ReportInputs in;
  in.attributions_path = art.attribution_file;
  in.data_path = c.data_path;
  in.model_path = art.model_file;
  in.seed = 5;

  struct Case { const char* kind; ReportFormat fmt; const char* ext; };
  std::vector<Case> cases = {
      {"summary", ReportFormat::csv, "csv"},
      {"summary", ReportFormat::json, "json"},
      {"summary", ReportFormat::svg, "svg"},
      {"dependence:0:1", ReportFormat::csv, "csv"},
      {"dependence:0:1", ReportFormat::svg, "svg"},
      {"interactions", ReportFormat::json, "json"},
      {"correlations", ReportFormat::csv, "csv"},
      {"scatter:1", ReportFormat::csv, "csv"},
      {"scatter:1", ReportFormat::svg, "svg"},
      {"distribution", ReportFormat::json, "json"},
  };
  int idx = 0;
  for (auto& cs : cases) {
    auto out = (dir.path / ("r" + std::to_string(idx++) + "." + cs.ext)).string();
    emit_report(cs.kind, in, cs.fmt, out);
    auto body = slurp(out);
    CHECK(!body.empty());
    if (cs.fmt == ReportFormat::svg) CHECK(body.find("<svg") != std::string::npos);
    if (cs.fmt == ReportFormat::json)
      CHECK_NOTHROW(nlohmann::json::parse(body));
  }

  // the interaction matrix for a product dataset shows the built-in pairs
  auto inter = (dir.path / "inter.json").string();
  emit_report("interactions", in, ReportFormat::json, inter);
  auto j = nlohmann::json::parse(slurp(inter));
  REQUIRE(j.contains("matrix"));
  auto mat = j["matrix"].get<std::vector<std::vector<double>>>();
  REQUIRE(mat.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(mat[i][k] == doctest::Approx(mat[k][i]).epsilon(1e-9));

  CHECK_THROWS_AS(emit_report("nope", in, ReportFormat::csv,
                              (dir.path / "x.csv").string()),
                  Error);
}
