#include "aesth/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace aesth::io {

using nlohmann::json;

namespace {

json tree_to_json(const trees::Tree& t) {
  json nodes = json::array();
  for (const auto& nd : t.nodes)
    nodes.push_back({{"feature", nd.feature},
                     {"threshold", nd.threshold},
                     {"left", nd.left},
                     {"right", nd.right},
                     {"value", nd.value},
                     {"cover", nd.cover}});
  return json{{"nodes", nodes}};
}

trees::Tree tree_from_json(const json& j) {
  trees::Tree t;
  for (const auto& n : j.at("nodes")) {
    trees::Node nd;
    nd.feature = n.at("feature").get<int>();
    nd.threshold = n.at("threshold").get<double>();
    nd.left = n.at("left").get<int>();
    nd.right = n.at("right").get<int>();
    nd.value = n.at("value").get<double>();
    nd.cover = n.at("cover").get<double>();
    t.nodes.push_back(nd);
  }
  return t;
}

}  // namespace

const char* model_kind_name(const AnyModel& m) {
  struct Visitor {
    const char* operator()(const trees::ForestModel&) { return "rf"; }
    const char* operator()(const trees::BoostedModel&) { return "gbt"; }
    const char* operator()(const svr::SvrModel& s) {
      return s.kernel.kind == svr::KernelSpec::Kind::linear ? "svr-linear"
                                                            : "svr";
    }
    const char* operator()(const mlp::MlpModel&) { return "mlp"; }
    const char* operator()(const eval::LinearModel&) { return "ols"; }
  };
  return std::visit(Visitor{}, m);
}

std::size_t model_n_features(const AnyModel& m) {
  struct Visitor {
    std::size_t operator()(const trees::ForestModel& x) { return x.n_features; }
    std::size_t operator()(const trees::BoostedModel& x) { return x.n_features; }
    std::size_t operator()(const svr::SvrModel& x) { return x.n_features; }
    std::size_t operator()(const mlp::MlpModel& x) { return x.input_dim(); }
    std::size_t operator()(const eval::LinearModel& x) {
      return x.coefficients.size();
    }
  };
  return std::visit(Visitor{}, m);
}

double model_predict(const AnyModel& m, VecView x) {
  struct Visitor {
    VecView x;
    double operator()(const trees::ForestModel& f) {
      return trees::predict_forest(f, x);
    }
    double operator()(const trees::BoostedModel& b) {
      return trees::predict_gbt(b, x);
    }
    double operator()(const svr::SvrModel& s) { return svr::predict_svr(s, x); }
    double operator()(const mlp::MlpModel& n) { return mlp::forward(n, x); }
    double operator()(const eval::LinearModel& l) { return l.predict(x); }
  };
  return std::visit(Visitor{x}, m);
}

std::string model_to_json(const AnyModel& m) {
  json j;
  j["model_kind"] = model_kind_name(m);
  if (const auto* f = std::get_if<trees::ForestModel>(&m)) {
    j["seed"] = f->seed;
    j["n_features"] = f->n_features;
    j["params"] = {{"n_trees", f->params.n_trees},
                   {"max_depth", f->params.tree.max_depth},
                   {"min_samples_split", f->params.tree.min_samples_split},
                   {"min_samples_leaf", f->params.tree.min_samples_leaf},
                   {"max_features", f->params.tree.max_features}};
    json ts = json::array();
    for (const auto& t : f->trees) ts.push_back(tree_to_json(t));
    j["trees"] = ts;
  } else if (const auto* b = std::get_if<trees::BoostedModel>(&m)) {
    j["seed"] = b->seed;
    j["n_features"] = b->n_features;
    j["base_score"] = b->base_score;
    j["params"] = {{"rounds", b->params.rounds},
                   {"max_depth", b->params.max_depth},
                   {"learning_rate", b->params.learning_rate},
                   {"lambda_l2", b->params.lambda_l2},
                   {"alpha_l1", b->params.alpha_l1},
                   {"subsample", b->params.subsample}};
    json ts = json::array();
    for (const auto& t : b->trees) ts.push_back(tree_to_json(t));
    j["trees"] = ts;
    j["train_rmse"] = b->train_rmse;
  } else if (const auto* s = std::get_if<svr::SvrModel>(&m)) {
    j["n_features"] = s->n_features;
    j["kernel"] = {
        {"kind", s->kernel.kind == svr::KernelSpec::Kind::rbf ? "rbf"
                                                              : "linear"},
        {"gamma", s->kernel.gamma}};
    j["params"] = {{"C", s->params.C},
                   {"epsilon", s->params.epsilon},
                   {"tol", s->params.tol},
                   {"max_iter", s->params.max_iter}};
    j["support_vectors"] = s->support_vectors;
    j["dual_coefs"] = s->dual_coefs;
    j["bias"] = s->bias;
  } else if (const auto* n = std::get_if<mlp::MlpModel>(&m)) {
    j["dims"] = {{"input", n->input_dim()}, {"hidden", n->hidden_dim()}};
    j["config"] = {{"l2", n->l2}};
    std::vector<double> w1(n->W1.data(), n->W1.data() + n->W1.size());
    std::vector<double> b1(n->b1.data(), n->b1.data() + n->b1.size());
    std::vector<double> w2(n->w2.data(), n->w2.data() + n->w2.size());
    j["W1"] = w1;
    j["b1"] = b1;
    j["w2"] = w2;
    j["b2"] = n->b2;
  } else if (const auto* l = std::get_if<eval::LinearModel>(&m)) {
    j["intercept"] = l->intercept;
    j["coefficients"] = l->coefficients;
  }
  return j.dump(2);
}

AnyModel model_from_json(const std::string& text) {
  json j = json::parse(text);
  const std::string kind = j.at("model_kind").get<std::string>();
  if (kind == "rf") {
    trees::ForestModel f;
    f.seed = j.at("seed").get<std::uint64_t>();
    f.n_features = j.at("n_features").get<std::size_t>();
    const auto& p = j.at("params");
    f.params.n_trees = p.at("n_trees").get<std::size_t>();
    f.params.tree.max_depth = p.at("max_depth").get<int>();
    f.params.tree.min_samples_split =
        p.at("min_samples_split").get<std::size_t>();
    f.params.tree.min_samples_leaf =
        p.at("min_samples_leaf").get<std::size_t>();
    f.params.tree.max_features = p.at("max_features").get<int>();
    for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    return f;
  }
  if (kind == "gbt") {
    trees::BoostedModel b;
    b.seed = j.at("seed").get<std::uint64_t>();
    b.n_features = j.at("n_features").get<std::size_t>();
    b.base_score = j.at("base_score").get<double>();
    const auto& p = j.at("params");
    b.params.rounds = p.at("rounds").get<std::size_t>();
    b.params.max_depth = p.at("max_depth").get<int>();
    b.params.learning_rate = p.at("learning_rate").get<double>();
    b.params.lambda_l2 = p.at("lambda_l2").get<double>();
    b.params.alpha_l1 = p.at("alpha_l1").get<double>();
    b.params.subsample = p.at("subsample").get<double>();
    for (const auto& t : j.at("trees")) b.trees.push_back(tree_from_json(t));
    if (j.contains("train_rmse"))
      b.train_rmse = j.at("train_rmse").get<std::vector<double>>();
    return b;
  }
  if (kind == "svr" || kind == "svr-linear") {
    svr::SvrModel s;
    s.n_features = j.at("n_features").get<std::size_t>();
    s.kernel.kind = j.at("kernel").at("kind").get<std::string>() == "rbf"
                        ? svr::KernelSpec::Kind::rbf
                        : svr::KernelSpec::Kind::linear;
    s.kernel.gamma = j.at("kernel").at("gamma").get<double>();
    const auto& p = j.at("params");
    s.params.C = p.at("C").get<double>();
    s.params.epsilon = p.at("epsilon").get<double>();
    s.params.tol = p.at("tol").get<double>();
    s.params.max_iter = p.at("max_iter").get<long>();
    s.support_vectors = j.at("support_vectors").get<std::vector<double>>();
    s.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
    s.bias = j.at("bias").get<double>();
    return s;
  }
  if (kind == "mlp") {
    mlp::MlpModel n;
    const std::size_t in = j.at("dims").at("input").get<std::size_t>();
    const std::size_t hid = j.at("dims").at("hidden").get<std::size_t>();
    n.l2 = j.at("config").at("l2").get<double>();
    auto w1 = j.at("W1").get<std::vector<double>>();
    auto b1 = j.at("b1").get<std::vector<double>>();
    auto w2 = j.at("w2").get<std::vector<double>>();
    n.W1 = Eigen::Map<Eigen::MatrixXd>(w1.data(), long(hid), long(in));
    n.b1 = Eigen::Map<Eigen::VectorXd>(b1.data(), long(hid));
    n.w2 = Eigen::Map<Eigen::VectorXd>(w2.data(), long(hid));
    n.b2 = j.at("b2").get<double>();
    return n;
  }
  if (kind == "ols") {
    eval::LinearModel l;
    l.intercept = j.at("intercept").get<double>();
    l.coefficients = j.at("coefficients").get<std::vector<double>>();
    return l;
  }
  throw Error(ErrorCode::unknown_kind, "unknown model_kind: " + kind);
}

void save_model(const AnyModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << model_to_json(m) << '\n';
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace aesth::io
