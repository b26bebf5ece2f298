#include <doctest.h>

#include <cmath>

#include "aesth/mlp.hpp"
#include "aesth/rng.hpp"

using namespace aesth;
using namespace aesth::mlp;
using tabular::GeneratorSpec;
using tabular::LabeledDataset;
using tabular::synth_dataset;

namespace {

// Central finite differences over every parameter; the independent oracle for
// compute_gradients.
double rel_err(double a, double b) {
  double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

void check_gradients(MlpModel m, const LabeledDataset& batch) {
  const double h = 1e-5;
  auto g = compute_gradients(m, batch);
  auto probe = [&](double& param, double analytic) {
    double keep = param;
    param = keep + h;
    double up = batch_loss(m, batch);
    param = keep - h;
    double down = batch_loss(m, batch);
    param = keep;
    CHECK(rel_err(analytic, (up - down) / (2.0 * h)) < 1e-4);
  };
  for (Eigen::Index r = 0; r < m.W1.rows(); ++r)
    for (Eigen::Index c = 0; c < m.W1.cols(); ++c)
      probe(m.W1(r, c), g.W1(r, c));
  for (Eigen::Index r = 0; r < m.b1.size(); ++r) probe(m.b1(r), g.b1(r));
  for (Eigen::Index r = 0; r < m.w2.size(); ++r) probe(m.w2(r), g.w2(r));
  probe(m.b2, g.b2);
}

}  // namespace

TEST_CASE("init uses glorot-scaled weights and zero biases") {
  auto m = init_mlp(8, 3, 32);
  CHECK(m.W1.rows() == 32);
  CHECK(m.W1.cols() == 8);
  CHECK(m.b1.isZero());
  CHECK(m.b2 == 0.0);
  // empirical sd of W1 should sit near sqrt(2/(8+32)) ~ 0.2236
  double ss = m.W1.array().square().sum() / double(m.W1.size());
  CHECK(std::sqrt(ss) == doctest::Approx(std::sqrt(2.0 / 40.0)).epsilon(0.2));
  double sw2 = m.w2.array().square().sum() / double(m.w2.size());
  CHECK(std::sqrt(sw2) == doctest::Approx(std::sqrt(2.0 / 33.0)).epsilon(0.35));

  auto m2 = init_mlp(8, 3, 32);
  CHECK(m.W1 == m2.W1);
  auto m3 = init_mlp(8, 4, 32);
  CHECK(m.W1 != m3.W1);
}

TEST_CASE("forward pass matches a hand computation") {
  MlpModel m;
  m.W1 = Eigen::MatrixXd(2, 2);
  m.W1 << 1.0, -1.0, 0.5, 0.5;
  m.b1 = Eigen::VectorXd(2);
  m.b1 << 0.0, -1.0;
  m.w2 = Eigen::VectorXd(2);
  m.w2 << 2.0, 3.0;
  m.b2 = 0.25;
  double x[] = {1.0, 2.0};
  // pre = (1-2, 0.5+1-1) = (-1, 0.5); relu = (0, 0.5); out = 0.25 + 3*0.5
  CHECK(forward(m, VecView(x, 2)) == doctest::Approx(1.75));
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    std::size_t d = 2 + std::size_t(uniform_index(rng, 3));
    auto model = init_mlp(d, 100 + std::uint64_t(trial), 4, 1e-2);
    // nudge biases off zero so relu kinks are not at the probe points
    for (Eigen::Index i = 0; i < model.b1.size(); ++i)
      model.b1(i) = 0.1 * normal(rng);
    model.b2 = 0.05;
    GeneratorSpec gen;
    gen.weights.assign(d, 0.7);
    gen.noise_sd = 0.2;
    auto batch = synth_dataset(12, d, gen, 500 + std::uint64_t(trial));
    check_gradients(model, batch);
  }
}

TEST_CASE("l2 penalty touches weights but not biases") {
  auto model = init_mlp(3, 1, 4, 0.0);
  GeneratorSpec gen;
  gen.weights = {1.0, 1.0, 1.0};
  auto batch = synth_dataset(8, 3, gen, 2);
  auto g0 = compute_gradients(model, batch);
  model.l2 = 0.5;
  auto g1 = compute_gradients(model, batch);
  // d/dW of l2*||W||^2 is 2*l2*W
  Eigen::MatrixXd diff = g1.W1 - g0.W1;
  CHECK((diff - 2.0 * 0.5 * model.W1).norm() < 1e-12);
  CHECK((g1.b1 - g0.b1).norm() < 1e-12);
  CHECK(g1.b2 == g0.b2);
}

TEST_CASE("adam first step moves by about lr in the gradient direction") {
  auto model = init_mlp(2, 7, 3, 0.0);
  AdamParams ap;
  auto st = init_adam(model, ap);
  Gradients g;
  g.W1 = Eigen::MatrixXd::Constant(3, 2, 2.0);
  g.b1 = Eigen::VectorXd::Constant(3, -1.0);
  g.w2 = Eigen::VectorXd::Constant(3, 0.5);
  g.b2 = 4.0;
  MlpModel before = model;
  adam_step(st, model, g);
  // bias-corrected first step: delta = lr * g/(|g| + eps') ~ lr * sign(g)
  CHECK(model.b2 == doctest::Approx(before.b2 - 0.001).epsilon(1e-4));
  CHECK(model.b1(0) == doctest::Approx(before.b1(0) + 0.001).epsilon(1e-4));
  CHECK(model.W1(0, 0) ==
        doctest::Approx(before.W1(0, 0) - 0.001).epsilon(1e-4));
  CHECK(st.step == 1);
}

TEST_CASE("training reduces the loss and is seed-deterministic") {
  GeneratorSpec gen;
  gen.weights = {1.0, -1.5};
  gen.intercept = 0.5;
  gen.noise_sd = 0.05;
  auto d = synth_dataset(256, 2, gen, 33);
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 40;
  cfg.l2 = 1e-4;
  cfg.seed = 9;
  auto init = init_mlp(2, derive_seed(9, 0), 16, 1e-4);
  double loss0 = batch_loss(init, d);
  auto m = fit_mlp(d, cfg);
  CHECK(batch_loss(m, d) < loss0);

  auto m2 = fit_mlp(d, cfg);
  CHECK(m.W1 == m2.W1);
  CHECK(m.b2 == m2.b2);
}

TEST_CASE("defaults follow the published training recipe") {
  TrainConfig cfg;
  CHECK(cfg.hidden == 32);
  CHECK(cfg.epochs == 10);
  CHECK(cfg.batch == 64);
  CHECK(cfg.adam.lr == 0.001);
  CHECK(cfg.adam.beta1 == 0.9);
  CHECK(cfg.adam.beta2 == 0.999);
  CHECK(cfg.adam.eps == 1e-8);
  CHECK(cfg.l2 == 1e-2);
}
