#include "aesth/mlp.hpp"

#include <cmath>
#include <numeric>

#include "aesth/rng.hpp"

namespace aesth::mlp {

MlpModel init_mlp(std::size_t d, std::uint64_t seed, std::size_t hidden,
                  double l2) {
  if (d < 1) throw Error(ErrorCode::bad_config, "need d >= 1");
  MlpModel m;
  m.l2 = l2;
  m.W1.resize(long(hidden), long(d));
  m.b1 = Eigen::VectorXd::Zero(long(hidden));
  m.w2.resize(long(hidden));
  m.b2 = 0.0;
  Rng rng(seed);
  // Glorot normal: sd = sqrt(2 / (fan_in + fan_out)) per layer.
  const double sd1 = std::sqrt(2.0 / double(d + hidden));
  for (long i = 0; i < m.W1.rows(); ++i)
    for (long j = 0; j < m.W1.cols(); ++j) m.W1(i, j) = normal(rng, 0.0, sd1);
  const double sd2 = std::sqrt(2.0 / double(hidden + 1));
  for (long i = 0; i < m.w2.size(); ++i) m.w2(i) = normal(rng, 0.0, sd2);
  return m;
}

double forward(const MlpModel& m, VecView x) {
  if (x.size() != m.input_dim())
    throw Error(ErrorCode::dimension_mismatch, "wrong feature count");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), long(x.size()));
  Eigen::VectorXd h = (m.W1 * xv + m.b1).cwiseMax(0.0);
  return m.b2 + m.w2.dot(h);
}

Gradients compute_gradients(const MlpModel& m,
                            const tabular::LabeledDataset& batch,
                            const std::vector<std::size_t>* rows) {
  std::size_t count = rows ? rows->size() : batch.n();
  if (count == 0) throw Error(ErrorCode::empty_batch, "empty batch");
  Gradients g;
  g.W1 = Eigen::MatrixXd::Zero(m.W1.rows(), m.W1.cols());
  g.b1 = Eigen::VectorXd::Zero(m.b1.size());
  g.w2 = Eigen::VectorXd::Zero(m.w2.size());
  g.b2 = 0.0;

  for (std::size_t r = 0; r < count; ++r) {
    std::size_t i = rows ? (*rows)[r] : r;
    auto x = batch.row(i);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), long(x.size()));
    Eigen::VectorXd pre = m.W1 * xv + m.b1;
    Eigen::VectorXd h = pre.cwiseMax(0.0);
    double out = m.b2 + m.w2.dot(h);
    double dloss = 2.0 * (out - batch.targets[i]) / double(count);
    g.b2 += dloss;
    g.w2 += dloss * h;
    Eigen::VectorXd dh = dloss * m.w2;
    for (long k = 0; k < pre.size(); ++k)
      if (pre(k) <= 0.0) dh(k) = 0.0;
    g.b1 += dh;
    g.W1 += dh * xv.transpose();
  }
  g.W1 += 2.0 * m.l2 * m.W1;
  g.w2 += 2.0 * m.l2 * m.w2;
  return g;
}

double batch_loss(const MlpModel& m, const tabular::LabeledDataset& batch) {
  double sse = 0.0;
  for (std::size_t i = 0; i < batch.n(); ++i) {
    double e = forward(m, batch.row(i)) - batch.targets[i];
    sse += e * e;
  }
  return sse / double(batch.n()) +
         m.l2 * (m.W1.squaredNorm() + m.w2.squaredNorm());
}

AdamState init_adam(const MlpModel& m, const AdamParams& params) {
  AdamState s;
  s.params = params;
  s.m1.W1 = Eigen::MatrixXd::Zero(m.W1.rows(), m.W1.cols());
  s.m1.b1 = Eigen::VectorXd::Zero(m.b1.size());
  s.m1.w2 = Eigen::VectorXd::Zero(m.w2.size());
  s.m1.b2 = 0.0;
  s.m2 = s.m1;
  return s;
}

namespace {

inline void adam_update(double& param, double& m1, double& m2, double grad,
                        const AdamParams& p, double bc1, double bc2) {
  m1 = p.beta1 * m1 + (1.0 - p.beta1) * grad;
  m2 = p.beta2 * m2 + (1.0 - p.beta2) * grad * grad;
  param -= p.lr * (m1 / bc1) / (std::sqrt(m2 / bc2) + p.eps);
}

}  // namespace

void adam_step(AdamState& state, MlpModel& m, const Gradients& grads) {
  if (grads.W1.rows() != m.W1.rows() || grads.W1.cols() != m.W1.cols() ||
      grads.b1.size() != m.b1.size() || grads.w2.size() != m.w2.size())
    throw Error(ErrorCode::shape_mismatch, "gradient shapes do not match");
  state.step += 1;
  const AdamParams& p = state.params;
  const double bc1 = 1.0 - std::pow(p.beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(p.beta2, double(state.step));
  for (long i = 0; i < m.W1.size(); ++i)
    adam_update(m.W1.data()[i], state.m1.W1.data()[i], state.m2.W1.data()[i],
                grads.W1.data()[i], p, bc1, bc2);
  for (long i = 0; i < m.b1.size(); ++i)
    adam_update(m.b1(i), state.m1.b1(i), state.m2.b1(i), grads.b1(i), p, bc1,
                bc2);
  for (long i = 0; i < m.w2.size(); ++i)
    adam_update(m.w2(i), state.m1.w2(i), state.m2.w2(i), grads.w2(i), p, bc1,
                bc2);
  adam_update(m.b2, state.m1.b2, state.m2.b2, grads.b2, p, bc1, bc2);
}

MlpModel fit_mlp(const tabular::LabeledDataset& train,
                 const TrainConfig& config) {
  if (train.n() == 0)
    throw Error(ErrorCode::empty_train_set, "fit_mlp on empty dataset");
  MlpModel m = init_mlp(train.d(), derive_seed(config.seed, 0), config.hidden,
                        config.l2);
  AdamState state = init_adam(m, config.adam);

  std::vector<std::size_t> order(train.n());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(config.seed, 1 + epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t start = 0; start < order.size();
         start += config.batch) {
      std::size_t stop = std::min(start + config.batch, order.size());
      std::vector<std::size_t> rows(order.begin() + start,
                                    order.begin() + stop);
      Gradients g = compute_gradients(m, train, &rows);
      adam_step(state, m, g);
    }
  }
  return m;
}

}  // namespace aesth::mlp
