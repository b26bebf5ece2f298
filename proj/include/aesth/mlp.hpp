#ifndef AESTH_MLP_HPP
#define AESTH_MLP_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "aesth/common.hpp"
#include "aesth/dataset.hpp"

namespace aesth::mlp {

// One hidden rectifier layer (width 32 by default), identity output.
struct MlpModel {
  Eigen::MatrixXd W1;  // hidden x d
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;
  double l2 = 1e-2;    // weight penalty, biases excluded

  std::size_t input_dim() const { return std::size_t(W1.cols()); }
  std::size_t hidden_dim() const { return std::size_t(W1.rows()); }
};

struct Gradients {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
};

struct AdamParams {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Gradients m1, m2;  // first/second moment accumulators, parameter-shaped
  long step = 0;
  AdamParams params;
};

struct TrainConfig {
  std::size_t hidden = 32;
  std::size_t epochs = 10;
  std::size_t batch = 64;
  AdamParams adam;
  double l2 = 1e-2;
  std::uint64_t seed = 0;
};

MlpModel init_mlp(std::size_t d, std::uint64_t seed, std::size_t hidden = 32,
                  double l2 = 1e-2);

double forward(const MlpModel& m, VecView x);
inline double predict_mlp(const MlpModel& m, VecView x) { return forward(m, x); }

// Gradients of batch MSE + l2 * (||W1||^2 + ||w2||^2).
Gradients compute_gradients(const MlpModel& m,
                            const tabular::LabeledDataset& batch,
                            const std::vector<std::size_t>* rows = nullptr);

double batch_loss(const MlpModel& m, const tabular::LabeledDataset& batch);

AdamState init_adam(const MlpModel& m, const AdamParams& params);
void adam_step(AdamState& state, MlpModel& m, const Gradients& grads);

MlpModel fit_mlp(const tabular::LabeledDataset& train,
                 const TrainConfig& config);

}  // namespace aesth::mlp

#endif
