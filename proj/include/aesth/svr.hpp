#ifndef AESTH_SVR_HPP
#define AESTH_SVR_HPP

#include <cstdint>
#include <vector>

#include "aesth/common.hpp"
#include "aesth/dataset.hpp"

namespace aesth::svr {

struct KernelSpec {
  enum class Kind { rbf, linear };
  Kind kind = Kind::rbf;
  double gamma = -1.0;  // <= 0 means 'scale': resolve from the training data
  bool auto_scale() const { return kind == Kind::rbf && gamma <= 0.0; }
};

struct SvrParams {
  double C = 1.0;
  double epsilon = 0.01;
  double tol = 1e-3;
  long max_iter = -1;  // -1: no limit
};

struct SvrModel {
  std::vector<double> support_vectors;  // m*d row-major
  std::vector<double> dual_coefs;       // alpha - alpha*, length m
  double bias = 0.0;
  KernelSpec kernel;
  SvrParams params;
  std::size_t n_features = 0;

  std::size_t n_support() const { return dual_coefs.size(); }
  VecView sv(std::size_t i) const {
    return VecView(support_vectors.data() + i * n_features, n_features);
  }
};

double kernel_eval(const KernelSpec& spec, VecView a, VecView b);

// 'scale' gamma: 1 / (d * pooled variance of all feature matrix entries).
double resolve_gamma(const tabular::LabeledDataset& train);

SvrModel fit_svr(const tabular::LabeledDataset& train, KernelSpec kernel,
                 const SvrParams& params, std::uint64_t seed = 0);

double predict_svr(const SvrModel& m, VecView x);

struct LinearWeights {
  std::vector<double> weights;
  double bias = 0.0;
};
LinearWeights linear_weights(const SvrModel& m);

}  // namespace aesth::svr

#endif
