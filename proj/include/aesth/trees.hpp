#ifndef AESTH_TREES_HPP
#define AESTH_TREES_HPP

#include <cstdint>
#include <vector>

#include "aesth/common.hpp"
#include "aesth/dataset.hpp"

namespace aesth::trees {

// One regression tree stored as a flat node array; index 0 is the root.
// Leaves have feature == -1. Covers count the training rows routed through
// each node and drive the path-dependent expectations in the shapley module.
struct Node {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf prediction
  double cover = 0.0;
};

struct Tree {
  std::vector<Node> nodes;
  bool leaf(int i) const { return nodes[i].feature < 0; }
};

struct TreeParams {
  int max_depth = -1;            // -1: unbounded
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  int max_features = -1;         // -1: all features; forest uses ceil(sqrt(d))
};

struct ForestParams {
  std::size_t n_trees = 150;
  TreeParams tree;  // max_features < 0 resolves to ceil(sqrt(d))
};

struct BoostParams {
  std::size_t rounds = 150;
  int max_depth = 3;
  double learning_rate = 0.1;
  double lambda_l2 = 1.0;
  double alpha_l1 = 0.0;
  double subsample = 1.0;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
};

struct BoostedModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  BoostParams params;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::vector<double> train_rmse;  // per-round training RMSE
};

Tree fit_tree(const tabular::LabeledDataset& train, const TreeParams& params,
              std::uint64_t seed = 0,
              const std::vector<double>* targets_override = nullptr,
              const std::vector<std::size_t>* row_indices = nullptr);

double predict_tree(const Tree& t, VecView x);

ForestModel fit_random_forest(const tabular::LabeledDataset& train,
                              const ForestParams& params, std::uint64_t seed);
double predict_forest(const ForestModel& m, VecView x);

BoostedModel fit_gbt(const tabular::LabeledDataset& train,
                     const BoostParams& params, std::uint64_t seed);
double predict_gbt(const BoostedModel& m, VecView x);

int resolved_max_features(int max_features, std::size_t d);

}  // namespace aesth::trees

#endif
