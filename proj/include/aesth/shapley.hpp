#ifndef AESTH_SHAPLEY_HPP
#define AESTH_SHAPLEY_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "aesth/common.hpp"
#include "aesth/dataset.hpp"
#include "aesth/trees.hpp"

namespace aesth::shapley {

// Opaque prediction function plus its input dimensionality. Must be pure.
struct PredictOracle {
  std::function<double(VecView)> f;
  std::size_t d = 0;
};

struct BackgroundSet {
  std::vector<double> points;   // k*d row-major
  std::vector<double> weights;  // nonnegative, sum > 0
  std::size_t d = 0;

  std::size_t k() const { return weights.size(); }
  VecView point(std::size_t i) const {
    return VecView(points.data() + i * d, d);
  }
};

BackgroundSet single_point_background(VecView point);
BackgroundSet full_background(const tabular::LabeledDataset& d);

struct Attribution {
  double base_value = 0.0;
  std::vector<double> phis;
};

struct InteractionMatrix {
  std::size_t d = 0;
  std::vector<double> values;  // d*d row-major, symmetric
  double at(std::size_t i, std::size_t j) const { return values[i * d + j]; }
};

struct DependencePoint {
  double feature_value = 0.0;
  double shap_value = 0.0;
  double color_value = 0.0;
};

struct KmeansResult {
  BackgroundSet background;
  std::vector<double> objective_trace;  // within-cluster SSE per iteration
  std::vector<std::size_t> assignment;
};

KmeansResult kmeans_summarize(const std::vector<double>& points,
                              std::size_t n, std::size_t d, std::size_t k,
                              std::uint64_t seed, std::size_t max_iter = 100);
KmeansResult kmeans_summarize(const tabular::LabeledDataset& data,
                              std::size_t k, std::uint64_t seed,
                              std::size_t max_iter = 100);

// Interventional coalition value: weighted mean over background points of
// f(z) with z taking x on S and the background elsewhere. S is a bitmask.
double value_function(const PredictOracle& oracle, VecView x,
                      std::uint64_t subset, const BackgroundSet& background);

// All 2^d coalition values, indexed by bitmask. Shared by the exact,
// kernel-enumerated, and interaction computations.
std::vector<double> value_table(const PredictOracle& oracle, VecView x,
                                const BackgroundSet& background);

Attribution exact_shapley(const PredictOracle& oracle, VecView x,
                          const BackgroundSet& background);

struct KernelSampling {
  bool enumerate_all = true;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

Attribution kernel_shap(const PredictOracle& oracle, VecView x,
                        const BackgroundSet& background,
                        const KernelSampling& sampling);

Attribution tree_shap(const trees::Tree& tree, VecView x, std::size_t d);
Attribution tree_shap(const trees::ForestModel& m, VecView x);
Attribution tree_shap(const trees::BoostedModel& m, VecView x);

double interaction_index(const PredictOracle& oracle, VecView x,
                         const BackgroundSet& background, std::size_t i,
                         std::size_t j);
InteractionMatrix full_interaction_matrix(const PredictOracle& oracle,
                                          VecView x,
                                          const BackgroundSet& background);

struct RankedFeature {
  std::size_t feature = 0;
  double mean_abs_phi = 0.0;
};
std::vector<RankedFeature> summary_ranking(
    const std::vector<Attribution>& attributions);

std::vector<DependencePoint> dependence_series(
    const std::vector<Attribution>& attributions,
    const tabular::LabeledDataset& x_test, std::size_t feature,
    std::size_t color_feature);

}  // namespace aesth::shapley

#endif
