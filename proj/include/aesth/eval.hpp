#ifndef AESTH_EVAL_HPP
#define AESTH_EVAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "aesth/common.hpp"
#include "aesth/dataset.hpp"

namespace aesth::eval {

struct MetricsReport {
  double r2 = 0.0;
  double mae = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double spearman_rho = 0.0;
  std::optional<double> spearman_p;
};

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;

  double predict(VecView x) const {
    double y = intercept;
    for (std::size_t j = 0; j < coefficients.size(); ++j)
      y += coefficients[j] * x[j];
    return y;
  }
};

struct CorrelationReport {
  std::vector<std::string> feature_names;
  std::vector<double> rho;
  std::vector<bool> defined;  // false where the column is constant
};

MetricsReport compute_metrics(VecView y_true, VecView y_pred);

// Pearson correlation of average-tie ranks; p from the t approximation,
// omitted when |rho| = 1 or n <= 2.
std::pair<double, std::optional<double>> spearman(VecView y_true,
                                                  VecView y_pred);

LinearModel fit_ols(const tabular::LabeledDataset& train);

CorrelationReport attribute_correlations(const tabular::LabeledDataset& d);

std::vector<std::pair<double, double>> scatter_series(
    const tabular::LabeledDataset& d, std::size_t feature);

}  // namespace aesth::eval

#endif
