#include "aesth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

namespace aesth::eval {

namespace {

std::vector<double> average_ranks(VecView v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = 0.5 * double(i + j) + 1.0;  // 1-based average rank
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / double(n);
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / double(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da <= 0.0 || db <= 0.0)
    throw Error(ErrorCode::constant_input, "correlation of a constant input");
  return num / std::sqrt(da * db);
}

}  // namespace

std::pair<double, std::optional<double>> spearman(VecView y_true,
                                                  VecView y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error(ErrorCode::length_mismatch, "spearman length mismatch");
  if (y_true.size() < 2)
    throw Error(ErrorCode::length_mismatch, "spearman needs length >= 2");
  double rho = pearson(average_ranks(y_true), average_ranks(y_pred));
  rho = std::clamp(rho, -1.0, 1.0);
  std::optional<double> p;
  const std::size_t n = y_true.size();
  if (n > 2 && std::abs(rho) < 1.0) {
    double t = rho * std::sqrt(double(n - 2) / (1.0 - rho * rho));
    boost::math::students_t dist(double(n - 2));
    p = 2.0 * boost::math::cdf(dist, -std::abs(t));
  }
  return {rho, p};
}

MetricsReport compute_metrics(VecView y_true, VecView y_pred) {
  if (y_true.size() != y_pred.size())
    throw Error(ErrorCode::length_mismatch, "metric length mismatch");
  const std::size_t n = y_true.size();
  if (n == 0) throw Error(ErrorCode::empty_input, "no predictions to score");

  double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / double(n);
  double sst = 0.0, sse = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y_true[i] - y_pred[i];
    sse += e * e;
    abs_sum += std::abs(e);
    sst += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (sst <= 0.0)
    throw Error(ErrorCode::zero_variance_target,
                "R^2 undefined for constant targets");

  MetricsReport rep;
  rep.mse = sse / double(n);
  rep.rmse = std::sqrt(rep.mse);
  rep.mae = abs_sum / double(n);
  rep.r2 = 1.0 - sse / sst;
  auto [rho, p] = spearman(y_true, y_pred);
  rep.spearman_rho = rho;
  rep.spearman_p = p;
  return rep;
}

LinearModel fit_ols(const tabular::LabeledDataset& train) {
  const std::size_t n = train.n(), d = train.d();
  if (n <= d)
    throw Error(ErrorCode::rank_deficient, "OLS needs n > d");
  Eigen::MatrixXd X(long(n), long(d) + 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(long(n));
  for (std::size_t i = 0; i < n; ++i) {
    X(long(i), 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) X(long(i), long(j) + 1) = train.at(i, j);
    y(long(i)) = train.targets[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < long(d) + 1)
    throw Error(ErrorCode::rank_deficient, "design matrix is rank deficient");
  Eigen::VectorXd beta = qr.solve(y);
  LinearModel m;
  m.intercept = beta(0);
  m.coefficients.assign(beta.data() + 1, beta.data() + 1 + d);
  return m;
}

CorrelationReport attribute_correlations(const tabular::LabeledDataset& d) {
  if (d.n() < 2)
    throw Error(ErrorCode::empty_input, "need n >= 2 for correlations");
  CorrelationReport rep;
  rep.feature_names = d.feature_names;
  for (std::size_t j = 0; j < d.d(); ++j) {
    std::vector<double> col(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) col[i] = d.at(i, j);
    try {
      auto [rho, p] = spearman(col, d.targets);
      rep.rho.push_back(rho);
      rep.defined.push_back(true);
    } catch (const Error&) {
      rep.rho.push_back(0.0);
      rep.defined.push_back(false);
    }
  }
  return rep;
}

std::vector<std::pair<double, double>> scatter_series(
    const tabular::LabeledDataset& d, std::size_t feature) {
  if (feature >= d.d())
    throw Error(ErrorCode::index_out_of_range, "scatter feature out of range");
  std::vector<std::pair<double, double>> out;
  out.reserve(d.n());
  for (std::size_t i = 0; i < d.n(); ++i)
    out.emplace_back(d.at(i, feature), d.targets[i]);
  return out;
}

}  // namespace aesth::eval
