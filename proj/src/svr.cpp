#include "aesth/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace aesth::svr {

double kernel_eval(const KernelSpec& spec, VecView a, VecView b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::dimension_mismatch, "kernel on unequal dimensions");
  if (spec.kind == KernelSpec::Kind::linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return std::exp(-spec.gamma * sq);
}

double resolve_gamma(const tabular::LabeledDataset& train) {
  if (train.n() < 2)
    throw Error(ErrorCode::empty_train_set, "need n >= 2 to resolve gamma");
  double mean = 0.0;
  for (double v : train.values) mean += v;
  mean /= double(train.values.size());
  double var = 0.0;
  for (double v : train.values) var += (v - mean) * (v - mean);
  var /= double(train.values.size());
  if (var <= 0.0)
    throw Error(ErrorCode::zero_variance,
                "feature matrix has zero pooled variance");
  return 1.0 / (double(train.d()) * var);
}

namespace {

// Two-variable working-set solver on the 2n-variable dual (alpha, alpha*
// stacked, signs +1/-1), max-violating-pair selection. Index ties break low.
class SmoSolver {
 public:
  SmoSolver(const tabular::LabeledDataset& train, const KernelSpec& kernel,
            const SvrParams& params)
      : data_(train), kernel_(kernel), params_(params), n_(train.n()) {
    if (n_ <= 8192) {
      gram_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          double k = kernel_eval(kernel_, data_.row(i), data_.row(j));
          gram_[i * n_ + j] = k;
          gram_[j * n_ + i] = k;
        }
    }
  }

  double k(std::size_t i, std::size_t j) const {
    if (!gram_.empty()) return gram_[i * n_ + j];
    return kernel_eval(kernel_, data_.row(i), data_.row(j));
  }

  // Returns (beta, bias).
  std::pair<std::vector<double>, double> solve() {
    const std::size_t N = 2 * n_;
    std::vector<double> a(N, 0.0), grad(N);
    for (std::size_t i = 0; i < n_; ++i) {
      grad[i] = params_.epsilon - data_.targets[i];
      grad[i + n_] = params_.epsilon + data_.targets[i];
    }
    auto sign = [this](std::size_t t) { return t < n_ ? 1.0 : -1.0; };
    auto base = [this](std::size_t t) { return t < n_ ? t : t - n_; };

    const double C = params_.C;
    long iter = 0;
    double m_val = 0.0, M_val = 0.0;
    for (;;) {
      // Max-violating pair: i maximizes -y_t*grad_t over variables free to
      // grow, j minimizes it over variables free to shrink.
      std::size_t best_i = N, best_j = N;
      m_val = -std::numeric_limits<double>::infinity();
      M_val = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < N; ++t) {
        double v = -sign(t) * grad[t];
        bool up = sign(t) > 0 ? a[t] < C : a[t] > 0.0;
        bool low = sign(t) > 0 ? a[t] > 0.0 : a[t] < C;
        if (up && v > m_val) {
          m_val = v;
          best_i = t;
        }
        if (low && v < M_val) {
          M_val = v;
          best_j = t;
        }
      }
      if (best_i == N || best_j == N || m_val - M_val < params_.tol) break;
      if (params_.max_iter >= 0 && iter >= params_.max_iter)
        throw Error(ErrorCode::non_convergence,
                    "SMO hit max_iter before KKT tolerance");
      ++iter;

      const std::size_t i = best_i, j = best_j;
      const std::size_t bi = base(i), bj = base(j);
      const double yi = sign(i), yj = sign(j);
      const double kii = k(bi, bi), kjj = k(bj, bj), kij = k(bi, bj);
      const double tau = 1e-12;

      double old_ai = a[i], old_aj = a[j];
      if (yi != yj) {
        // Q_st = y_s y_t K(bs,bt), so the pair curvature is
        // K_ii + K_jj - 2 K_ij for either sign combination.
        double quad = std::max(kii + kjj - 2.0 * kij, tau);
        double delta = (-grad[i] - grad[j]) / quad;
        double diff = a[i] - a[j];
        a[i] += delta;
        a[j] += delta;
        if (diff > 0 && a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        } else if (diff <= 0 && a[i] < 0) {
          a[i] = 0;
          a[j] = -diff;
        }
        if (diff > 0 && a[i] > C) {
          a[i] = C;
          a[j] = C - diff;
        } else if (diff <= 0 && a[j] > C) {
          a[j] = C;
          a[i] = C + diff;
        }
      } else {
        double quad = std::max(kii + kjj - 2.0 * kij, tau);
        double delta = (grad[i] - grad[j]) / quad;
        double total = a[i] + a[j];
        a[i] -= delta;
        a[j] += delta;
        if (total > C && a[i] > C) {
          a[i] = C;
          a[j] = total - C;
        } else if (total <= C && a[j] < 0) {
          a[j] = 0;
          a[i] = total;
        }
        if (total > C && a[j] > C) {
          a[j] = C;
          a[i] = total - C;
        } else if (total <= C && a[i] < 0) {
          a[i] = 0;
          a[j] = total;
        }
      }

      const double di = a[i] - old_ai, dj = a[j] - old_aj;
      if (di == 0.0 && dj == 0.0) break;  // numerically stuck pair
      for (std::size_t t = 0; t < N; ++t) {
        const std::size_t bt = base(t);
        const double yt = sign(t);
        grad[t] += yt * yi * k(bt, bi) * di + yt * yj * k(bt, bj) * dj;
      }
    }

    std::vector<double> beta(n_);
    for (std::size_t i = 0; i < n_; ++i) beta[i] = a[i] - a[i + n_];
    double bias = 0.5 * (m_val + M_val);
    if (!std::isfinite(bias)) bias = 0.0;
    return {beta, bias};
  }

 private:
  const tabular::LabeledDataset& data_;
  KernelSpec kernel_;
  SvrParams params_;
  std::size_t n_;
  std::vector<double> gram_;
};

}  // namespace

SvrModel fit_svr(const tabular::LabeledDataset& train, KernelSpec kernel,
                 const SvrParams& params, std::uint64_t /*seed*/) {
  if (train.n() < 2)
    throw Error(ErrorCode::empty_train_set, "fit_svr needs n >= 2");
  if (kernel.auto_scale()) kernel.gamma = resolve_gamma(train);
  if (kernel.kind == KernelSpec::Kind::rbf && kernel.gamma <= 0.0)
    throw Error(ErrorCode::bad_config, "rbf gamma must be > 0");

  SmoSolver solver(train, kernel, params);
  auto [beta, bias] = solver.solve();

  SvrModel m;
  m.kernel = kernel;
  m.params = params;
  m.bias = bias;
  m.n_features = train.d();
  for (std::size_t i = 0; i < train.n(); ++i) {
    if (beta[i] == 0.0) continue;
    auto r = train.row(i);
    m.support_vectors.insert(m.support_vectors.end(), r.begin(), r.end());
    m.dual_coefs.push_back(beta[i]);
  }
  return m;
}

double predict_svr(const SvrModel& m, VecView x) {
  if (x.size() != m.n_features)
    throw Error(ErrorCode::dimension_mismatch, "wrong feature count");
  double sum = m.bias;
  for (std::size_t i = 0; i < m.n_support(); ++i)
    sum += m.dual_coefs[i] * kernel_eval(m.kernel, m.sv(i), x);
  return sum;
}

LinearWeights linear_weights(const SvrModel& m) {
  if (m.kernel.kind != KernelSpec::Kind::linear)
    throw Error(ErrorCode::not_linear_kernel,
                "linear_weights requires a linear-kernel model");
  LinearWeights w;
  w.weights.assign(m.n_features, 0.0);
  w.bias = m.bias;
  for (std::size_t i = 0; i < m.n_support(); ++i) {
    auto sv = m.sv(i);
    for (std::size_t j = 0; j < m.n_features; ++j)
      w.weights[j] += m.dual_coefs[i] * sv[j];
  }
  return w;
}

}  // namespace aesth::svr
