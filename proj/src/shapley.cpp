#include "aesth/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "aesth/rng.hpp"

namespace aesth::shapley {

BackgroundSet single_point_background(VecView point) {
  BackgroundSet b;
  b.points.assign(point.begin(), point.end());
  b.weights = {1.0};
  b.d = point.size();
  return b;
}

BackgroundSet full_background(const tabular::LabeledDataset& d) {
  BackgroundSet b;
  b.points = d.values;
  b.weights.assign(d.n(), 1.0);
  b.d = d.d();
  return b;
}

KmeansResult kmeans_summarize(const std::vector<double>& points,
                              std::size_t n, std::size_t d, std::size_t k,
                              std::uint64_t seed, std::size_t max_iter) {
  if (k < 1 || k > n)
    throw Error(ErrorCode::k_exceeds_n, "need 1 <= k <= n for k-means");

  auto row = [&](std::size_t i) { return VecView(points.data() + i * d, d); };
  auto sqdist = [d](VecView a, VecView b) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
  };

  // Farthest-point initialization: seeded first pick, then repeatedly the
  // point farthest from its nearest chosen centre (ties to lowest index).
  std::vector<std::size_t> centre_idx;
  Rng rng(seed);
  centre_idx.push_back(uniform_index(rng, n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centre_idx.size() < k) {
    for (std::size_t i = 0; i < n; ++i)
      nearest[i] = std::min(nearest[i], sqdist(row(i), row(centre_idx.back())));
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (nearest[i] > nearest[far]) far = i;
    centre_idx.push_back(far);
  }

  std::vector<double> centres(k * d);
  for (std::size_t c = 0; c < k; ++c) {
    auto r = row(centre_idx[c]);
    std::copy(r.begin(), r.end(), centres.begin() + c * d);
  }

  KmeansResult result;
  result.assignment.assign(n, 0);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Assignment step; ties to the lowest cluster index.
    double objective = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double dist = sqdist(row(i), VecView(centres.data() + c * d, d));
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      objective += best_d;
      if (result.assignment[i] != best) changed = true;
      result.assignment[i] = best;
    }
    result.objective_trace.push_back(objective);
    if (!changed && iter > 0) break;

    // Update step; an emptied cluster keeps its previous centre.
    std::vector<double> sums(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = result.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += points[i * d + j];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        for (std::size_t j = 0; j < d; ++j)
          centres[c * d + j] = sums[c * d + j] / double(counts[c]);
  }

  result.background.points = std::move(centres);
  result.background.d = d;
  result.background.weights.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    result.background.weights[result.assignment[i]] += 1.0;
  return result;
}

KmeansResult kmeans_summarize(const tabular::LabeledDataset& data,
                              std::size_t k, std::uint64_t seed,
                              std::size_t max_iter) {
  return kmeans_summarize(data.values, data.n(), data.d(), k, seed, max_iter);
}

double value_function(const PredictOracle& oracle, VecView x,
                      std::uint64_t subset, const BackgroundSet& background) {
  const std::size_t d = oracle.d;
  std::vector<double> z(d);
  double acc = 0.0, wsum = 0.0;
  for (std::size_t b = 0; b < background.k(); ++b) {
    auto bg = background.point(b);
    for (std::size_t j = 0; j < d; ++j)
      z[j] = (subset >> j) & 1 ? x[j] : bg[j];
    acc += background.weights[b] * oracle.f(z);
    wsum += background.weights[b];
  }
  return acc / wsum;
}

std::vector<double> value_table(const PredictOracle& oracle, VecView x,
                                const BackgroundSet& background) {
  const std::size_t d = oracle.d;
  if (d > 20)
    throw Error(ErrorCode::too_many_features,
                "coalition enumeration is limited to d <= 20");
  std::vector<double> v(std::size_t(1) << d);
  for (std::uint64_t s = 0; s < v.size(); ++s)
    v[s] = value_function(oracle, x, s, background);
  return v;
}

namespace {

// |S|! (d-|S|-1)! / d!  ==  1 / (d * C(d-1, |S|))
double shapley_weight(std::size_t d, std::size_t s) {
  double binom = 1.0;
  for (std::size_t t = 0; t < s; ++t)
    binom *= double(d - 1 - t) / double(t + 1);
  return 1.0 / (double(d) * binom);
}

Attribution shapley_from_table(const std::vector<double>& v, std::size_t d) {
  Attribution a;
  a.base_value = v[0];
  a.phis.assign(d, 0.0);
  const std::uint64_t full = (std::uint64_t(1) << d) - 1;
  std::vector<double> w(d);
  for (std::size_t s = 0; s < d; ++s) w[s] = shapley_weight(d, s);
  for (std::size_t i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t(1) << i;
    const std::uint64_t rest = full & ~bit;
    // Enumerate subsets of N \ {i} via the submask walk.
    std::uint64_t s = rest;
    for (;;) {
      a.phis[i] += w[std::size_t(std::popcount(s))] * (v[s | bit] - v[s]);
      if (s == 0) break;
      s = (s - 1) & rest;
    }
  }
  return a;
}

}  // namespace

Attribution exact_shapley(const PredictOracle& oracle, VecView x,
                          const BackgroundSet& background) {
  return shapley_from_table(value_table(oracle, x, background), oracle.d);
}

namespace {

double kernel_weight(std::size_t d, std::size_t s) {
  double binom = 1.0;
  for (std::size_t t = 0; t < s; ++t) binom *= double(d - t) / double(t + 1);
  return double(d - 1) / (binom * double(s) * double(d - s));
}

// Weighted least squares over coalition rows with the base and sum
// constraints eliminated analytically: the last feature's phi is
// substituted by (f(x) - base) - sum of the others.
Attribution solve_kernel_system(
    const std::vector<std::pair<std::uint64_t, double>>& coalitions,
    const std::vector<double>& values, double base, double fx,
    std::size_t d) {
  const std::size_t p = d - 1;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(long(p), long(p));
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(long(p));
  std::vector<double> rowbuf(p);
  for (std::size_t r = 0; r < coalitions.size(); ++r) {
    auto [mask, weight] = coalitions[r];
    const double last = double((mask >> (d - 1)) & 1);
    for (std::size_t j = 0; j < p; ++j)
      rowbuf[j] = double((mask >> j) & 1) - last;
    const double rhs = values[r] - base - last * (fx - base);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j <= i; ++j)
        ata(long(i), long(j)) += weight * rowbuf[i] * rowbuf[j];
      atb(long(i)) += weight * rowbuf[i] * rhs;
    }
  }
  ata = ata.selfadjointView<Eigen::Lower>();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
  if (!lu.isInvertible())
    throw Error(ErrorCode::singular_system,
                "degenerate coalition set: weighted normal matrix is "
                "singular (rank " +
                    std::to_string(lu.rank()) + " of " + std::to_string(p) +
                    ")");
  Eigen::VectorXd sol = lu.solve(atb);

  Attribution a;
  a.base_value = base;
  a.phis.assign(d, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    a.phis[j] = sol(long(j));
    sum += sol(long(j));
  }
  a.phis[d - 1] = (fx - base) - sum;
  return a;
}

}  // namespace

Attribution kernel_shap(const PredictOracle& oracle, VecView x,
                        const BackgroundSet& background,
                        const KernelSampling& sampling) {
  const std::size_t d = oracle.d;
  if (d == 1) {
    // Single feature: the sum constraint fixes everything.
    Attribution a;
    a.base_value = value_function(oracle, x, 0, background);
    a.phis = {oracle.f(x) - a.base_value};
    return a;
  }

  const double base = value_function(oracle, x, 0, background);
  const double fx = oracle.f(x);

  std::vector<std::pair<std::uint64_t, double>> coalitions;
  std::vector<double> values;
  if (sampling.enumerate_all) {
    if (d > 20)
      throw Error(ErrorCode::too_many_features,
                  "enumerate_all is limited to d <= 20");
    const std::uint64_t full = (std::uint64_t(1) << d) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      coalitions.emplace_back(
          mask, kernel_weight(d, std::size_t(std::popcount(mask))));
      values.push_back(value_function(oracle, x, mask, background));
    }
  } else {
    if (d < 2)
      throw Error(ErrorCode::too_many_features, "sampling needs d >= 2");
    // Draw coalition sizes proportional to total Shapley-kernel mass per
    // size, then a uniform subset of that size; duplicates merge as counts.
    std::vector<double> size_mass(d - 1);
    for (std::size_t s = 1; s < d; ++s)
      size_mass[s - 1] = double(d - 1) / (double(s) * double(d - s));
    const double total =
        std::accumulate(size_mass.begin(), size_mass.end(), 0.0);
    Rng rng(sampling.seed);
    std::map<std::uint64_t, double> counts;
    for (std::size_t m = 0; m < std::max<std::size_t>(sampling.n_samples, 1);
         ++m) {
      double u = uniform01(rng) * total;
      std::size_t s = 1;
      for (; s < d - 1; ++s) {
        if (u < size_mass[s - 1]) break;
        u -= size_mass[s - 1];
      }
      std::vector<std::size_t> pool(d);
      std::iota(pool.begin(), pool.end(), 0);
      std::uint64_t mask = 0;
      for (std::size_t t = 0; t < s; ++t) {
        std::size_t j = t + uniform_index(rng, pool.size() - t);
        std::swap(pool[t], pool[j]);
        mask |= std::uint64_t(1) << pool[t];
      }
      counts[mask] += 1.0;
    }
    for (auto [mask, c] : counts) {
      coalitions.emplace_back(mask, c);
      values.push_back(value_function(oracle, x, mask, background));
    }
  }
  return solve_kernel_system(coalitions, values, base, fx, d);
}

namespace {

// Path-dependent TreeSHAP: maintains the distribution of feature-subset
// path weights while descending, splitting flow by per-node covers when
// the split feature is not yet on the path.
struct PathElem {
  int feature = -1;
  double zero_fraction = 1.0;
  double one_fraction = 1.0;
  double pweight = 1.0;
};

class TreeShapWalker {
 public:
  TreeShapWalker(const trees::Tree& tree, VecView x, std::vector<double>& phi)
      : tree_(tree), x_(x), phi_(phi) {}

  void run() { recurse(0, {}, 1.0, 1.0, -1); }

 private:
  static void extend(std::vector<PathElem>& path, double pz, double po,
                     int feature) {
    path.push_back({feature, pz, po, path.empty() ? 1.0 : 0.0});
    const int l = int(path.size()) - 1;
    for (int i = l - 1; i >= 0; --i) {
      path[i + 1].pweight += po * path[i].pweight * double(i + 1) / double(l + 1);
      path[i].pweight = pz * path[i].pweight * double(l - i) / double(l + 1);
    }
  }

  static void unwind(std::vector<PathElem>& path, int index) {
    const int l = int(path.size()) - 1;
    const double po = path[index].one_fraction;
    const double pz = path[index].zero_fraction;
    double next = path[l].pweight;
    for (int i = l - 1; i >= 0; --i) {
      if (po != 0.0) {
        double tmp = path[i].pweight;
        path[i].pweight = next * double(l + 1) / (double(i + 1) * po);
        next = tmp - path[i].pweight * pz * double(l - i) / double(l + 1);
      } else {
        path[i].pweight =
            path[i].pweight * double(l + 1) / (pz * double(l - i));
      }
    }
    for (int i = index; i < l; ++i) {
      path[i].feature = path[i + 1].feature;
      path[i].zero_fraction = path[i + 1].zero_fraction;
      path[i].one_fraction = path[i + 1].one_fraction;
    }
    path.pop_back();
  }

  static double unwound_sum(const std::vector<PathElem>& path, int index) {
    const int l = int(path.size()) - 1;
    const double po = path[index].one_fraction;
    const double pz = path[index].zero_fraction;
    double total = 0.0;
    double next = path[l].pweight;
    for (int i = l - 1; i >= 0; --i) {
      if (po != 0.0) {
        double tmp = next * double(l + 1) / (double(i + 1) * po);
        total += tmp;
        next = path[i].pweight - tmp * pz * double(l - i) / double(l + 1);
      } else {
        total += path[i].pweight * double(l + 1) / (pz * double(l - i));
      }
    }
    return total;
  }

  void recurse(int node, std::vector<PathElem> path, double pz, double po,
               int feature) {
    extend(path, pz, po, feature);
    const trees::Node& nd = tree_.nodes[std::size_t(node)];
    if (tree_.leaf(node)) {
      for (int i = 1; i < int(path.size()); ++i)
        phi_[std::size_t(path[i].feature)] +=
            unwound_sum(path, i) *
            (path[i].one_fraction - path[i].zero_fraction) * nd.value;
      return;
    }
    if (nd.cover <= 0.0)
      throw Error(ErrorCode::missing_covers, "internal node without cover");
    const bool go_left = x_[std::size_t(nd.feature)] <= nd.threshold;
    const int hot = go_left ? nd.left : nd.right;
    const int cold = go_left ? nd.right : nd.left;

    double iz = 1.0, io = 1.0;
    for (int i = 1; i < int(path.size()); ++i)
      if (path[i].feature == nd.feature) {
        iz = path[i].zero_fraction;
        io = path[i].one_fraction;
        unwind(path, i);
        break;
      }
    const double hot_cover = tree_.nodes[std::size_t(hot)].cover;
    const double cold_cover = tree_.nodes[std::size_t(cold)].cover;
    recurse(hot, path, iz * hot_cover / nd.cover, io, nd.feature);
    recurse(cold, path, iz * cold_cover / nd.cover, 0.0, nd.feature);
  }

  const trees::Tree& tree_;
  VecView x_;
  std::vector<double>& phi_;
};

double tree_expected_value(const trees::Tree& tree, int node) {
  if (tree.leaf(node)) return tree.nodes[std::size_t(node)].value;
  const trees::Node& nd = tree.nodes[std::size_t(node)];
  if (nd.cover <= 0.0)
    throw Error(ErrorCode::missing_covers, "internal node without cover");
  const double lc = tree.nodes[std::size_t(nd.left)].cover;
  const double rc = tree.nodes[std::size_t(nd.right)].cover;
  return (lc * tree_expected_value(tree, nd.left) +
          rc * tree_expected_value(tree, nd.right)) /
         nd.cover;
}

}  // namespace

Attribution tree_shap(const trees::Tree& tree, VecView x, std::size_t d) {
  Attribution a;
  a.phis.assign(d, 0.0);
  a.base_value = tree_expected_value(tree, 0);
  TreeShapWalker(tree, x, a.phis).run();
  return a;
}

Attribution tree_shap(const trees::ForestModel& m, VecView x) {
  if (x.size() != m.n_features)
    throw Error(ErrorCode::dimension_mismatch, "wrong feature count");
  Attribution total;
  total.phis.assign(m.n_features, 0.0);
  for (const auto& t : m.trees) {
    Attribution a = tree_shap(t, x, m.n_features);
    total.base_value += a.base_value;
    for (std::size_t j = 0; j < m.n_features; ++j) total.phis[j] += a.phis[j];
  }
  const double inv = 1.0 / double(m.trees.size());
  total.base_value *= inv;
  for (auto& p : total.phis) p *= inv;
  return total;
}

Attribution tree_shap(const trees::BoostedModel& m, VecView x) {
  if (x.size() != m.n_features)
    throw Error(ErrorCode::dimension_mismatch, "wrong feature count");
  Attribution total;
  total.phis.assign(m.n_features, 0.0);
  total.base_value = m.base_score;
  for (const auto& t : m.trees) {
    Attribution a = tree_shap(t, x, m.n_features);
    total.base_value += m.params.learning_rate * a.base_value;
    for (std::size_t j = 0; j < m.n_features; ++j)
      total.phis[j] += m.params.learning_rate * a.phis[j];
  }
  return total;
}

namespace {

double pair_interaction_from_table(const std::vector<double>& v,
                                   std::size_t d, std::size_t i,
                                   std::size_t j) {
  const std::uint64_t full = (std::uint64_t(1) << d) - 1;
  const std::uint64_t bi = std::uint64_t(1) << i;
  const std::uint64_t bj = std::uint64_t(1) << j;
  const std::uint64_t rest = full & ~(bi | bj);
  double phi = 0.0;
  std::uint64_t s = rest;
  for (;;) {
    const std::size_t size = std::size_t(std::popcount(s));
    // |S|! (d-|S|-2)! / (2 (d-1)!)  ==  1 / (2 (d-1) C(d-2, |S|))
    double binom = 1.0;
    for (std::size_t t = 0; t < size; ++t)
      binom *= double(d - 2 - t) / double(t + 1);
    const double w = 1.0 / (2.0 * double(d - 1) * binom);
    phi += w * (v[s | bi | bj] - v[s | bi] - v[s | bj] + v[s]);
    if (s == 0) break;
    s = (s - 1) & rest;
  }
  return phi;
}

}  // namespace

double interaction_index(const PredictOracle& oracle, VecView x,
                         const BackgroundSet& background, std::size_t i,
                         std::size_t j) {
  if (oracle.d > 16)
    throw Error(ErrorCode::too_many_features,
                "interaction enumeration is limited to d <= 16");
  if (i == j || i >= oracle.d || j >= oracle.d)
    throw Error(ErrorCode::index_out_of_range, "need distinct i, j < d");
  auto v = value_table(oracle, x, background);
  return pair_interaction_from_table(v, oracle.d, i, j);
}

InteractionMatrix full_interaction_matrix(const PredictOracle& oracle,
                                          VecView x,
                                          const BackgroundSet& background) {
  const std::size_t d = oracle.d;
  if (d > 16)
    throw Error(ErrorCode::too_many_features,
                "interaction enumeration is limited to d <= 16");
  auto v = value_table(oracle, x, background);
  Attribution phi = shapley_from_table(v, d);

  InteractionMatrix mat;
  mat.d = d;
  mat.values.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      double p = pair_interaction_from_table(v, d, i, j);
      mat.values[i * d + j] = p;
      mat.values[j * d + i] = p;
    }
  // Diagonal absorbs the main effect so rows sum to the Shapley values.
  for (std::size_t i = 0; i < d; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) off += mat.values[i * d + j];
    mat.values[i * d + i] = phi.phis[i] - off;
  }
  return mat;
}

std::vector<RankedFeature> summary_ranking(
    const std::vector<Attribution>& attributions) {
  if (attributions.empty())
    throw Error(ErrorCode::empty_input, "no attributions to rank");
  const std::size_t d = attributions.front().phis.size();
  std::vector<RankedFeature> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j].feature = j;
  for (const auto& a : attributions) {
    if (a.phis.size() != d)
      throw Error(ErrorCode::shape_mismatch, "inconsistent attribution width");
    for (std::size_t j = 0; j < d; ++j)
      out[j].mean_abs_phi += std::abs(a.phis[j]);
  }
  for (auto& r : out) r.mean_abs_phi /= double(attributions.size());
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedFeature& a, const RankedFeature& b) {
                     return a.mean_abs_phi > b.mean_abs_phi;
                   });
  return out;
}

std::vector<DependencePoint> dependence_series(
    const std::vector<Attribution>& attributions,
    const tabular::LabeledDataset& x_test, std::size_t feature,
    std::size_t color_feature) {
  if (feature >= x_test.d() || color_feature >= x_test.d())
    throw Error(ErrorCode::index_out_of_range, "feature index out of range");
  if (attributions.size() != x_test.n())
    throw Error(ErrorCode::length_mismatch,
                "one attribution per test row required");
  std::vector<DependencePoint> out;
  out.reserve(attributions.size());
  for (std::size_t i = 0; i < attributions.size(); ++i)
    out.push_back({x_test.at(i, feature), attributions[i].phis[feature],
                   x_test.at(i, color_feature)});
  return out;
}

}  // namespace aesth::shapley
