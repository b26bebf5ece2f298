#include "aesth/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aesth/rng.hpp"

namespace aesth::trees {

int resolved_max_features(int max_features, std::size_t d) {
  if (max_features > 0) return std::min<int>(max_features, int(d));
  return int(std::ceil(std::sqrt(double(d))));
}

namespace {

struct Builder {
  const tabular::LabeledDataset& data;
  const std::vector<double>& y;
  TreeParams params;
  Rng rng;
  Tree tree;

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  // Best variance-reduction split over the candidate features. Thresholds
  // are midpoints between adjacent distinct sorted values; ties go to the
  // lowest feature index, then the lowest threshold (strict improvement
  // required, candidates scanned in increasing order).
  Split best_split(std::vector<std::size_t>& idx) {
    const std::size_t m = idx.size();
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i : idx) {
      sum += y[i];
      sum_sq += y[i] * y[i];
    }
    const double parent_sse = sum_sq - sum * sum / double(m);

    std::vector<int> candidates;
    int k = params.max_features > 0
                ? std::min<int>(params.max_features, int(data.d()))
                : int(data.d());
    if (std::size_t(k) >= data.d()) {
      candidates.resize(data.d());
      std::iota(candidates.begin(), candidates.end(), 0);
    } else {
      // Fresh Fisher-Yates draw of k feature indices at every split.
      std::vector<int> pool(data.d());
      std::iota(pool.begin(), pool.end(), 0);
      for (int t = 0; t < k; ++t) {
        std::size_t j = t + uniform_index(rng, pool.size() - t);
        std::swap(pool[t], pool[j]);
      }
      candidates.assign(pool.begin(), pool.begin() + k);
      std::sort(candidates.begin(), candidates.end());
    }

    Split best;
    std::vector<std::pair<double, std::size_t>> order(m);
    for (int f : candidates) {
      for (std::size_t r = 0; r < m; ++r)
        order[r] = {data.at(idx[r], std::size_t(f)), idx[r]};
      std::sort(order.begin(), order.end());
      double left_sum = 0.0;
      for (std::size_t r = 0; r + 1 < m; ++r) {
        left_sum += y[order[r].second];
        if (order[r].first == order[r + 1].first) continue;
        const std::size_t nl = r + 1, nr = m - nl;
        if (nl < params.min_samples_leaf || nr < params.min_samples_leaf)
          continue;
        const double right_sum = sum - left_sum;
        const double child_sse =
            sum_sq - left_sum * left_sum / double(nl) -
            right_sum * right_sum / double(nr);
        const double gain = parent_sse - child_sse;
        if (gain > best.gain + 1e-15 * std::abs(parent_sse) &&
            gain > 0.0) {
          best.feature = f;
          best.threshold = order[r].first +
                           0.5 * (order[r + 1].first - order[r].first);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(std::vector<std::size_t> idx, int depth) {
    const std::size_t m = idx.size();
    double sum = 0.0;
    for (std::size_t i : idx) sum += y[i];
    const double mean = sum / double(m);

    int node_id = int(tree.nodes.size());
    tree.nodes.push_back(Node{});
    tree.nodes[node_id].cover = double(m);
    tree.nodes[node_id].value = mean;

    bool at_depth = params.max_depth >= 0 && depth >= params.max_depth;
    if (at_depth || m < params.min_samples_split) return node_id;

    Split s = best_split(idx);
    if (s.feature < 0) return node_id;  // pure node or no admissible split

    std::vector<std::size_t> left, right;
    for (std::size_t i : idx)
      (data.at(i, std::size_t(s.feature)) <= s.threshold ? left : right)
          .push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    tree.nodes[node_id].feature = s.feature;
    tree.nodes[node_id].threshold = s.threshold;
    int l = build(std::move(left), depth + 1);
    int r = build(std::move(right), depth + 1);
    tree.nodes[node_id].left = l;
    tree.nodes[node_id].right = r;
    return node_id;
  }
};

}  // namespace

Tree fit_tree(const tabular::LabeledDataset& train, const TreeParams& params,
              std::uint64_t seed, const std::vector<double>* targets_override,
              const std::vector<std::size_t>* row_indices) {
  if (train.n() == 0)
    throw Error(ErrorCode::empty_train_set, "fit_tree on empty dataset");
  const std::vector<double>& y =
      targets_override ? *targets_override : train.targets;
  if (y.size() != train.n())
    throw Error(ErrorCode::length_mismatch,
                "targets_override length does not match dataset");
  std::vector<std::size_t> idx;
  if (row_indices) {
    idx = *row_indices;
    if (idx.empty())
      throw Error(ErrorCode::empty_train_set, "empty row index set");
  } else {
    idx.resize(train.n());
    std::iota(idx.begin(), idx.end(), 0);
  }
  Builder b{train, y, params, Rng(seed), Tree{}};
  b.build(std::move(idx), 0);
  return b.tree;
}

double predict_tree(const Tree& t, VecView x) {
  int i = 0;
  while (!t.leaf(i)) {
    const Node& nd = t.nodes[i];
    if (std::size_t(nd.feature) >= x.size())
      throw Error(ErrorCode::dimension_mismatch,
                  "instance shorter than tree split feature index");
    i = x[std::size_t(nd.feature)] <= nd.threshold ? nd.left : nd.right;
  }
  return t.nodes[i].value;
}

ForestModel fit_random_forest(const tabular::LabeledDataset& train,
                              const ForestParams& params, std::uint64_t seed) {
  if (train.n() < 2)
    throw Error(ErrorCode::empty_train_set, "forest needs n >= 2");
  ForestModel m;
  m.params = params;
  m.seed = seed;
  m.n_features = train.d();
  TreeParams tp = params.tree;
  tp.max_features = resolved_max_features(tp.max_features, train.d());
  m.params.tree.max_features = tp.max_features;

  m.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    std::uint64_t tree_seed = derive_seed(seed, t);
    Rng boot(derive_seed(tree_seed, 0x626f6f74ULL));  // bootstrap stream
    std::vector<std::size_t> sample(train.n());
    for (auto& s : sample) s = uniform_index(boot, train.n());
    std::sort(sample.begin(), sample.end());
    m.trees.push_back(fit_tree(train, tp, tree_seed, nullptr, &sample));
  }
  return m;
}

double predict_forest(const ForestModel& m, VecView x) {
  if (x.size() != m.n_features)
    throw Error(ErrorCode::dimension_mismatch, "wrong feature count");
  double sum = 0.0;
  for (const auto& t : m.trees) sum += predict_tree(t, x);
  return sum / double(m.trees.size());
}

namespace {

double soft_threshold(double g, double alpha) {
  if (g > alpha) return g - alpha;
  if (g < -alpha) return g + alpha;
  return 0.0;
}

}  // namespace

BoostedModel fit_gbt(const tabular::LabeledDataset& train,
                     const BoostParams& params, std::uint64_t seed) {
  if (train.n() == 0)
    throw Error(ErrorCode::empty_train_set, "fit_gbt on empty dataset");
  const std::size_t n = train.n();
  BoostedModel m;
  m.params = params;
  m.seed = seed;
  m.n_features = train.d();
  m.base_score =
      std::accumulate(train.targets.begin(), train.targets.end(), 0.0) /
      double(n);

  std::vector<double> pred(n, m.base_score), residual(n);
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_split = 2;
  tp.min_samples_leaf = 1;
  tp.max_features = int(train.d());

  for (std::size_t round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i)
      residual[i] = train.targets[i] - pred[i];

    std::uint64_t round_seed = derive_seed(seed, round);
    std::vector<std::size_t> rows;
    const std::vector<std::size_t>* rows_ptr = nullptr;
    if (params.subsample < 1.0) {
      std::size_t take =
          std::max<std::size_t>(1, std::size_t(params.subsample * double(n)));
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), 0);
      Rng sub(derive_seed(round_seed, 0x737562ULL));
      for (std::size_t t = 0; t < take; ++t) {
        std::size_t j = t + uniform_index(sub, pool.size() - t);
        std::swap(pool[t], pool[j]);
      }
      rows.assign(pool.begin(), pool.begin() + take);
      std::sort(rows.begin(), rows.end());
      rows_ptr = &rows;
    }

    Tree tree = fit_tree(train, tp, round_seed, &residual, rows_ptr);
    // Second-order leaf weights for squared error: the raw leaf holds the
    // residual mean, so G = mean * cover and H = cover. Apply the L1
    // soft-threshold, then shrink by lambda.
    for (auto& nd : tree.nodes) {
      if (nd.feature >= 0) continue;
      double g = nd.value * nd.cover;
      nd.value = soft_threshold(g, params.alpha_l1) /
                 (nd.cover + params.lambda_l2);
    }
    for (std::size_t i = 0; i < n; ++i)
      pred[i] += params.learning_rate * predict_tree(tree, train.row(i));
    m.trees.push_back(std::move(tree));

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = train.targets[i] - pred[i];
      sse += e * e;
    }
    m.train_rmse.push_back(std::sqrt(sse / double(n)));
  }
  return m;
}

double predict_gbt(const BoostedModel& m, VecView x) {
  if (x.size() != m.n_features)
    throw Error(ErrorCode::dimension_mismatch, "wrong feature count");
  double sum = 0.0;
  for (const auto& t : m.trees) sum += predict_tree(t, x);
  return m.base_score + m.params.learning_rate * sum;
}

}  // namespace aesth::trees
